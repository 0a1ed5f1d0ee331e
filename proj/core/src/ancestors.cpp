#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "nomad/nomad.hpp"

namespace nomad {

Tolerances Tolerances::finite(double xi, double gamma) {
    Tolerances t;
    t.xi = xi;
    t.eps_d = std::min(xi / 14.0, gamma);
    t.sep_tol = t.eps_d / 6.0;
    return t;
}

double triplet_distance(int x, const Triple& u, const DistanceMatrix& d) {
    if (u[0] == u[1] || u[1] == u[2] || u[0] == u[2]) throw NomadError("triplet_distance", "repeated vertex");
    int y = 0, z = 0;
    if (x == u[0]) y = u[1], z = u[2];
    else if (x == u[1]) y = u[0], z = u[2];
    else if (x == u[2]) y = u[0], z = u[1];
    else throw NomadError("triplet_distance", "vertex not in triple");
    return 0.5 * (d.at(x, y) + d.at(x, z) - d.at(y, z));
}

namespace {

double pair_distance(const DistanceMatrix& d, int x, int y) { return x == y ? 0.0 : d.at(x, y); }

}  // namespace

bool tia(const Triple& u, const Triple& w, const DistanceMatrix& d, const Tolerances& tol) {
    for (int x : u) {
        const double dx = triplet_distance(x, u, d);
        int hits = 0;
        for (int y : w)
            if (std::abs(dx + triplet_distance(y, w, d) - pair_distance(d, x, y)) <= tol.xi) ++hits;
        if (hits < 2) return false;
    }
    return true;
}

bool separated_by(int a, int m, int b, const DistanceMatrix& d, double sep_tol) {
    return std::abs(d.at(a, b) - d.at(a, m) - d.at(m, b)) <= sep_tol;
}

// Greedy partition of the sorted values into runs narrower than eps_d.
ModeResult eps_mode(std::vector<double> values, double eps_d) {
    if (values.empty()) throw NomadError("eps_mode", "empty value list");
    std::sort(values.begin(), values.end());
    ModeResult best;
    std::size_t i = 0;
    while (i < values.size()) {
        std::size_t j = i;
        while (j < values.size() && values[j] - values[i] < eps_d) ++j;
        if (j == i) ++j;  // eps_d == 0: every value is its own group
        if (j - i > best.group_size) best = {values[i], j - i};
        i = j;
    }
    return best;
}

std::vector<int> AncestorCatalog::ancestors() const {
    std::vector<int> out(a_obs.begin(), a_obs.end());
    out.insert(out.end(), a_hid.begin(), a_hid.end());
    return out;
}

const TripletCollection& AncestorCatalog::collection(int label) const {
    for (const auto& c : collections)
        if (c.label == label) return c;
    throw NomadError("catalog", "no collection for label " + std::to_string(label));
}

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a), b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

AncestorResult identify_ancestors(const DistanceMatrix& dist, const Tolerances& tol, Diagnostics* diag) {
    auto t0 = std::chrono::steady_clock::now();
    const auto& labels = dist.labels();
    if (!std::is_sorted(labels.begin(), labels.end()))
        throw NomadError("identify_ancestors", "observed labels must be sorted");
    const std::size_t n = labels.size();

    std::vector<Triple> triples;
    std::vector<std::array<std::size_t, 3>> ix;
    std::vector<std::array<double, 3>> dx;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            for (std::size_t c = b + 1; c < n; ++c) {
                const double ab = dist.idx(a, b), ac = dist.idx(a, c), bc = dist.idx(b, c);
                triples.push_back({labels[a], labels[b], labels[c]});
                ix.push_back({a, b, c});
                dx.push_back({0.5 * (ab + ac - bc), 0.5 * (ab + bc - ac), 0.5 * (ac + bc - ab)});
            }

    // One 3x3 residual grid answers TIA in both directions: rows for (U, W),
    // columns for (W, U). A pair is merged only when both directions pass.
    UnionFind uf(triples.size());
    std::vector<char> paired(triples.size(), 0);
    for (std::size_t u = 0; u < triples.size(); ++u) {
        const auto& iu = ix[u];
        for (std::size_t w = u + 1; w < triples.size(); ++w) {
            const auto& iw = ix[w];
            int row_hits[3] = {0, 0, 0}, col_hits[3] = {0, 0, 0};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    double dxy = iu[i] == iw[j] ? 0.0 : dist.idx(iu[i], iw[j]);
                    if (std::abs(dx[u][i] + dx[w][j] - dxy) <= tol.xi) {
                        ++row_hits[i];
                        ++col_hits[j];
                    }
                }
            bool pass = true;
            for (int i = 0; i < 3; ++i) pass = pass && row_hits[i] >= 2 && col_hits[i] >= 2;
            if (pass) {
                uf.unite(u, w);
                paired[u] = paired[w] = 1;
            }
        }
    }

    std::map<std::size_t, std::vector<Triple>> groups;
    for (std::size_t t = 0; t < triples.size(); ++t)
        if (paired[t]) groups[uf.find(t)].push_back(triples[t]);

    AncestorResult out;
    std::vector<TripletCollection> hidden;
    for (auto& [root, ts] : groups) {
        VertexSet covered;
        for (const auto& t : ts) covered.insert(t.begin(), t.end());
        if (covered.size() != n) {
            // A genuine ancestor has a triple through every observed vertex.
            if (diag) ++diag->dropped_uncovered;
            continue;
        }
        TripletCollection col;
        col.triples = std::move(ts);
        for (const auto& t : col.triples) {
            for (int m = 0; m < 3 && !col.observed; ++m) {
                int a = t[(m + 1) % 3], b = t[(m + 2) % 3];
                if (separated_by(a, t[m], b, dist, tol.sep_tol)) {
                    col.observed = true;
                    col.label = t[m];
                }
            }
            if (col.observed) break;
        }
        if (col.observed) {
            if (out.catalog.a_obs.count(col.label)) {
                if (diag) diag->notes.push_back("two collections share observed ancestor " + std::to_string(col.label));
                continue;
            }
            out.catalog.a_obs.insert(col.label);
            out.catalog.collections.push_back(std::move(col));
        } else {
            hidden.push_back(std::move(col));
        }
    }
    std::sort(out.catalog.collections.begin(), out.catalog.collections.end(),
              [](const auto& a, const auto& b) { return a.label < b.label; });
    int next = -1;
    for (auto& col : hidden) {
        col.label = next--;
        out.catalog.a_hid.push_back(col.label);
        out.catalog.collections.push_back(std::move(col));
    }
    if (diag)
        for (const auto& c : out.catalog.collections) diag->collection_sizes.push_back(c.triples.size());

    // Hidden-to-observed distances through any triple holding the vertex.
    out.ext = dist.extended(out.catalog.a_hid);
    for (int h : out.catalog.a_hid) {
        const auto& col = out.catalog.collection(h);
        for (int j : labels) {
            auto it = std::find_if(col.triples.begin(), col.triples.end(),
                                   [&](const Triple& t) { return t[0] == j || t[1] == j || t[2] == j; });
            out.ext.set(h, j, triplet_distance(j, *it, dist));
        }
    }

    // Hidden-to-hidden distances by the eps_d-mode of the 9 cross values,
    // preferring a vertex-disjoint pair of triples.
    for (std::size_t a = 0; a < out.catalog.a_hid.size(); ++a)
        for (std::size_t b = a + 1; b < out.catalog.a_hid.size(); ++b) {
            int p = out.catalog.a_hid[a], q = out.catalog.a_hid[b];
            const auto& cp = out.catalog.collection(p).triples;
            const auto& cq = out.catalog.collection(q).triples;
            const Triple* up = &cp.front();
            const Triple* uq = &cq.front();
            bool found = false;
            for (const auto& s : cp) {
                for (const auto& t : cq) {
                    bool disjoint = std::none_of(s.begin(), s.end(), [&](int x) {
                        return x == t[0] || x == t[1] || x == t[2];
                    });
                    if (disjoint) {
                        up = &s, uq = &t, found = true;
                        break;
                    }
                }
                if (found) break;
            }
            std::vector<double> delta, positive;
            for (int x : *up)
                for (int y : *uq)
                    delta.push_back(pair_distance(dist, x, y) - triplet_distance(x, *up, dist) -
                                    triplet_distance(y, *uq, dist));
            // When a member of each triple sits behind the other ancestor,
            // those entries equal -d_pq and can outnumber the true value.
            // A distance between distinct vertices is positive.
            for (double v : delta)
                if (v > tol.eps_d) positive.push_back(v);
            auto mode = eps_mode(positive.empty() ? delta : positive, tol.eps_d);
            if (mode.group_size < 4 && diag)
                diag->notes.push_back("ambiguous mode for hidden pair " + std::to_string(p) + "," + std::to_string(q));
            out.ext.set(p, q, mode.value);
            if (diag) diag->hidden_modes.push_back({p, q, mode});
        }
    if (diag) diag->stage_ms.emplace_back("identify_ancestors", ms_since(t0));
    return out;
}

}  // namespace nomad
