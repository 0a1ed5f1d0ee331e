#include <algorithm>
#include <chrono>
#include <functional>

#include "nomad/nomad.hpp"

namespace nomad {

const LeafCluster* Clusters::leaf_of(int ancestor) const {
    for (const auto& l : leaf)
        if (l.l1 == ancestor) return &l;
    return nullptr;
}

Clusters learn_clusters(const AncestorCatalog& catalog, const DistanceMatrix& ext, const Tolerances& tol,
                        Diagnostics* diag) {
    auto t0 = std::chrono::steady_clock::now();
    const auto anc = catalog.ancestors();
    Clusters out;
    std::map<int, VertexSet> leaf;
    std::map<VertexSet, VertexSet> internal;
    for (int x : ext.labels()) {
        if (x < 0 || catalog.a_obs.count(x)) continue;
        if (anc.empty()) break;

        std::optional<int> home;
        for (int a : anc) {
            bool all = true;
            for (int b : anc)
                if (b != a && !separated_by(x, a, b, ext, tol.sep_tol)) {
                    all = false;
                    break;
                }
            if (all && (!home || ext.at(x, a) < ext.at(x, *home))) home = a;
        }
        if (home) {
            leaf[*home].insert(x);
            continue;
        }

        // Ancestors not shadowed by another ancestor as seen from x.
        VertexSet frontier;
        for (int a : anc) {
            bool shadowed = false;
            for (int b : anc)
                if (b != a && separated_by(x, b, a, ext, tol.sep_tol)) {
                    shadowed = true;
                    break;
                }
            if (!shadowed) frontier.insert(a);
        }
        if (frontier.size() >= 2) {
            internal[frontier].insert(x);
        } else if (frontier.size() == 1) {
            if (diag) diag->notes.push_back("vertex " + std::to_string(x) + " fails the leaf test but has one frontier ancestor");
            leaf[*frontier.begin()].insert(x);
        } else {
            throw NomadError("learn_clusters", "vertex " + std::to_string(x) + " fits no cluster");
        }
    }
    for (int a : anc) {
        auto it = leaf.find(a);
        if (it != leaf.end()) out.leaf.push_back({a, it->second, std::nullopt});
    }
    for (auto& [key, members] : internal) out.internal.push_back({key, members, {}});
    if (diag) diag->stage_ms.emplace_back("learn_clusters", std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    return out;
}

NonCutResult non_cut_test(const LeafCluster& l, const DistanceMatrix& ext, const std::vector<int>& observed,
                          const VertexSet& a_obs, const Tolerances& tol) {
    if (l.l2.size() < 2) throw NomadError("non_cut_test", "cluster needs at least two members");
    std::vector<int> outside;
    for (int v : observed)
        if (!l.l2.count(v)) outside.push_back(v);
    if (outside.size() < 2) throw NomadError("non_cut_test", "fewer than two vertices outside the cluster");
    const int a1 = outside[0], a2 = outside[1];

    NonCutResult r;
    for (int x : l.l2) {
        bool noncut = false;
        for (int y : l.l2) {
            if (y == x) continue;
            for (int z : l.l2) {
                if (z == x) continue;
                if (!tia(make_triple(x, y, a1), make_triple(x, z, a2), ext, tol)) {
                    noncut = true;
                    break;
                }
            }
            if (noncut) break;
        }
        (noncut ? r.c_noncut : r.c_cut).insert(x);
    }
    if (!a_obs.count(l.l1) && !r.c_cut.empty()) r.l3 = *r.c_cut.begin();
    return r;
}

namespace {

// Separation-only split used when the cluster spans nearly every vertex:
// x is non-cut iff some other member is not separated from it by the ancestor.
NonCutResult non_cut_by_separation(const LeafCluster& l, const DistanceMatrix& ext, const VertexSet& a_obs,
                                   const Tolerances& tol) {
    NonCutResult r;
    for (int x : l.l2) {
        bool noncut = std::any_of(l.l2.begin(), l.l2.end(),
                                  [&](int y) { return y != x && !separated_by(x, l.l1, y, ext, tol.sep_tol); });
        (noncut ? r.c_noncut : r.c_cut).insert(x);
    }
    if (!a_obs.count(l.l1) && !r.c_cut.empty()) r.l3 = *r.c_cut.begin();
    return r;
}

// Non-cut members grouped by blocks: two members share a block iff the
// ancestor does not separate them.
std::vector<VertexSet> leaf_blocks(const VertexSet& noncut, int ancestor, const DistanceMatrix& ext,
                                   const Tolerances& tol) {
    std::vector<VertexSet> groups;
    VertexSet left = noncut;
    while (!left.empty()) {
        VertexSet g{*left.begin()};
        left.erase(left.begin());
        bool grew = true;
        while (grew) {
            grew = false;
            for (auto it = left.begin(); it != left.end();) {
                bool joined = std::any_of(g.begin(), g.end(),
                                          [&](int y) { return !separated_by(*it, ancestor, y, ext, tol.sep_tol); });
                if (joined) {
                    g.insert(*it);
                    it = left.erase(it);
                    grew = true;
                } else {
                    ++it;
                }
            }
        }
        groups.push_back(std::move(g));
    }
    return groups;
}

}  // namespace

PaleResult pale(Clusters& clusters, const AncestorCatalog& catalog, const DistanceMatrix& ext,
                const std::vector<int>& observed, const Tolerances& tol, Diagnostics* diag) {
    auto t0 = std::chrono::steady_clock::now();
    PaleResult out;
    out.a_algo = catalog.a_obs;
    for (int a : catalog.a_obs) {
        out.designated[a] = a;
        if (!clusters.leaf_of(a)) out.parts.push_back({a});
    }

    for (auto& l : clusters.leaf) {
        const bool hidden = !catalog.a_obs.count(l.l1);
        NonCutResult nc;
        if (hidden && l.l2.size() < 3) {
            nc.c_cut = l.l2;
            nc.l3 = *l.l2.begin();
        } else if (!hidden && l.l2.size() == 1) {
            nc.c_cut = l.l2;
        } else {
            try {
                nc = non_cut_test(l, ext, observed, catalog.a_obs, tol);
            } catch (const NomadError&) {
                if (diag) diag->notes.push_back("non-cut test fell back to separation for ancestor " + std::to_string(l.l1));
                nc = non_cut_by_separation(l, ext, catalog.a_obs, tol);
            }
        }
        out.noncut[l.l1] = nc;
        const int art = hidden ? (nc.l3 ? *nc.l3 : 0) : l.l1;
        if (art == 0) {
            if (diag) diag->notes.push_back("no cut member in leaf cluster of " + std::to_string(l.l1));
            for (int v : l.l2) out.parts.push_back({v});
            continue;
        }
        l.l3 = art;
        out.designated[l.l1] = art;
        out.a_algo.insert(art);

        bool art_in_block = false;
        for (auto& g : leaf_blocks(nc.c_noncut, l.l1, ext, tol)) {
            if (g.size() < 2) {
                // A lone non-cut member cannot form a block; keep it pendant.
                nc.c_cut.insert(g.begin(), g.end());
                continue;
            }
            g.insert(art);
            out.parts.push_back(g);
            art_in_block = true;
        }
        if (!art_in_block) out.parts.push_back({art});
        for (int v : nc.c_cut) {
            if (v == art) continue;
            out.parts.push_back({v});
            out.e_leaf.push_back({{art}, {v}, art, v});
        }
    }

    for (auto& ic : clusters.internal) {
        VertexSet block = ic.i2;
        bool ok = true;
        for (int a : ic.i1) {
            auto it = out.designated.find(a);
            if (it == out.designated.end()) {
                ok = false;
                continue;
            }
            if (a < 0) ic.i3.insert(it->second);
            block.insert(it->second);
        }
        if (!ok && diag) diag->notes.push_back("internal cluster bound to an ancestor without a label");
        std::erase_if(out.parts, [&](const VertexSet& p) { return p.size() == 1 && block.count(*p.begin()); });
        out.parts.push_back(block);
    }
    std::sort(out.parts.begin(), out.parts.end());
    out.parts.erase(std::unique(out.parts.begin(), out.parts.end()), out.parts.end());
    if (diag) diag->stage_ms.emplace_back("pale", std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    return out;
}

VertexSet non_block_neighbors(int u, const Clusters& clusters, const std::vector<int>& ancestors,
                              const DistanceMatrix& ext, const Tolerances& tol) {
    VertexSet delta(ancestors.begin(), ancestors.end());
    delta.erase(u);
    for (const auto& ic : clusters.internal)
        if (ic.i1.count(u))
            for (int a : ic.i1) delta.erase(a);
    for (auto it = delta.begin(); it != delta.end();) {
        bool behind = std::any_of(ancestors.begin(), ancestors.end(), [&](int b) {
            return b != u && b != *it && separated_by(u, b, *it, ext, tol.sep_tol);
        });
        it = behind ? delta.erase(it) : std::next(it);
    }
    std::vector<int> keep(delta.begin(), delta.end());
    for (int k : keep)
        for (int l : keep)
            if (k != l && delta.count(k) && delta.count(l) && separated_by(u, k, l, ext, tol.sep_tol)) delta.erase(l);
    return delta;
}

namespace {

// Bron-Kerbosch without pivoting; graphs here have at most a few dozen nodes.
void maximal_cliques(const std::map<int, VertexSet>& adj, VertexSet r, VertexSet p, VertexSet x,
                     std::vector<VertexSet>& out) {
    if (p.empty() && x.empty()) {
        out.push_back(r);
        return;
    }
    for (auto it = p.begin(); it != p.end();) {
        int v = *it;
        const auto& nv = adj.at(v);
        VertexSet r2 = r, p2, x2;
        r2.insert(v);
        for (int w : p)
            if (nv.count(w)) p2.insert(w);
        for (int w : x)
            if (nv.count(w)) x2.insert(w);
        maximal_cliques(adj, r2, p2, x2, out);
        it = p.erase(it);
        x.insert(v);
    }
}

}  // namespace

EdgeSetResult edge_set_ast(const PaleResult& pr, const Clusters& clusters, const AncestorCatalog& catalog,
                           const DistanceMatrix& ext, const Tolerances& tol, Diagnostics* diag) {
    auto t0 = std::chrono::steady_clock::now();
    const auto anc = catalog.ancestors();
    std::map<int, VertexSet> adj;
    for (int u : anc) adj[u];
    for (int u : anc)
        for (int v : non_block_neighbors(u, clusters, anc, ext, tol)) {
            adj[u].insert(v);
            adj[v].insert(u);
        }

    EdgeSetResult out;
    // A hidden ancestor without a leaf cluster has no vertex of its own: it is
    // the branch point of a block made only of cut vertices.
    for (int s : anc) {
        if (pr.designated.count(s)) continue;
        if (diag) ++diag->steiner_points;
        VertexSet block;
        for (int v : adj[s])
            if (pr.designated.count(v)) block.insert(pr.designated.at(v));
        if (block.size() >= 2) out.cut_blocks.push_back(block);
        for (int v : adj[s]) adj[v].erase(s);
        adj.erase(s);
    }

    std::vector<VertexSet> cliques;
    VertexSet all;
    for (const auto& [v, nb] : adj) all.insert(v);
    maximal_cliques(adj, {}, all, {}, cliques);
    for (const auto& c : cliques) {
        if (c.size() < 2) continue;
        VertexSet labels;
        for (int a : c) labels.insert(pr.designated.at(a));
        if (labels.size() == 2) {
            int a = *labels.begin(), b = *labels.rbegin();
            out.edges.push_back({{a}, {b}, a, b});
        } else {
            out.cut_blocks.push_back(labels);
        }
    }
    std::sort(out.edges.begin(), out.edges.end());
    std::sort(out.cut_blocks.begin(), out.cut_blocks.end());
    if (diag) diag->stage_ms.emplace_back("edge_set_ast", std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    return out;
}

}  // namespace nomad
