#include "nomad/oracle.hpp"

#include <algorithm>
#include <bit>
#include <functional>

namespace nomad {

namespace {

void check_size(const UndirectedGraph& g, std::size_t limit, const char* op) {
    if (g.num_vertices() > limit)
        throw BudgetExceeded(std::string(op) + ": " + std::to_string(g.num_vertices()) + " vertices exceed budget " +
                             std::to_string(limit));
}

std::size_t count_components(const UndirectedGraph& g, const VertexSet& removed = {}) {
    VertexSet seen = removed;
    std::size_t n = 0;
    for (int s : g.vertices()) {
        if (seen.count(s)) continue;
        ++n;
        std::vector<int> stack{s};
        seen.insert(s);
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : g.neighbors(v))
                if (seen.insert(w).second) stack.push_back(w);
        }
    }
    return n;
}

// Biconnected in the block sense: an edge, or >= 3 vertices with no cut vertex.
bool biconnected(const UndirectedGraph& h) {
    auto vs = h.vertices();
    if (vs.size() == 2) return h.has_edge(vs[0], vs[1]);
    if (vs.size() < 3 || count_components(h) != 1) return false;
    return std::all_of(vs.begin(), vs.end(), [&](int v) { return count_components(h, {v}) == 1; });
}

// Singletons {v} that separate every pair of u; endpoints inside the
// separator count as blocked.
std::vector<int> singleton_separators(const UndirectedGraph& g, const Triple& u, const OracleBudget& budget) {
    std::vector<int> out;
    for (int v : g.vertices()) {
        bool all = true;
        for (int i = 0; i < 3 && all; ++i)
            for (int j = i + 1; j < 3 && all; ++j)
                all = oracle_is_separator(g, {v}, {u[i]}, {u[j]}, budget);
        if (all) out.push_back(v);
    }
    return out;
}

OracleBudget joint_budget(const OracleBudget& b) { return {2 * b.max_vertices, b.max_paths}; }

}  // namespace

bool oracle_is_separator(const UndirectedGraph& g, const VertexSet& s, const VertexSet& a, const VertexSet& b,
                         const OracleBudget& budget) {
    check_size(g, budget.max_vertices, "oracle_is_separator");
    std::size_t paths = 0;
    VertexSet on_path;
    // Walks every simple path out of `v`; true when one reaches b without
    // touching s.
    std::function<bool(int)> walk = [&](int v) {
        if (s.count(v)) return false;
        if (b.count(v)) return true;
        if (++paths > budget.max_paths) throw BudgetExceeded("oracle_is_separator: path budget exceeded");
        on_path.insert(v);
        for (int w : g.neighbors(v))
            if (!on_path.count(w) && walk(w)) return true;
        on_path.erase(v);
        return false;
    };
    for (int x : a) {
        if (!g.has_vertex(x)) throw GraphError("oracle_is_separator: unknown vertex");
        on_path.clear();
        if (walk(x)) return false;
    }
    return true;
}

VertexSet oracle_cut_vertices(const UndirectedGraph& g, const OracleBudget& budget) {
    check_size(g, budget.max_vertices, "oracle_cut_vertices");
    const std::size_t base = count_components(g);
    VertexSet out;
    for (int v : g.vertices())
        if (count_components(g, {v}) > base) out.insert(v);
    return out;
}

std::vector<VertexSet> oracle_blocks(const UndirectedGraph& g, const OracleBudget& budget) {
    check_size(g, budget.max_vertices, "oracle_blocks");
    auto vs = g.vertices();
    const std::size_t n = vs.size();
    std::vector<VertexSet> bic;
    for (unsigned long mask = 1; mask < (1UL << n); ++mask) {
        if (std::popcount(mask) < 2) continue;
        VertexSet s;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1UL) s.insert(vs[i]);
        if (biconnected(g.induced(s))) bic.push_back(std::move(s));
    }
    std::vector<VertexSet> out;
    for (const auto& s : bic) {
        bool maximal = std::none_of(bic.begin(), bic.end(), [&](const VertexSet& t) {
            return t.size() > s.size() && std::includes(t.begin(), t.end(), s.begin(), s.end());
        });
        if (maximal) out.push_back(s);
    }
    for (int v : vs)
        if (g.degree(v) == 0) out.push_back({v});
    std::sort(out.begin(), out.end());
    return out;
}

std::set<VertexSet> oracle_families(const UndirectedGraph& g) {
    std::set<VertexSet> out;
    for (int c : g.vertices()) {
        VertexSet f{c};
        for (int w : g.neighbors(c))
            if (g.degree(w) == 1) f.insert(w);
        if (f.size() == 1) continue;
        if (g.degree(c) == 1 && f.size() == 2 && g.num_vertices() != 2) continue;  // c is itself a leaf
        out.insert(f);
    }
    return out;
}

bool oracle_same_class(const UndirectedGraph& g, const UndirectedGraph& h, const OracleBudget& budget) {
    check_size(g, budget.max_vertices, "oracle_same_class");
    if (g.vertex_set() != h.vertex_set()) throw GraphError("oracle_same_class: vertex labels differ");
    if (!g.connected() || !h.connected()) return false;
    const auto target = oracle_blocks(h, budget);
    std::vector<int> lv;
    for (int v : g.vertices())
        if (g.degree(v) == 1) lv.push_back(v);
    for (unsigned long mask = 0; mask < (1UL << lv.size()); ++mask) {
        std::map<int, int> perm;
        bool ok = true;
        for (std::size_t i = 0; i < lv.size() && ok; ++i) {
            if (!(mask >> i & 1UL)) continue;
            int l = lv[i], nb = *g.neighbors(l).begin();
            ok = !perm.count(l) && !perm.count(nb);
            perm[l] = nb;
            perm[nb] = l;
        }
        if (ok && oracle_blocks(g.relabeled(perm), budget) == target) return true;
    }
    return false;
}

std::set<Triple> oracle_star_triplets(const UndirectedGraph& g, const OracleBudget& budget) {
    check_size(g, budget.max_vertices, "oracle_star_triplets");
    auto vs = g.vertices();
    std::set<Triple> out;
    for (std::size_t a = 0; a < vs.size(); ++a)
        for (std::size_t b = a + 1; b < vs.size(); ++b)
            for (std::size_t c = b + 1; c < vs.size(); ++c) {
                Triple t{vs[a], vs[b], vs[c]};
                if (singleton_separators(g, t, budget).size() == 1) out.insert(t);
            }
    return out;
}

std::optional<int> oracle_joint_star_ancestor(const UndirectedGraph& g, const Triple& u, const OracleBudget& budget) {
    check_size(g, budget.max_vertices, "oracle_joint_star_ancestor");
    const int p = static_cast<int>(g.num_vertices());
    for (int x : u)
        if (x <= p || x > 2 * p) throw GraphError("oracle_joint_star_ancestor: triple must hold copy ids");
    auto seps = singleton_separators(joint_graph(g), u, joint_budget(budget));
    if (seps.size() != 1) return std::nullopt;
    return seps.front();
}

bool oracle_tia(const UndirectedGraph& g, const Triple& u, const Triple& w, const OracleBudget& budget) {
    auto a = oracle_joint_star_ancestor(g, u, budget);
    if (!a) return false;
    auto b = oracle_joint_star_ancestor(g, w, budget);
    return b && *a == *b;
}

TripleCentre oracle_triple_centre(const UndirectedGraph& g, const Triple& u) {
    const auto j = joint_graph(g);
    const auto bd = block_decomposition(j);
    // Block-cut tree: blocks are nodes 0..B-1, cut vertex c is node B + rank.
    const int nb = static_cast<int>(bd.blocks.size());
    std::map<int, int> cut_node;
    for (int c : bd.cut_vertices) cut_node[c] = nb + static_cast<int>(cut_node.size());
    const int n = nb + static_cast<int>(cut_node.size());
    std::vector<std::vector<int>> adj(n);
    for (int b = 0; b < nb; ++b)
        for (int v : bd.blocks[b])
            if (cut_node.count(v)) {
                adj[b].push_back(cut_node[v]);
                adj[cut_node[v]].push_back(b);
            }
    auto node_of = [&](int v) {
        if (cut_node.count(v)) return cut_node[v];
        for (int b = 0; b < nb; ++b)
            if (bd.blocks[b].count(v)) return b;
        throw GraphError("oracle_triple_centre: unknown vertex");
    };
    auto parents_from = [&](int root) {
        std::vector<int> par(n, -2);
        par[root] = -1;
        std::vector<int> q{root};
        for (std::size_t i = 0; i < q.size(); ++i)
            for (int w : adj[q[i]])
                if (par[w] == -2) par[w] = q[i], q.push_back(w);
        return par;
    };
    auto path = [](const std::vector<int>& par, int to) {
        std::vector<int> out;
        for (int v = to; v != -1; v = par[v]) out.push_back(v);
        return out;
    };
    const int x = node_of(u[0]), y = node_of(u[1]), z = node_of(u[2]);
    auto px = parents_from(x);
    auto py = path(px, y), pz = path(px, z);
    // Median: the node where the paths x->y and x->z part.
    std::set<int> on_y(py.begin(), py.end());
    int median = x;
    for (int v : pz)
        if (on_y.count(v)) {
            median = v;
            break;
        }
    TripleCentre c;
    if (median >= nb) {
        for (auto& [v, id] : cut_node)
            if (id == median) c.vertex = v;
        return c;
    }
    c.block = bd.blocks[median];
    auto pm = parents_from(median);
    for (int m : u) {
        int node = node_of(m);
        if (node == median) {
            c.roots.insert(m);
            continue;
        }
        auto pth = path(pm, node);  // node ... median
        int cut = pth[pth.size() - 2];
        for (auto& [v, id] : cut_node)
            if (id == cut) c.roots.insert(v);
    }
    return c;
}

bool oracle_tia_centre(const UndirectedGraph& g, const Triple& u, const Triple& w) {
    return oracle_triple_centre(g, u) == oracle_triple_centre(g, w);
}

double oracle_hidden_distance(const UndirectedGraph& g, const PrecisionMatrix& k, const Eigen::VectorXd& d,
                              int p_label, int q_label) {
    const auto anc = joint_ancestors(g);
    if (!anc.count(p_label) || !anc.count(q_label))
        throw GraphError("oracle_hidden_distance: label is not an ancestor of the joint graph");
    if (p_label == q_label) return 0.0;
    return joint_distances(g, k, d).at(p_label, q_label);
}

}  // namespace nomad
