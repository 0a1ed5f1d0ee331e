#include "nomad/graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <string>

namespace nomad {

UndirectedGraph UndirectedGraph::with_vertices(int first, int last) {
    UndirectedGraph g;
    for (int v = first; v <= last; ++v) g.add_vertex(v);
    return g;
}

UndirectedGraph UndirectedGraph::from_edges(int p, const std::vector<Edge>& edges) {
    auto g = with_vertices(1, p);
    for (auto [u, v] : edges) {
        if (!g.has_vertex(u) || !g.has_vertex(v))
            throw GraphError("edge endpoint outside 1.." + std::to_string(p));
        g.add_edge(u, v);
    }
    return g;
}

void UndirectedGraph::add_vertex(int v) { adj_.try_emplace(v); }

void UndirectedGraph::add_edge(int u, int v) {
    if (u == v) throw GraphError("self-loop on vertex " + std::to_string(u));
    adj_[u].insert(v);
    adj_[v].insert(u);
}

void UndirectedGraph::remove_edge(int u, int v) {
    if (auto it = adj_.find(u); it != adj_.end()) it->second.erase(v);
    if (auto it = adj_.find(v); it != adj_.end()) it->second.erase(u);
}

bool UndirectedGraph::has_edge(int u, int v) const {
    auto it = adj_.find(u);
    return it != adj_.end() && it->second.count(v) != 0;
}

std::size_t UndirectedGraph::num_edges() const {
    std::size_t twice = 0;
    for (const auto& [v, nb] : adj_) twice += nb.size();
    return twice / 2;
}

std::vector<int> UndirectedGraph::vertices() const {
    std::vector<int> out;
    out.reserve(adj_.size());
    for (const auto& [v, nb] : adj_) out.push_back(v);
    return out;
}

VertexSet UndirectedGraph::vertex_set() const {
    VertexSet out;
    for (const auto& [v, nb] : adj_) out.insert(out.end(), v);
    return out;
}

std::vector<Edge> UndirectedGraph::edges() const {
    std::vector<Edge> out;
    for (const auto& [u, nb] : adj_)
        for (int v : nb)
            if (u < v) out.emplace_back(u, v);
    return out;
}

const VertexSet& UndirectedGraph::neighbors(int v) const {
    auto it = adj_.find(v);
    if (it == adj_.end()) throw GraphError("unknown vertex " + std::to_string(v));
    return it->second;
}

std::vector<VertexSet> UndirectedGraph::components(const VertexSet& removed) const {
    std::vector<VertexSet> out;
    VertexSet seen;
    for (const auto& [s, nb] : adj_) {
        if (removed.count(s) || seen.count(s)) continue;
        VertexSet comp{s};
        seen.insert(s);
        std::deque<int> queue{s};
        while (!queue.empty()) {
            int x = queue.front();
            queue.pop_front();
            for (int y : adj_.at(x)) {
                if (removed.count(y) || seen.count(y)) continue;
                seen.insert(y);
                comp.insert(y);
                queue.push_back(y);
            }
        }
        out.push_back(std::move(comp));
    }
    return out;
}

bool UndirectedGraph::connected() const { return components().size() <= 1; }

UndirectedGraph UndirectedGraph::induced(const VertexSet& keep) const {
    UndirectedGraph h;
    for (int v : keep) {
        if (!has_vertex(v)) continue;
        h.add_vertex(v);
        for (int w : adj_.at(v))
            if (keep.count(w)) h.add_edge(v, w);
    }
    return h;
}

UndirectedGraph UndirectedGraph::relabeled(const std::map<int, int>& perm) const {
    auto map = [&](int v) {
        auto it = perm.find(v);
        return it == perm.end() ? v : it->second;
    };
    UndirectedGraph h;
    for (const auto& [v, nb] : adj_) h.add_vertex(map(v));
    if (h.num_vertices() != num_vertices()) throw GraphError("relabeling is not a bijection");
    for (auto [u, v] : edges()) h.add_edge(map(u), map(v));
    return h;
}

Triple make_triple(int a, int b, int c) {
    Triple t{a, b, c};
    std::sort(t.begin(), t.end());
    if (t[0] == t[1] || t[1] == t[2]) throw GraphError("triple has repeated vertices");
    return t;
}

// Hopcroft-Tarjan with an explicit edge stack.
BlockDecomposition block_decomposition(const UndirectedGraph& g) {
    if (g.num_vertices() == 0) throw GraphError("empty graph");
    if (!g.connected()) throw GraphError("graph is not connected");

    std::map<int, int> disc, low;
    std::vector<Edge> stack;
    std::vector<VertexSet> blocks;
    VertexSet cuts;
    int timer = 0;

    std::function<void(int, int)> dfs = [&](int v, int parent) {
        disc[v] = low[v] = ++timer;
        int children = 0;
        for (int w : g.neighbors(v)) {
            if (!disc.count(w)) {
                ++children;
                stack.emplace_back(v, w);
                dfs(w, v);
                low[v] = std::min(low[v], low[w]);
                if (low[w] >= disc[v]) {
                    if (parent != 0 || children > 1) cuts.insert(v);
                    VertexSet block;
                    while (true) {
                        auto e = stack.back();
                        stack.pop_back();
                        block.insert(e.first);
                        block.insert(e.second);
                        if (e == Edge{v, w}) break;
                    }
                    blocks.push_back(std::move(block));
                }
            } else if (w != parent && disc[w] < disc[v]) {
                stack.emplace_back(v, w);
                low[v] = std::min(low[v], disc[w]);
            }
        }
    };
    // 0 is never a vertex label in practice; guard anyway.
    int root = g.vertices().front();
    if (g.has_vertex(0)) throw GraphError("vertex label 0 is reserved");
    dfs(root, 0);
    if (blocks.empty()) blocks.push_back({root});

    std::sort(blocks.begin(), blocks.end());
    BlockDecomposition out;
    out.blocks = blocks;
    out.cut_vertices = cuts;
    for (const auto& b : blocks)
        if (b.size() > 2) out.nontrivial_blocks.push_back(b);
    return out;
}

VertexSet ArticulatedSetTree::vertices() const {
    VertexSet out;
    for (const auto& p : parts) out.insert(p.begin(), p.end());
    return out;
}

VertexSet ArticulatedSetTree::articulation_points() const {
    VertexSet out;
    for (const auto& e : edges) {
        out.insert(e.art_a);
        out.insert(e.art_b);
    }
    return out;
}

std::string ArticulatedSetTree::validate() const {
    if (parts.empty()) return "no parts";
    std::size_t total = 0;
    for (const auto& p : parts) {
        if (p.empty()) return "empty part";
        total += p.size();
    }
    // Parts may share vertices only through shared-vertex edges, so count
    // distinct vertices against the tree edges instead of requiring disjointness.
    std::vector<int> parent(parts.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (const auto& e : edges) {
        if (e.a < 0 || e.b < 0 || e.a >= static_cast<int>(parts.size()) || e.b >= static_cast<int>(parts.size()) || e.a == e.b)
            return "edge references invalid part";
        if (!parts[e.a].count(e.art_a) || !parts[e.b].count(e.art_b))
            return "articulation vertex outside its part";
        int ra = find(e.a), rb = find(e.b);
        if (ra == rb) return "part graph has a cycle";
        parent[ra] = rb;
    }
    if (edges.size() + 1 != parts.size()) return "part graph is not connected";
    std::size_t shared = 0;
    for (const auto& e : edges)
        if (e.art_a == e.art_b) ++shared;
    if (vertices().size() + shared != total) return "parts overlap outside shared articulation vertices";
    return {};
}

namespace {

AstEdge make_ast_edge(int a, int b, int art_a, int art_b) {
    if (a > b) {
        std::swap(a, b);
        std::swap(art_a, art_b);
    }
    return {a, b, art_a, art_b};
}

}  // namespace

// Parts: non-trivial blocks plus singletons. Bridges connect the home parts
// of their endpoints; a vertex lying in several non-trivial blocks links each
// of them to its home part (the smallest block holding it), which keeps the
// part graph a tree.
ArticulatedSetTree build_ast(const UndirectedGraph& g) {
    auto bd = block_decomposition(g);
    ArticulatedSetTree ast;
    VertexSet covered;
    for (const auto& b : bd.nontrivial_blocks) {
        ast.parts.push_back(b);
        covered.insert(b.begin(), b.end());
    }
    for (int v : g.vertices())
        if (!covered.count(v)) ast.parts.push_back({v});
    std::sort(ast.parts.begin(), ast.parts.end());

    std::map<int, int> home;
    std::map<int, std::vector<int>> holders;
    for (std::size_t i = 0; i < ast.parts.size(); ++i)
        for (int v : ast.parts[i]) {
            holders[v].push_back(static_cast<int>(i));
            if (!home.count(v)) home[v] = static_cast<int>(i);
        }
    for (const auto& b : bd.blocks)
        if (b.size() == 2) {
            int u = *b.begin(), v = *b.rbegin();
            ast.edges.push_back(make_ast_edge(home[u], home[v], u, v));
        }
    for (const auto& [v, hs] : holders)
        for (std::size_t k = 1; k < hs.size(); ++k) ast.edges.push_back(make_ast_edge(hs[0], hs[k], v, v));
    std::sort(ast.edges.begin(), ast.edges.end());
    return ast;
}

UndirectedGraph representative_graph(const ArticulatedSetTree& ast) {
    UndirectedGraph g;
    for (const auto& p : ast.parts) {
        std::vector<int> vs(p.begin(), p.end());
        for (int v : vs) g.add_vertex(v);
        if (vs.size() == 2) g.add_edge(vs[0], vs[1]);
        if (vs.size() > 2)
            for (std::size_t i = 0; i < vs.size(); ++i) g.add_edge(vs[i], vs[(i + 1) % vs.size()]);
    }
    for (const auto& e : ast.edges)
        if (e.art_a != e.art_b) g.add_edge(e.art_a, e.art_b);
    return g;
}

bool is_separator(const UndirectedGraph& g, const VertexSet& s, const VertexSet& a, const VertexSet& b) {
    for (int x : a)
        if (s.count(x) || b.count(x)) throw GraphError("separator inputs overlap");
    for (int x : b)
        if (s.count(x)) throw GraphError("separator inputs overlap");
    VertexSet seen(a.begin(), a.end());
    std::deque<int> queue(a.begin(), a.end());
    while (!queue.empty()) {
        int x = queue.front();
        queue.pop_front();
        if (b.count(x)) return false;
        for (int y : g.neighbors(x))
            if (!s.count(y) && seen.insert(y).second) queue.push_back(y);
    }
    return true;
}

namespace {

// Every path between any two members of u meets s; members inside s count as met.
bool mutually_separates(const UndirectedGraph& g, const VertexSet& s, const Triple& u) {
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            if (s.count(u[i]) || s.count(u[j])) continue;
            if (!is_separator(g, s, {u[i]}, {u[j]})) return false;
        }
    return true;
}

void check_triple(const UndirectedGraph& g, const Triple& u) {
    if (u[0] == u[1] || u[1] == u[2] || u[0] == u[2]) throw GraphError("triple has repeated vertices");
    for (int x : u)
        if (!g.has_vertex(x)) throw GraphError("triple vertex " + std::to_string(x) + " not in graph");
}

}  // namespace

// Candidates are subsets of V \ u and the singletons {x}, x in u. Only the
// smallest successful size is kept, so a lone cut vertex is not shadowed by
// larger separators built from vertices further out.
std::set<VertexSet> minimal_mutual_separators(const UndirectedGraph& g, const Triple& u) {
    check_triple(g, u);
    if (g.num_vertices() > kMaxSeparatorVertices)
        throw GraphError("minimal_mutual_separators: graph exceeds size guard");
    std::set<VertexSet> out;
    for (int x : u)
        if (mutually_separates(g, {x}, u)) out.insert({x});
    std::vector<int> rest;
    for (int v : g.vertices())
        if (v != u[0] && v != u[1] && v != u[2]) rest.push_back(v);
    const std::size_t n = rest.size();
    for (std::size_t k = 1; k <= n; ++k) {
        if (!out.empty() && k > 1) break;
        // Gosper-style enumeration of k-subsets in lexicographic order.
        std::vector<std::size_t> idx(k);
        for (std::size_t i = 0; i < k; ++i) idx[i] = i;
        while (true) {
            VertexSet s;
            for (auto i : idx) s.insert(rest[i]);
            if (mutually_separates(g, s, u)) out.insert(std::move(s));
            std::size_t i = k;
            while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
            if (i == 0) break;
            ++idx[i - 1];
            for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
        if (!out.empty()) break;
    }
    return out;
}

std::optional<int> star_ancestor(const UndirectedGraph& g, const Triple& u) {
    check_triple(g, u);
    std::optional<int> found;
    for (int r : g.vertices()) {
        if (!mutually_separates(g, {r}, u)) continue;
        if (found) return std::nullopt;
        found = r;
    }
    return found;
}

UndirectedGraph joint_graph(const UndirectedGraph& g) {
    const int p = static_cast<int>(g.num_vertices());
    if (g.vertex_set() != UndirectedGraph::with_vertices(1, p).vertex_set())
        throw GraphError("joint_graph expects vertices 1..p");
    UndirectedGraph j = g;
    for (int i = 1; i <= p; ++i) j.add_edge(i, i + p);
    return j;
}

// a is an ancestor iff it separates some pair of observed copies, i.e. the
// copies are spread over at least three components of the joint graph minus a.
VertexSet joint_ancestors(const UndirectedGraph& g) {
    if (!g.connected()) throw GraphError("graph is not connected");
    auto j = joint_graph(g);
    const int p = static_cast<int>(g.num_vertices());
    VertexSet out;
    for (int a = 1; a <= p; ++a) {
        int with_copies = 0;
        for (const auto& comp : j.components({a}))
            if (std::any_of(comp.begin(), comp.end(), [&](int v) { return v > p; })) ++with_copies;
        if (with_copies >= 3) out.insert(a);
    }
    return out;
}

VertexSet leaves(const UndirectedGraph& g) {
    VertexSet out;
    for (int v : g.vertices())
        if (g.degree(v) == 1) out.insert(v);
    return out;
}

bool is_remote(const UndirectedGraph& g, const VertexSet& r) {
    VertexSet used;
    for (int v : r) {
        if (!g.has_vertex(v) || g.degree(v) != 1) return false;
        int nb = *g.neighbors(v).begin();
        if (r.count(nb) || !used.insert(nb).second) return false;
    }
    return true;
}

std::vector<VertexSet> remote_leaf_sets(const UndirectedGraph& g) {
    if (!g.connected()) throw GraphError("graph is not connected");
    auto ls = leaves(g);
    if (ls.size() > kMaxRemoteLeaves) throw GraphError("remote_leaf_sets: too many leaves");
    std::vector<int> lv(ls.begin(), ls.end());
    std::vector<VertexSet> out;
    for (unsigned long mask = 0; mask < (1UL << lv.size()); ++mask) {
        VertexSet r;
        for (std::size_t i = 0; i < lv.size(); ++i)
            if (mask >> i & 1UL) r.insert(lv[i]);
        if (is_remote(g, r)) out.push_back(std::move(r));
    }
    std::sort(out.begin(), out.end());
    return out;
}

UndirectedGraph apply_leaf_swap(const UndirectedGraph& g, const VertexSet& r) {
    if (!is_remote(g, r)) throw GraphError("leaf set is not remote");
    std::map<int, int> perm;
    for (int l : r) {
        int nb = *g.neighbors(l).begin();
        if (perm.count(nb) || perm.count(l)) throw GraphError("leaf set is not remote");
        perm[l] = nb;
        perm[nb] = l;
    }
    return g.relabeled(perm);
}

}  // namespace nomad
