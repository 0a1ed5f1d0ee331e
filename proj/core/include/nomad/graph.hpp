#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nomad {

using VertexSet = std::set<int>;
using Triple = std::array<int, 3>;
using Edge = std::pair<int, int>;

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Simple undirected graph over integer labels. Observed ids are 1..p by
// convention; the noisy copy of i is i + p in joint graphs.
class UndirectedGraph {
public:
    UndirectedGraph() = default;

    static UndirectedGraph with_vertices(int first, int last);
    // Vertices 1..p plus the given edges.
    static UndirectedGraph from_edges(int p, const std::vector<Edge>& edges);

    void add_vertex(int v);
    void add_edge(int u, int v);
    void remove_edge(int u, int v);

    bool has_vertex(int v) const { return adj_.count(v) != 0; }
    bool has_edge(int u, int v) const;
    std::size_t num_vertices() const { return adj_.size(); }
    std::size_t num_edges() const;
    std::vector<int> vertices() const;
    VertexSet vertex_set() const;
    // Sorted (u < v) edge list.
    std::vector<Edge> edges() const;
    const VertexSet& neighbors(int v) const;
    std::size_t degree(int v) const { return neighbors(v).size(); }

    bool connected() const;
    // Connected components of g - removed, each as a vertex set.
    std::vector<VertexSet> components(const VertexSet& removed = {}) const;
    UndirectedGraph induced(const VertexSet& keep) const;
    // Relabel vertices through perm; labels not in perm stay put.
    UndirectedGraph relabeled(const std::map<int, int>& perm) const;

    bool operator==(const UndirectedGraph& o) const = default;

private:
    std::map<int, VertexSet> adj_;
};

struct BlockDecomposition {
    std::vector<VertexSet> blocks;  // sorted lexicographically
    VertexSet cut_vertices;
    std::vector<VertexSet> nontrivial_blocks;
};

BlockDecomposition block_decomposition(const UndirectedGraph& g);

struct AstEdge {
    int a = 0, b = 0;            // part indices, a < b
    int art_a = 0, art_b = 0;    // articulation vertex inside parts[a] / parts[b]
    auto operator<=>(const AstEdge&) const = default;
};

struct ArticulatedSetTree {
    std::vector<VertexSet> parts;  // sorted lexicographically
    std::vector<AstEdge> edges;    // sorted

    VertexSet vertices() const;
    VertexSet articulation_points() const;
    // Empty string when the part graph is a tree covering every vertex once.
    std::string validate() const;
    bool operator==(const ArticulatedSetTree& o) const = default;
};

ArticulatedSetTree build_ast(const UndirectedGraph& g);
// A graph whose AST is `ast`: each multi-vertex part becomes a cycle and
// every tree edge with distinct articulation vertices becomes a graph edge.
UndirectedGraph representative_graph(const ArticulatedSetTree& ast);

bool is_separator(const UndirectedGraph& g, const VertexSet& s, const VertexSet& a, const VertexSet& b);
// Minimum-cardinality mutual separators of u. Exhaustive; refuses graphs
// above kMaxSeparatorVertices.
inline constexpr std::size_t kMaxSeparatorVertices = 24;
std::set<VertexSet> minimal_mutual_separators(const UndirectedGraph& g, const Triple& u);
// Unique single-vertex mutual separator of u, if any. Agrees with the
// exhaustive search but runs in O(p * (V + E)).
std::optional<int> star_ancestor(const UndirectedGraph& g, const Triple& u);

UndirectedGraph joint_graph(const UndirectedGraph& g);
VertexSet joint_ancestors(const UndirectedGraph& g);

VertexSet leaves(const UndirectedGraph& g);
inline constexpr std::size_t kMaxRemoteLeaves = 20;
std::vector<VertexSet> remote_leaf_sets(const UndirectedGraph& g);
bool is_remote(const UndirectedGraph& g, const VertexSet& r);
UndirectedGraph apply_leaf_swap(const UndirectedGraph& g, const VertexSet& r);

Triple make_triple(int a, int b, int c);  // sorted, rejects repeats

}  // namespace nomad
