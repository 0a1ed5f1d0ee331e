#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "nomad/ggm.hpp"
#include "nomad/graph.hpp"

namespace nomad {

class BudgetExceeded : public GraphError {
public:
    using GraphError::GraphError;
};

struct OracleBudget {
    std::size_t max_vertices = 12;  // of the base graph
    std::size_t max_paths = 1'000'000;
};

// Exhaustive counterparts of the graph-core operations.
bool oracle_is_separator(const UndirectedGraph& g, const VertexSet& s, const VertexSet& a, const VertexSet& b,
                         const OracleBudget& budget = {});
VertexSet oracle_cut_vertices(const UndirectedGraph& g, const OracleBudget& budget = {});
std::vector<VertexSet> oracle_blocks(const UndirectedGraph& g, const OracleBudget& budget = {});
std::set<VertexSet> oracle_families(const UndirectedGraph& g);
// Definition-level class test: some remote swap of g has h's block structure.
bool oracle_same_class(const UndirectedGraph& g, const UndirectedGraph& h, const OracleBudget& budget = {});

std::set<Triple> oracle_star_triplets(const UndirectedGraph& g, const OracleBudget& budget = {});
// Star ancestor of a triple of the joint graph, by exhaustive separator search.
std::optional<int> oracle_joint_star_ancestor(const UndirectedGraph& g, const Triple& u,
                                              const OracleBudget& budget = {});
// u and w hold copy ids (i + p). True iff both are star triplets of the
// joint graph with the same ancestor.
bool oracle_tia(const UndirectedGraph& g, const Triple& u, const Triple& w, const OracleBudget& budget = {});

// Where the three paths between members of u meet in the block-cut tree of
// the joint graph: either a cut vertex (star triplet) or a block together
// with the three block vertices the members hang from.
struct TripleCentre {
    int vertex = 0;
    VertexSet block;
    VertexSet roots;
    bool is_star() const { return vertex != 0; }
    bool operator==(const TripleCentre&) const = default;
};
TripleCentre oracle_triple_centre(const UndirectedGraph& g, const Triple& u);
// TIA's structural answer: the two triples have the same centre.
bool oracle_tia_centre(const UndirectedGraph& g, const Triple& u, const Triple& w);

double oracle_hidden_distance(const UndirectedGraph& g, const PrecisionMatrix& k, const Eigen::VectorXd& d,
                              int p_label, int q_label);

}  // namespace nomad
