#pragma once

#include <map>
#include <set>

#include "nomad/graph.hpp"

namespace nomad {

struct EquivalenceSignature {
    std::set<VertexSet> families;  // non-leaf centre plus its leaf neighbours
    VertexSet noncut_union;        // non-cut vertices of non-trivial blocks
    VertexSet k_set;               // cut vertices with no leaf neighbour
    std::map<int, VertexSet> art_neighbors;
    bool operator==(const EquivalenceSignature&) const = default;
};

EquivalenceSignature equivalence_signature(const UndirectedGraph& g);

struct EquivalenceReport {
    bool families = false;
    bool noncut = false;
    bool k_set = false;
    // Neighbour conditions on K, checked in h for every k of g.
    bool neighbor_conditions = false;
    // Exact class membership (canonical form comparison).
    bool equivalent = false;
};

EquivalenceReport compare_equivalence(const UndirectedGraph& g, const UndirectedGraph& h);
bool same_equivalence_class(const UndirectedGraph& g, const UndirectedGraph& h);
bool same_equivalence_class(const UndirectedGraph& g, const ArticulatedSetTree& ast);

}  // namespace nomad
