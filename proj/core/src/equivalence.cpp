#include "nomad/equivalence.hpp"

#include <algorithm>

namespace nomad {

namespace {

std::set<VertexSet> families_of(const UndirectedGraph& g) {
    std::set<VertexSet> out;
    if (g.num_vertices() == 2 && g.num_edges() == 1) {
        out.insert(g.vertex_set());
        return out;
    }
    std::map<int, VertexSet> by_centre;
    for (int l : leaves(g)) {
        int c = *g.neighbors(l).begin();
        by_centre[c].insert(c);
        by_centre[c].insert(l);
    }
    for (auto& [c, f] : by_centre) out.insert(f);
    return out;
}

// Blocks and non-pendant bridges with every family collapsed to one token.
// Leaf swaps permute labels inside a family and block rewiring keeps block
// vertex sets, so two graphs are equivalent iff these agree.
struct Canonical {
    std::set<VertexSet> blocks;
    std::set<Edge> bridges;
    bool operator==(const Canonical&) const = default;
};

Canonical canonical_form(const UndirectedGraph& g, const std::set<VertexSet>& families) {
    std::map<int, int> token;
    int next = -1;
    for (const auto& f : families) {
        for (int v : f) token[v] = next;
        --next;
    }
    auto tok = [&](int v) {
        auto it = token.find(v);
        return it == token.end() ? v : it->second;
    };
    auto ls = leaves(g);
    Canonical c;
    for (const auto& b : block_decomposition(g).blocks) {
        if (b.size() > 2) {
            VertexSet t;
            for (int v : b) t.insert(tok(v));
            c.blocks.insert(t);
        } else if (b.size() == 2) {
            int u = *b.begin(), v = *b.rbegin();
            if (ls.count(u) || ls.count(v)) continue;
            int a = tok(u), bb = tok(v);
            c.bridges.insert({std::min(a, bb), std::max(a, bb)});
        }
    }
    return c;
}

}  // namespace

EquivalenceSignature equivalence_signature(const UndirectedGraph& g) {
    auto bd = block_decomposition(g);
    EquivalenceSignature sig;
    sig.families = families_of(g);
    for (const auto& b : bd.nontrivial_blocks)
        for (int v : b)
            if (!bd.cut_vertices.count(v)) sig.noncut_union.insert(v);
    auto ls = leaves(g);
    for (int k : bd.cut_vertices) {
        const auto& nb = g.neighbors(k);
        if (std::none_of(nb.begin(), nb.end(), [&](int v) { return ls.count(v) != 0; })) {
            sig.k_set.insert(k);
            sig.art_neighbors[k] = nb;
        }
    }
    return sig;
}

EquivalenceReport compare_equivalence(const UndirectedGraph& g, const UndirectedGraph& h) {
    if (g.vertex_set() != h.vertex_set()) throw GraphError("graphs use different vertex labels");
    EquivalenceReport rep;
    if (!h.connected()) return rep;
    auto sg = equivalence_signature(g);
    auto sh = equivalence_signature(h);
    rep.families = sg.families == sh.families;
    rep.noncut = sg.noncut_union == sh.noncut_union;
    rep.k_set = sg.k_set == sh.k_set;

    rep.neighbor_conditions = true;
    for (const auto& [k, nb] : sg.art_neighbors)
        for (int v : nb) {
            if (sg.k_set.count(v)) {
                rep.neighbor_conditions &= h.has_edge(k, v);
                continue;
            }
            for (const auto& f : sg.families)
                if (f.count(v))
                    rep.neighbor_conditions &= std::any_of(f.begin(), f.end(), [&](int x) { return h.has_edge(k, x); });
        }

    rep.equivalent = rep.families && rep.noncut && rep.k_set &&
                     canonical_form(g, sg.families) == canonical_form(h, sh.families);
    return rep;
}

bool same_equivalence_class(const UndirectedGraph& g, const UndirectedGraph& h) {
    return compare_equivalence(g, h).equivalent;
}

bool same_equivalence_class(const UndirectedGraph& g, const ArticulatedSetTree& ast) {
    if (ast.vertices() != g.vertex_set()) throw GraphError("tree uses different vertex labels");
    if (!ast.validate().empty()) return false;
    return same_equivalence_class(g, representative_graph(ast));
}

}  // namespace nomad
