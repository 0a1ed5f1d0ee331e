#include <algorithm>
#include <numeric>
#include <random>
#include <regex>

#include "nomad/experiments.hpp"

namespace nomad {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finaliser over seed + stream * golden ratio
    std::uint64_t z = seed + (stream + 1) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

UndirectedGraph gsyn_standin() {
    return UndirectedGraph::from_edges(10, {{1, 2}, {1, 3}, {1, 4}, {4, 5}, {5, 6}, {6, 7}, {7, 4}, {4, 6},
                                            {7, 8}, {8, 9}, {8, 10}});
}

UndirectedGraph ieee33_loops() {
    std::vector<Edge> e;
    for (int v = 1; v < 18; ++v) e.push_back({v, v + 1});
    e.insert(e.end(), {{2, 19}, {19, 20}, {20, 21}, {21, 22}, {3, 23}, {23, 24}, {24, 25}, {6, 26}});
    for (int v = 26; v < 33; ++v) e.push_back({v, v + 1});
    // standard tie switches, closed
    e.insert(e.end(), {{8, 21}, {9, 15}, {12, 22}, {18, 33}, {25, 29}});
    return UndirectedGraph::from_edges(33, e);
}

UndirectedGraph chain(int p) {
    if (p < 1) throw GraphError("chain: p must be positive");
    std::vector<Edge> e;
    for (int v = 1; v < p; ++v) e.push_back({v, v + 1});
    return UndirectedGraph::from_edges(p, e);
}

UndirectedGraph star(int p) {
    if (p < 1) throw GraphError("star: p must be positive");
    std::vector<Edge> e;
    for (int v = 2; v <= p; ++v) e.push_back({1, v});
    return UndirectedGraph::from_edges(p, e);
}

namespace {

UndirectedGraph shuffled(const UndirectedGraph& g, std::mt19937_64& rng) {
    auto vs = g.vertices();
    auto img = vs;
    std::shuffle(img.begin(), img.end(), rng);
    std::map<int, int> perm;
    for (std::size_t i = 0; i < vs.size(); ++i) perm[vs[i]] = img[i];
    return g.relabeled(perm);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

}  // namespace

UndirectedGraph random_block(int p, int blocks, std::uint64_t seed) {
    if (blocks < 0 || p < 1) throw GraphError("random_block: bad arguments");
    if (blocks > 0 && p < 3 + 2 * (blocks - 1)) throw GraphError("random_block: too few vertices for the blocks");
    std::mt19937_64 rng(seed);
    UndirectedGraph g;
    g.add_vertex(1);
    int used = 1;
    for (int b = 0; b < blocks; ++b) {
        const int reserve = 2 * (blocks - b - 1);
        const int room = p - used - reserve;  // new vertices this block may take
        // Share a vertex (size - 1 new) or hang the block off a bridge (size new).
        bool bridge = room >= 4 && uniform_int(rng, 0, 2) == 0;
        const int cap = bridge ? std::min(5, room - 1) : std::min(5, room + 1);
        const int size = uniform_int(rng, 3, std::max(3, cap));
        std::vector<int> cyc;
        int anchor = uniform_int(rng, 1, used);
        if (bridge) {
            g.add_edge(anchor, used + 1);
        } else {
            cyc.push_back(anchor);
        }
        while (static_cast<int>(cyc.size()) < size) cyc.push_back(++used);
        for (std::size_t i = 0; i < cyc.size(); ++i) g.add_edge(cyc[i], cyc[(i + 1) % cyc.size()]);
        if (size >= 4 && uniform_int(rng, 0, 1) == 1) g.add_edge(cyc[0], cyc[2]);
    }
    while (used < p) {
        int parent = uniform_int(rng, 1, used);
        g.add_edge(parent, ++used);
    }
    return shuffled(g, rng);
}

UndirectedGraph random_connected(int p, double extra, std::uint64_t seed) {
    if (p < 1) throw GraphError("random_connected: p must be positive");
    std::mt19937_64 rng(seed);
    auto g = UndirectedGraph::with_vertices(1, p);
    for (int v = 2; v <= p; ++v) g.add_edge(uniform_int(rng, 1, v - 1), v);
    std::bernoulli_distribution coin(extra);
    for (int u = 1; u <= p; ++u)
        for (int v = u + 1; v <= p; ++v)
            if (!g.has_edge(u, v) && coin(rng)) g.add_edge(u, v);
    return shuffled(g, rng);
}

UndirectedGraph fig1a_family(std::uint64_t seed) {
    std::vector<Edge> e{{1, 2}, {2, 3}, {3, 4}, {4, 1}, {1, 3},                 // block {1,2,3,4}
                        {4, 6},  {6, 14}, {14, 15}, {14, 16},                    // family {14,15,16}
                        {8, 10}, {10, 11}, {10, 12}, {10, 13}, {8, 7},          // family {10,..,13}
                        {9, 17}, {17, 18}, {18, 19}, {19, 17}, {17, 20}, {17, 21}};
    // First unnamed block joins 6 and 8 and holds vertex 5.
    int next = 22;
    e.insert(e.end(), {{6, 5}, {5, 8}, {8, next}, {next, 6}});
    const int b1 = next++;
    if (seed & 1) {
        e.insert(e.end(), {{5, next}, {next, b1}});
        ++next;
    }
    if (seed & 2) e.push_back({5, b1});
    // Second unnamed block joins 7 and 9.
    const int c1 = next++, c2 = next++;
    e.insert(e.end(), {{7, c1}, {c1, 9}, {9, c2}, {c2, 7}});
    if (seed & 4) e.push_back({c1, c2});
    return UndirectedGraph::from_edges(next - 1, e);
}

UndirectedGraph chain_triangle() {
    auto g = chain(8);
    g.add_edge(4, 9);
    g.add_edge(5, 9);
    g.add_edge(9, 10);
    return g;
}

UndirectedGraph generate_graph(const std::string& name, std::uint64_t seed) {
    if (name == "gsyn_standin") return gsyn_standin();
    if (name == "ieee33_loops") return ieee33_loops();
    if (name == "fig1a") return fig1a_family(seed);
    if (name == "chain_triangle") return chain_triangle();
    static const std::regex call(R"(^(\w+)\(\s*(\d+)\s*(?:,\s*([0-9.]+)\s*)?\)$)");
    std::smatch m;
    if (std::regex_match(name, m, call)) {
        const std::string fn = m[1];
        const int p = std::stoi(m[2]);
        const bool has2 = m[3].matched;
        if (fn == "chain" && !has2) return chain(p);
        if (fn == "star" && !has2) return star(p);
        if (fn == "random_block" && has2) return random_block(p, std::stoi(m[3]), seed);
        if (fn == "random_connected") return random_connected(p, has2 ? std::stod(m[3]) : 0.3, seed);
    }
    throw GraphError("unknown generator: " + name);
}

}  // namespace nomad
