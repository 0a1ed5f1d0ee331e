#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nomad/ggm.hpp"
#include "nomad/graph.hpp"
#include "nomad/nomad.hpp"

namespace nomad {

// Generators. Fixed topologies ignore the seed.
UndirectedGraph gsyn_standin();
UndirectedGraph ieee33_loops();
UndirectedGraph chain(int p);
UndirectedGraph star(int p);
// Exactly `blocks` non-trivial blocks (cycles of 3 to 5 vertices, some with a
// chord) joined by shared vertices or bridges, remaining vertices on trees.
UndirectedGraph random_block(int p, int blocks, std::uint64_t seed);
// Random spanning tree plus each remaining pair with probability `extra`.
UndirectedGraph random_connected(int p, double extra, std::uint64_t seed);
// Topology family with the described features of the introduction's figure:
// varies in the size and chords of its two unnamed blocks.
UndirectedGraph fig1a_family(std::uint64_t seed);
// chain(8) plus vertex 9 on the edge 4-5 (triangle) and leaf 10 on 9.
UndirectedGraph chain_triangle();

// Names: gsyn_standin, ieee33_loops, fig1a, chain_triangle, chain(p),
// star(p), random_block(p,b), random_connected(p). Throws on unknown names.
UndirectedGraph generate_graph(const std::string& name, std::uint64_t seed);

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

struct ExperimentConfig {
    std::string graph = "gsyn_standin";  // generator name
    std::string graph_file;               // JSON graph; overrides `graph` when set
    double noise_max = 1.0;
    std::optional<std::size_t> n_samples;  // nullopt: population distances
    int trials = 15;
    std::uint64_t seed = 1;
    // Population mode defaults to 1e-9 everywhere. In finite mode unset
    // values follow xi = margins.tolerance_scale() / 4 and Tolerances::finite.
    std::optional<double> xi;
    std::optional<double> eps_d;
    std::optional<double> sep_tol;
    std::string output_dir = ".";
    SynthesisOptions synthesis;
    int threads = 0;     // 0: hardware concurrency
    bool timing = true;  // false writes runtime_ms = 0 for byte-stable output

    void validate() const;
};

struct TrialRecord {
    std::uint64_t trial_seed = 0;
    double noise_max = 0.0;
    std::size_t n_samples = 0;  // 0 for population
    int equivalence_pass = 0;
    double families_recovered = 0.0;
    double noncut_recovered = 0.0;
    double k_recovered = 0.0;
    double runtime_ms = 0.0;
    std::string error;  // failure stage and message; not a CSV column
};

// Signature agreement between truth g and an estimate h. Fractions are
// Jaccard indices; two empty sets agree fully.
TrialRecord score_graph(const UndirectedGraph& g, const UndirectedGraph& h);

UndirectedGraph load_graph_source(const ExperimentConfig& cfg, std::uint64_t trial_seed);
TrialRecord run_trial(const ExperimentConfig& cfg, int trial);
// One trial of the protocol on a given graph: synthesize, draw noise,
// compute distances, recover, score.
TrialRecord run_trial_graph(const ExperimentConfig& cfg, const UndirectedGraph& g, std::uint64_t trial_seed);
// Trials run on a worker pool; rows reach `csv` in trial order.
std::vector<TrialRecord> run_sweep(const ExperimentConfig& cfg, std::ostream* csv = nullptr);

// Adjacency given as a graph JSON file or a whitespace/comma separated 0/1
// matrix over vertices 1..p.
TrialRecord score_external(const std::string& adjacency_path, const UndirectedGraph& g);

}  // namespace nomad
