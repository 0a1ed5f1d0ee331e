#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nomad/ggm.hpp"
#include "nomad/graph.hpp"

namespace nomad {

class NomadError : public std::runtime_error {
public:
    NomadError(const std::string& stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(stage) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

struct Tolerances {
    double xi = 1e-9;       // TIA residual threshold
    double eps_d = 1e-9;    // mode group width
    double sep_tol = 1e-9;  // separation test width

    static Tolerances population() { return {}; }
    // eps_d = min(xi / 14, gamma), sep_tol = eps_d / 6.
    static Tolerances finite(double xi, double gamma);
};

double triplet_distance(int x, const Triple& u, const DistanceMatrix& d);
bool tia(const Triple& u, const Triple& w, const DistanceMatrix& d, const Tolerances& tol);
// |d_ab - d_am - d_mb| <= sep_tol, i.e. m separates a from b.
bool separated_by(int a, int m, int b, const DistanceMatrix& d, double sep_tol);

struct ModeResult {
    double value = 0.0;
    std::size_t group_size = 0;
};
ModeResult eps_mode(std::vector<double> values, double eps_d);

struct TripletCollection {
    std::vector<Triple> triples;  // lexicographic
    int label = 0;                // observed vertex id, or negative hidden label
    bool observed = false;
};

struct AncestorCatalog {
    std::vector<TripletCollection> collections;  // observed first, then hidden by label
    VertexSet a_obs;
    std::vector<int> a_hid;  // -1, -2, ...
    std::vector<int> ancestors() const;
    const TripletCollection& collection(int label) const;
};

struct HiddenPairMode {
    int p = 0, q = 0;
    ModeResult mode;
};

struct Diagnostics {
    std::vector<std::string> notes;
    std::vector<std::pair<std::string, double>> stage_ms;
    std::vector<std::size_t> collection_sizes;
    std::vector<HiddenPairMode> hidden_modes;
    std::size_t dropped_uncovered = 0;  // collections missing some observed vertex
    std::size_t steiner_points = 0;     // hidden ancestors with no leaf cluster
};

struct AncestorResult {
    AncestorCatalog catalog;
    DistanceMatrix ext;  // observed labels then hidden labels
};

AncestorResult identify_ancestors(const DistanceMatrix& dist, const Tolerances& tol, Diagnostics* diag = nullptr);

struct LeafCluster {
    int l1 = 0;             // ancestor label
    VertexSet l2;           // members
    std::optional<int> l3;  // designated articulation label
};

struct InternalCluster {
    VertexSet i1;  // ancestor labels, size > 1
    VertexSet i2;  // members
    VertexSet i3;  // designated labels of the hidden members of i1
};

struct Clusters {
    std::vector<LeafCluster> leaf;
    std::vector<InternalCluster> internal;
    const LeafCluster* leaf_of(int ancestor) const;
};

Clusters learn_clusters(const AncestorCatalog& catalog, const DistanceMatrix& ext, const Tolerances& tol,
                        Diagnostics* diag = nullptr);

struct NonCutResult {
    VertexSet c_cut;
    VertexSet c_noncut;
    std::optional<int> l3;
};

// Observed labels come from the distance matrix restricted to `observed`.
NonCutResult non_cut_test(const LeafCluster& l, const DistanceMatrix& ext, const std::vector<int>& observed,
                          const VertexSet& a_obs, const Tolerances& tol);

struct EdgeRecord {
    VertexSet part_a, part_b;
    int art_a = 0, art_b = 0;
    auto operator<=>(const EdgeRecord&) const = default;
};

struct PaleResult {
    std::vector<VertexSet> parts;
    VertexSet a_algo;                 // articulation labels (observed ids)
    std::map<int, int> designated;    // ancestor label -> articulation label
    std::vector<EdgeRecord> e_leaf;
    std::map<int, NonCutResult> noncut;  // raw test outcome per leaf-cluster ancestor
};

PaleResult pale(Clusters& clusters, const AncestorCatalog& catalog, const DistanceMatrix& ext,
                const std::vector<int>& observed, const Tolerances& tol, Diagnostics* diag = nullptr);

// Ancestors adjacent to u that are not reached through a shared internal
// block; labels are ancestor labels.
VertexSet non_block_neighbors(int u, const Clusters& clusters, const std::vector<int>& ancestors,
                              const DistanceMatrix& ext, const Tolerances& tol);

struct EdgeSetResult {
    std::vector<EdgeRecord> edges;
    // Blocks made only of cut vertices, found as cliques of neighbouring ancestors.
    std::vector<VertexSet> cut_blocks;
};

EdgeSetResult edge_set_ast(const PaleResult& pale, const Clusters& clusters, const AncestorCatalog& catalog,
                           const DistanceMatrix& ext, const Tolerances& tol, Diagnostics* diag = nullptr);

struct NomadOutput {
    ArticulatedSetTree ast;
    UndirectedGraph graph;  // representative graph the tree was built from
    AncestorCatalog catalog;
    Clusters clusters;
    std::map<int, NonCutResult> noncut;
    Diagnostics diagnostics;
};

NomadOutput run_nomad(const DistanceMatrix& dist, const Tolerances& tol = Tolerances::population());
NomadOutput run_nomad_samples(const Eigen::MatrixXd& data, const Tolerances& tol);

}  // namespace nomad
