#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "nomad/graph.hpp"

namespace nomad {

// Distance used for rho == 0; large enough that no additivity test passes.
inline constexpr double kZeroCorrelationDistance = 1e12;

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Symmetric distance matrix indexed by vertex label.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::vector<int> labels);
    DistanceMatrix(std::vector<int> labels, Eigen::MatrixXd d);

    const std::vector<int>& labels() const { return labels_; }
    std::size_t size() const { return labels_.size(); }
    bool contains(int label) const { return index_.count(label) != 0; }
    std::size_t index(int label) const;

    double at(int a, int b) const { return d_(index(a), index(b)); }
    double idx(std::size_t i, std::size_t j) const { return d_(i, j); }
    void set(int a, int b, double v);
    const Eigen::MatrixXd& matrix() const { return d_; }

    // Adds labels with zero distances; existing entries are kept verbatim.
    DistanceMatrix extended(const std::vector<int>& extra) const;
    DistanceMatrix restricted(const std::vector<int>& keep) const;

private:
    std::vector<int> labels_;
    std::unordered_map<int, std::size_t> index_;
    Eigen::MatrixXd d_;
};

struct ModelMargins {
    double gamma = 0.0;  // min gap over non-separated triples
    double zeta = 0.0;   // min residual over non-star, non-sep triple pairs
    // zeta with residuals that vanish for every weight choice left out;
    // those come from triples sharing a block's three-point centre.
    double zeta_generic = 0.0;
    std::size_t structural_zeros = 0;
    double min_distance = 0.0;  // smallest distance between two vertices
    // Scale for finite-sample tolerances: min(gamma, zeta_generic,
    // min_distance). gamma and zeta are infinite on trees.
    double tolerance_scale() const;
};

struct PrecisionMatrix {
    std::vector<int> labels;  // vertex order of k
    Eigen::MatrixXd k;
    ModelMargins margins;
    int attempts = 0;
};

struct SynthesisOptions {
    double weight_lo = 0.2;
    double weight_hi = 0.5;
    double diag_margin = 0.1;
    double gamma_floor = 0.01;
    double zeta_floor = 0.01;
    // Above scan_limit vertices the floors drop to large_floor: minima over
    // millions of residuals on long cycles sit far below 0.01.
    std::size_t scan_limit = 12;
    double large_floor = 1e-8;
    int max_attempts = 200;
    bool check_margins = true;
};

// One draw of edge weights, no margin check.
PrecisionMatrix random_precision(const UndirectedGraph& g, std::mt19937_64& rng, const SynthesisOptions& opt = {});
// Rejection loop on gamma and zeta_generic floors; throws ModelError with
// the failing margin after max_attempts.
PrecisionMatrix synthesize_precision(const UndirectedGraph& g, std::uint64_t seed, const SynthesisOptions& opt = {});

Eigen::MatrixXd covariance(const PrecisionMatrix& k);
DistanceMatrix information_distances(const Eigen::MatrixXd& sigma, const std::vector<int>& labels = {});
Eigen::MatrixXd noisy_covariance(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& d);
// Distances over V (ids 1..p) and the noisy copies (ids p+1..2p).
DistanceMatrix joint_distances(const UndirectedGraph& g, const PrecisionMatrix& k, const Eigen::VectorXd& d);

Eigen::MatrixXd sample(const Eigen::MatrixXd& sigma_o, std::size_t n, std::uint64_t seed);
// Uncentred (1/n) Y^T Y.
Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& data);
DistanceMatrix empirical_distances(const Eigen::MatrixXd& data, const std::vector<int>& labels = {});

// Margins of a population distance matrix whose labels are g's vertices.
// With a reference matrix from independent weights on the same graph,
// residuals that are zero in both count as structural.
ModelMargins measure_margins(const UndirectedGraph& g, const DistanceMatrix& dist,
                             const DistanceMatrix* reference = nullptr);

double kappa(double rho_min, double eps_d);
std::uint64_t sample_bound(double rho_min, double eps_d, std::size_t p, double tau, double c);

}  // namespace nomad
