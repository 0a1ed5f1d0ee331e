#pragma once

#include <Eigen/Dense>

#include "nomad/graph.hpp"

namespace nomad {

// Sigma* + diag(d) rewritten as sigma_q + diag(d_q), where the interior
// noise of one non-trivial block moves into the covariance. Index i of every
// matrix is vertex i + 1.
struct ConfounderSplit {
    Eigen::MatrixXd sigma_star;
    Eigen::VectorXd d;
    Eigen::MatrixXd sigma_q;
    Eigen::VectorXd d_q;  // D(2)
    Eigen::VectorXd d1;   // block-interior noise
    VertexSet block;
    VertexSet block_cut;  // cut vertices of g inside the block
    // Cut vertices of the block have no leaf neighbours. Reported only:
    // the split itself does not depend on it.
    bool leaf_precondition = false;
};

ConfounderSplit split_noise(const Eigen::MatrixXd& sigma_star, const Eigen::VectorXd& d, const UndirectedGraph& g,
                            const VertexSet& block);

inline constexpr double kSparsityThreshold = 1e-9;

struct ConfounderReport {
    bool sigma_q_pd = false;
    double decomposition_error = 0.0;  // max |sigma_q + diag(d_q) - sigma_star - diag(d)|
    double outside_deviation = 0.0;    // max |K_q - K*| over entries not inside the block
    Eigen::MatrixXd k_star;
    Eigen::MatrixXd k_q;
    UndirectedGraph h;  // support of K_q above kSparsityThreshold
    bool h_in_class = false;
    bool h_differs = false;
};

ConfounderReport verify_confounder(const ConfounderSplit& split, const UndirectedGraph& g);

// Support graph of a precision matrix over vertices 1..p.
UndirectedGraph support_graph(const Eigen::MatrixXd& k, double threshold = kSparsityThreshold);

}  // namespace nomad
