#include "nomad/identifiability.hpp"

#include <algorithm>
#include <cmath>

#include "nomad/equivalence.hpp"

namespace nomad {

ConfounderSplit split_noise(const Eigen::MatrixXd& sigma_star, const Eigen::VectorXd& d, const UndirectedGraph& g,
                            const VertexSet& block) {
    const auto p = static_cast<Eigen::Index>(g.num_vertices());
    if (sigma_star.rows() != p || sigma_star.cols() != p || d.size() != p)
        throw GraphError("split_noise: dimensions do not match the graph");
    if (g.vertex_set() != UndirectedGraph::with_vertices(1, static_cast<int>(p)).vertex_set())
        throw GraphError("split_noise: vertices must be 1..p");
    if ((d.array() < 0.0).any()) throw GraphError("split_noise: negative noise");
    const auto bd = block_decomposition(g);
    if (std::find(bd.nontrivial_blocks.begin(), bd.nontrivial_blocks.end(), block) == bd.nontrivial_blocks.end())
        throw GraphError("split_noise: not a non-trivial block of g");

    ConfounderSplit s;
    s.sigma_star = sigma_star;
    s.d = d;
    s.block = block;
    s.d1 = Eigen::VectorXd::Zero(p);
    s.leaf_precondition = true;
    const auto ls = leaves(g);
    for (int v : block) {
        if (bd.cut_vertices.count(v)) {
            s.block_cut.insert(v);
            const auto& nb = g.neighbors(v);
            if (std::any_of(nb.begin(), nb.end(), [&](int w) { return ls.count(w) != 0; }))
                s.leaf_precondition = false;
        } else {
            s.d1(v - 1) = d(v - 1);
        }
    }
    s.d_q = d - s.d1;
    s.sigma_q = sigma_star;
    s.sigma_q.diagonal() += s.d1;
    return s;
}

UndirectedGraph support_graph(const Eigen::MatrixXd& k, double threshold) {
    const int p = static_cast<int>(k.rows());
    auto h = UndirectedGraph::with_vertices(1, p);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (std::abs(k(i, j)) > threshold) h.add_edge(i + 1, j + 1);
    return h;
}

ConfounderReport verify_confounder(const ConfounderSplit& split, const UndirectedGraph& g) {
    using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    const auto p = split.sigma_star.rows();
    ConfounderReport r;

    Eigen::MatrixXd lhs = split.sigma_q;
    lhs.diagonal() += split.d_q;
    Eigen::MatrixXd rhs = split.sigma_star;
    rhs.diagonal() += split.d;
    r.decomposition_error = (lhs - rhs).cwiseAbs().maxCoeff();

    auto invert = [](const Eigen::MatrixXd& m, bool& ok) {
        MatL ml = m.cast<long double>();
        Eigen::LLT<MatL> llt(ml);
        ok = llt.info() == Eigen::Success;
        MatL inv = llt.solve(MatL::Identity(ml.rows(), ml.cols()));
        return Eigen::MatrixXd((0.5L * (inv + inv.transpose())).cast<double>());
    };
    bool star_ok = false;
    r.k_star = invert(split.sigma_star, star_ok);
    if (!star_ok) throw GraphError("verify_confounder: sigma_star is not positive definite");
    r.k_q = invert(split.sigma_q, r.sigma_q_pd);
    if (!r.sigma_q_pd) return r;

    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j) {
            const bool inside = split.block.count(static_cast<int>(i) + 1) && split.block.count(static_cast<int>(j) + 1);
            if (!inside) r.outside_deviation = std::max(r.outside_deviation, std::abs(r.k_q(i, j) - r.k_star(i, j)));
        }
    r.h = support_graph(r.k_q);
    r.h_in_class = same_equivalence_class(g, r.h);
    r.h_differs = !(r.h == g);
    return r;
}

}  // namespace nomad
