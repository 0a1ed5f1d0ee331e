#include "nomad/ggm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace nomad {

DistanceMatrix::DistanceMatrix(std::vector<int> labels)
    : DistanceMatrix(labels, Eigen::MatrixXd::Zero(labels.size(), labels.size())) {}

DistanceMatrix::DistanceMatrix(std::vector<int> labels, Eigen::MatrixXd d) : labels_(std::move(labels)), d_(std::move(d)) {
    if (d_.rows() != static_cast<Eigen::Index>(labels_.size()) || d_.cols() != d_.rows())
        throw ModelError("distance matrix shape does not match labels");
    for (std::size_t i = 0; i < labels_.size(); ++i)
        if (!index_.emplace(labels_[i], i).second) throw ModelError("duplicate distance label");
}

std::size_t DistanceMatrix::index(int label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw ModelError("no distance entry for label " + std::to_string(label));
    return it->second;
}

void DistanceMatrix::set(int a, int b, double v) {
    auto i = index(a), j = index(b);
    d_(i, j) = v;
    d_(j, i) = v;
}

DistanceMatrix DistanceMatrix::extended(const std::vector<int>& extra) const {
    auto labels = labels_;
    labels.insert(labels.end(), extra.begin(), extra.end());
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(labels.size(), labels.size());
    d.topLeftCorner(d_.rows(), d_.cols()) = d_;
    return {std::move(labels), std::move(d)};
}

DistanceMatrix DistanceMatrix::restricted(const std::vector<int>& keep) const {
    Eigen::MatrixXd d(keep.size(), keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i)
        for (std::size_t j = 0; j < keep.size(); ++j) d(i, j) = at(keep[i], keep[j]);
    return {keep, std::move(d)};
}

namespace {

std::vector<int> default_labels(Eigen::Index p) {
    std::vector<int> out(p);
    std::iota(out.begin(), out.end(), 1);
    return out;
}

// No definiteness check: the joint covariance is singular whenever some
// D_ii is zero, yet its correlations are well defined.
DistanceMatrix distances_from_covariance(const Eigen::MatrixXd& s, std::vector<int> labels) {
    const auto p = s.rows();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        if (!(s(i, i) > 0.0)) throw ModelError("zero variance at index " + std::to_string(i));
        for (Eigen::Index j = i + 1; j < p; ++j) {
            double rho = std::min(1.0, std::abs(s(i, j)) / std::sqrt(s(i, i) * s(j, j)));
            double v = rho == 0.0 ? kZeroCorrelationDistance : -std::log(rho);
            d(i, j) = d(j, i) = v;
        }
    }
    return {std::move(labels), std::move(d)};
}

}  // namespace

PrecisionMatrix random_precision(const UndirectedGraph& g, std::mt19937_64& rng, const SynthesisOptions& opt) {
    if (!(opt.weight_lo > 0.0) || opt.weight_hi < opt.weight_lo) throw ModelError("weight range must exclude 0");
    PrecisionMatrix out;
    out.labels = g.vertices();
    const auto p = static_cast<Eigen::Index>(out.labels.size());
    std::unordered_map<int, Eigen::Index> pos;
    for (Eigen::Index i = 0; i < p; ++i) pos[out.labels[i]] = i;
    std::uniform_real_distribution<double> mag(opt.weight_lo, opt.weight_hi);
    std::bernoulli_distribution sign(0.5);
    out.k = Eigen::MatrixXd::Zero(p, p);
    for (auto [u, v] : g.edges()) {
        double w = mag(rng);
        if (sign(rng)) w = -w;
        out.k(pos[u], pos[v]) = out.k(pos[v], pos[u]) = w;
    }
    for (Eigen::Index i = 0; i < p; ++i) out.k(i, i) = out.k.row(i).cwiseAbs().sum() + opt.diag_margin;
    return out;
}

PrecisionMatrix synthesize_precision(const UndirectedGraph& g, std::uint64_t seed, const SynthesisOptions& opt) {
    if (!g.connected()) throw GraphError("graph is not connected");
    std::mt19937_64 rng(seed);
    if (!opt.check_margins) {
        auto k = random_precision(g, rng, opt);
        k.attempts = 1;
        return k;
    }
    std::mt19937_64 ref_rng(seed ^ 0x9e3779b97f4a7c15ULL);
    auto ref = random_precision(g, ref_rng, opt);
    auto ref_dist = information_distances(covariance(ref), ref.labels);
    const bool large = g.num_vertices() > opt.scan_limit;
    const double gamma_floor = large ? opt.large_floor : opt.gamma_floor;
    const double zeta_floor = large ? opt.large_floor : opt.zeta_floor;
    ModelMargins last;
    for (int attempt = 1; attempt <= opt.max_attempts; ++attempt) {
        auto k = random_precision(g, rng, opt);
        k.margins = measure_margins(g, information_distances(covariance(k), k.labels), &ref_dist);
        k.attempts = attempt;
        if (k.margins.gamma >= gamma_floor && k.margins.zeta_generic >= zeta_floor) return k;
        last = k.margins;
    }
    throw ModelError("margin floors not met after " + std::to_string(opt.max_attempts) +
                     " attempts (last gamma=" + std::to_string(last.gamma) +
                     ", zeta=" + std::to_string(last.zeta_generic) + ")");
}

Eigen::MatrixXd covariance(const PrecisionMatrix& k) {
    using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    MatL kl = k.k.cast<long double>();
    Eigen::LLT<MatL> llt(kl);
    if (llt.info() != Eigen::Success) throw ModelError("precision matrix is not positive definite");
    MatL s = llt.solve(MatL::Identity(kl.rows(), kl.cols()));
    s = (0.5L * (s + s.transpose())).eval();
    return s.cast<double>();
}

DistanceMatrix information_distances(const Eigen::MatrixXd& sigma, const std::vector<int>& labels) {
    if (sigma.rows() != sigma.cols()) throw ModelError("covariance is not square");
    if (Eigen::LLT<Eigen::MatrixXd>(sigma).info() != Eigen::Success)
        throw ModelError("covariance is not positive definite");
    return distances_from_covariance(sigma, labels.empty() ? default_labels(sigma.rows()) : labels);
}

Eigen::MatrixXd noisy_covariance(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& d) {
    if (d.size() != sigma.rows()) throw ModelError("noise dimension mismatch");
    if ((d.array() < 0.0).any()) throw ModelError("negative noise variance");
    Eigen::MatrixXd out = sigma;
    out.diagonal() += d;
    return out;
}

DistanceMatrix joint_distances(const UndirectedGraph& g, const PrecisionMatrix& k, const Eigen::VectorXd& d) {
    const auto p = static_cast<Eigen::Index>(g.num_vertices());
    if (k.k.rows() != p || d.size() != p) throw ModelError("joint_distances: dimension mismatch");
    if (k.labels != default_labels(p)) throw ModelError("joint_distances expects labels 1..p");
    auto s = covariance(k);
    Eigen::MatrixXd j(2 * p, 2 * p);
    j << s, s, s, noisy_covariance(s, d);
    return distances_from_covariance(j, default_labels(2 * p));
}

Eigen::MatrixXd sample(const Eigen::MatrixXd& sigma_o, std::size_t n, std::uint64_t seed) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma_o);
    if (llt.info() != Eigen::Success) throw ModelError("covariance is not positive definite");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd z(static_cast<Eigen::Index>(n), sigma_o.rows());
    for (Eigen::Index r = 0; r < z.rows(); ++r)
        for (Eigen::Index c = 0; c < z.cols(); ++c) z(r, c) = normal(rng);
    return z * llt.matrixL().transpose();
}

Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& data) {
    if (data.rows() < 2) throw ModelError("need at least two samples");
    return (data.transpose() * data) / static_cast<double>(data.rows());
}

DistanceMatrix empirical_distances(const Eigen::MatrixXd& data, const std::vector<int>& labels) {
    auto s = empirical_covariance(data);
    return distances_from_covariance(s, labels.empty() ? default_labels(s.rows()) : labels);
}

namespace {

struct TripleInfo {
    Triple t;
    std::array<std::size_t, 3> ix;  // positions in the distance matrix
    std::array<double, 3> dx;       // d_x^U per member
};

}  // namespace

ModelMargins measure_margins(const UndirectedGraph& g, const DistanceMatrix& dist, const DistanceMatrix* reference) {
    const auto vs = g.vertices();
    const std::size_t p = vs.size();
    // comp[r][i]: component id of vs[i] in g - vs[r]; -1 for vs[r] itself.
    std::vector<std::vector<int>> comp(p, std::vector<int>(p, -1));
    std::unordered_map<int, std::size_t> pos;
    for (std::size_t i = 0; i < p; ++i) pos[vs[i]] = i;
    for (std::size_t r = 0; r < p; ++r) {
        int id = 0;
        for (const auto& c : g.components({vs[r]})) {
            for (int v : c) comp[r][pos[v]] = id;
            ++id;
        }
    }
    auto separates = [&](std::size_t m, std::size_t a, std::size_t b) { return comp[m][a] != comp[m][b]; };

    std::vector<std::size_t> di(p);
    for (std::size_t i = 0; i < p; ++i) di[i] = dist.index(vs[i]);
    auto D = [&](std::size_t a, std::size_t b) { return dist.idx(di[a], di[b]); };

    ModelMargins out;
    out.gamma = out.zeta = out.zeta_generic = out.min_distance = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a + 1; b < p; ++b) out.min_distance = std::min(out.min_distance, D(a, b));
    std::vector<TripleInfo> open;
    std::vector<TripleInfo> open_ref;
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a + 1; b < p; ++b)
            for (std::size_t c = b + 1; c < p; ++c) {
                const std::array<std::size_t, 3> t{a, b, c};
                bool sep = false;
                for (int m = 0; m < 3; ++m) {
                    auto x = t[(m + 1) % 3], y = t[(m + 2) % 3];
                    if (separates(t[m], x, y)) {
                        sep = true;
                        continue;
                    }
                    out.gamma = std::min(out.gamma, std::abs(D(x, y) - D(x, t[m]) - D(t[m], y)));
                }
                if (sep) continue;
                int singles = 0;
                for (std::size_t r = 0; r < p && singles < 2; ++r) {
                    if (r == a || r == b || r == c) continue;
                    if (separates(r, a, b) && separates(r, a, c) && separates(r, b, c)) ++singles;
                }
                if (singles == 1) continue;
                auto info = [&](auto&& d) {
                    TripleInfo ti{{vs[a], vs[b], vs[c]}, t, {}};
                    ti.dx[0] = 0.5 * (d(a, b) + d(a, c) - d(b, c));
                    ti.dx[1] = 0.5 * (d(a, b) + d(b, c) - d(a, c));
                    ti.dx[2] = 0.5 * (d(a, c) + d(b, c) - d(a, b));
                    return ti;
                };
                open.push_back(info(D));
                if (reference) {
                    auto R = [&](std::size_t u, std::size_t v) { return reference->at(vs[u], vs[v]); };
                    open_ref.push_back(info(R));
                }
            }

    for (std::size_t u = 0; u < open.size(); ++u)
        for (std::size_t w = u + 1; w < open.size(); ++w)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    auto x = open[u].ix[i], y = open[w].ix[j];
                    double dxy = x == y ? 0.0 : D(x, y);
                    double res = std::abs(open[u].dx[i] + open[w].dx[j] - dxy);
                    out.zeta = std::min(out.zeta, res);
                    if (reference) {
                        double rxy = x == y ? 0.0 : reference->at(vs[x], vs[y]);
                        if (std::abs(open_ref[u].dx[i] + open_ref[w].dx[j] - rxy) < 1e-9) {
                            ++out.structural_zeros;
                            continue;
                        }
                    }
                    out.zeta_generic = std::min(out.zeta_generic, res);
                }
    if (!reference) out.zeta_generic = out.zeta;
    return out;
}

double ModelMargins::tolerance_scale() const { return std::min({gamma, zeta_generic, min_distance}); }

double kappa(double rho_min, double eps_d) {
    if (!(rho_min > 0.0 && rho_min <= 1.0) || !(eps_d > 0.0)) throw ModelError("kappa: parameter out of domain");
    double q = rho_min * rho_min * eps_d * eps_d;
    if (q >= 16.0) throw ModelError("kappa: rho_min * eps_d must be below 4");
    return std::log((16.0 + q) / (16.0 - q));
}

std::uint64_t sample_bound(double rho_min, double eps_d, std::size_t p, double tau, double c) {
    if (!(tau > 0.0 && tau <= 1.0) || !(c > 0.0) || p == 0) throw ModelError("sample_bound: parameter out of domain");
    double k = kappa(rho_min, eps_d);
    double pp = static_cast<double>(p);
    double n = c / k * std::max(std::log(pp * pp / tau), std::log(1.0 / k));
    return static_cast<std::uint64_t>(std::ceil(n));
}

}  // namespace nomad
