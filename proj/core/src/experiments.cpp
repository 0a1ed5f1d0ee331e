#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <ostream>
#include <thread>

#include "nomad/equivalence.hpp"
#include "nomad/experiments.hpp"
#include "nomad/io.hpp"

namespace nomad {

void ExperimentConfig::validate() const {
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (!(noise_max >= 0.0)) throw std::invalid_argument("noise_max must be non-negative");
    if (n_samples && *n_samples < 2) throw std::invalid_argument("samples must be at least 2");
    if (graph.empty() && graph_file.empty()) throw std::invalid_argument("no graph source");
}

namespace {

template <class T>
double jaccard(const std::set<T>& a, const std::set<T>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t common = 0;
    for (const auto& x : a) common += b.count(x);
    return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

}  // namespace

TrialRecord score_graph(const UndirectedGraph& g, const UndirectedGraph& h) {
    if (g.vertex_set() != h.vertex_set()) throw GraphError("score: vertex labels differ");
    TrialRecord r;
    r.equivalence_pass = same_equivalence_class(g, h) ? 1 : 0;
    if (!h.connected()) return r;
    const auto sg = equivalence_signature(g), sh = equivalence_signature(h);
    r.families_recovered = jaccard(sg.families, sh.families);
    r.noncut_recovered = jaccard(sg.noncut_union, sh.noncut_union);
    r.k_recovered = jaccard(sg.k_set, sh.k_set);
    return r;
}

UndirectedGraph load_graph_source(const ExperimentConfig& cfg, std::uint64_t trial_seed) {
    if (!cfg.graph_file.empty()) return graph_from_json(read_file(cfg.graph_file));
    return generate_graph(cfg.graph, trial_seed);
}

TrialRecord run_trial(const ExperimentConfig& cfg, int trial) {
    const auto seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(trial));
    try {
        return run_trial_graph(cfg, load_graph_source(cfg, seed), seed);
    } catch (const std::exception& e) {
        TrialRecord rec;
        rec.trial_seed = seed;
        rec.noise_max = cfg.noise_max;
        rec.n_samples = cfg.n_samples.value_or(0);
        rec.error = std::string("graph: ") + e.what();
        return rec;
    }
}

TrialRecord run_trial_graph(const ExperimentConfig& cfg, const UndirectedGraph& g, std::uint64_t trial_seed) {
    TrialRecord rec;
    rec.trial_seed = trial_seed;
    rec.noise_max = cfg.noise_max;
    rec.n_samples = cfg.n_samples.value_or(0);
    try {
        const auto k = synthesize_precision(g, mix_seed(rec.trial_seed, 1), cfg.synthesis);
        const auto sigma = covariance(k);
        std::mt19937_64 rng(mix_seed(rec.trial_seed, 2));
        std::uniform_real_distribution<double> noise(0.0, cfg.noise_max);
        Eigen::VectorXd d(sigma.rows());
        for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = cfg.noise_max > 0.0 ? noise(rng) : 0.0;
        const auto sigma_o = noisy_covariance(sigma, d);

        Tolerances tol;
        if (cfg.n_samples) {
            tol = Tolerances::finite(cfg.xi.value_or(k.margins.tolerance_scale() / 4.0), k.margins.gamma);
        } else if (cfg.xi) {
            tol.xi = *cfg.xi;
        }
        if (cfg.eps_d) tol.eps_d = *cfg.eps_d;
        if (cfg.sep_tol) tol.sep_tol = *cfg.sep_tol;

        NomadOutput out;
        std::chrono::steady_clock::duration elapsed{};
        if (cfg.n_samples) {
            auto data = sample(sigma_o, *cfg.n_samples, mix_seed(rec.trial_seed, 3));
            auto t0 = std::chrono::steady_clock::now();
            out = run_nomad_samples(data, tol);
            elapsed = std::chrono::steady_clock::now() - t0;
        } else {
            auto dist = information_distances(sigma_o, k.labels);
            auto t0 = std::chrono::steady_clock::now();
            out = run_nomad(dist, tol);
            elapsed = std::chrono::steady_clock::now() - t0;
        }
        auto s = score_graph(g, out.graph);
        rec.equivalence_pass = s.equivalence_pass;
        rec.families_recovered = s.families_recovered;
        rec.noncut_recovered = s.noncut_recovered;
        rec.k_recovered = s.k_recovered;
        if (cfg.timing) rec.runtime_ms = std::chrono::duration<double, std::milli>(elapsed).count();
    } catch (const NomadError& e) {
        rec.error = e.what();
    } catch (const ModelError& e) {
        rec.error = std::string("synthesis: ") + e.what();
    } catch (const std::exception& e) {
        rec.error = std::string("error: ") + e.what();
    }
    return rec;
}

std::vector<TrialRecord> run_sweep(const ExperimentConfig& cfg, std::ostream* csv) {
    cfg.validate();
    const int n = cfg.trials;
    int workers = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, n);

    std::vector<TrialRecord> out(n);
    std::vector<char> done(n, 0);
    std::atomic<int> next{0};
    std::mutex mu;
    int written = 0;
    if (csv) *csv << trial_csv_header();

    auto work = [&] {
        for (int t = next++; t < n; t = next++) {
            auto rec = run_trial(cfg, t);
            std::lock_guard lock(mu);
            out[t] = std::move(rec);
            done[t] = 1;
            // Single sink: flush every finished row that is next in order.
            while (written < n && done[written]) {
                if (csv) *csv << trial_csv_row(out[written]) << std::flush;
                ++written;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int i = 1; i < workers; ++i) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    return out;
}

TrialRecord score_external(const std::string& adjacency_path, const UndirectedGraph& g) {
    UndirectedGraph h;
    if (adjacency_path.size() >= 5 && adjacency_path.substr(adjacency_path.size() - 5) == ".json") {
        h = graph_from_json(read_file(adjacency_path));
    } else {
        auto m = read_matrix(read_file(adjacency_path));
        if (m.rows() != m.cols()) throw IoError("adjacency matrix is not square");
        const int p = static_cast<int>(m.rows());
        h = UndirectedGraph::with_vertices(1, p);
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j)
                if (m(i, j) != 0.0 || m(j, i) != 0.0) h.add_edge(i + 1, j + 1);
    }
    return score_graph(g, h);
}

}  // namespace nomad
