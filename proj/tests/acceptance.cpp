// Acceptance suite: one PASS/FAIL line per criterion, INFO lines for the
// diagnostics that explain a failure. Exit status is nonzero when any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nomad/equivalence.hpp"
#include "nomad/experiments.hpp"
#include "nomad/identifiability.hpp"
#include "nomad/io.hpp"
#include "nomad/nomad.hpp"
#include "nomad/oracle.hpp"

using namespace nomad;

namespace {

// Pinned tolerances and sizes.
constexpr double kNoiseMax = 5.0;
constexpr int kSeedsPerGraph = 20;
constexpr double kTrialBudgetMs = 10'000.0;
constexpr int kCorpusSize = 100;
constexpr double kModeTol = 1e-9;
constexpr std::size_t kMinModeGroup = 4;
constexpr double kAdditivityTol = 1e-9;
constexpr double kDecompositionTol = 1e-12;
constexpr double kOutsideTol = 1e-9;
constexpr int kConfounderSeeds = 20;
constexpr int kConfounderNeeded = 19;
constexpr int kFiniteTrials = 15;
constexpr double kFiniteNoiseMax = 1.0;
constexpr double kFinitePassRate = 0.9;
constexpr double kFiniteBudgetS = 300.0;
constexpr std::uint64_t kSeed = 20240611;

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
    std::cout << "criterion " << id << " " << (pass ? "PASS" : "FAIL") << ": " << what << " (" << detail << ")\n";
    if (!pass) ++failures;
}

void info(int id, const std::string& text) { std::cout << "  info " << id << ": " << text << "\n"; }

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Random connected graphs with p in 4..7 and an accepted model each.
struct CorpusModel {
    UndirectedGraph g;
    PrecisionMatrix k;
    Eigen::VectorXd d;
    DistanceMatrix observed;  // noisy population distances over 1..p
};

std::vector<CorpusModel> build_corpus(int& rejected) {
    std::vector<CorpusModel> out;
    rejected = 0;
    for (std::uint64_t i = 0; static_cast<int>(out.size()) < kCorpusSize; ++i) {
        const int p = 4 + static_cast<int>(i % 4);
        const auto seed = mix_seed(kSeed, i);
        CorpusModel m;
        m.g = random_connected(p, 0.3, seed);
        try {
            m.k = synthesize_precision(m.g, mix_seed(seed, 1));
        } catch (const ModelError&) {
            ++rejected;
            continue;
        }
        std::mt19937_64 rng(mix_seed(seed, 2));
        std::uniform_real_distribution<double> noise(0.0, kNoiseMax);
        m.d.resize(p);
        for (int j = 0; j < p; ++j) m.d(j) = noise(rng);
        m.observed = information_distances(noisy_covariance(covariance(m.k), m.d), m.k.labels);
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<Triple> all_triples(int p) {
    std::vector<Triple> out;
    for (int a = 1; a <= p; ++a)
        for (int b = a + 1; b <= p; ++b)
            for (int c = b + 1; c <= p; ++c) out.push_back({a, b, c});
    return out;
}

Triple copies(const Triple& t, int p) { return {t[0] + p, t[1] + p, t[2] + p}; }

// ---------------------------------------------------------------------------

void criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg;
    cfg.noise_max = kNoiseMax;
    cfg.trials = kSeedsPerGraph;
    cfg.seed = kSeed;
    std::string detail;
    bool pass = true;
    double worst_ms = 0.0;
    for (const char* name : {"gsyn_standin", "ieee33_loops", "fig1a"}) {
        cfg.graph = name;
        auto recs = run_sweep(cfg);
        int ok = 0, errors = 0;
        for (const auto& r : recs) {
            ok += r.equivalence_pass;
            errors += !r.error.empty();
            worst_ms = std::max(worst_ms, r.runtime_ms);
        }
        pass = pass && ok == cfg.trials;
        detail += std::string(name) + " " + std::to_string(ok) + "/" + std::to_string(cfg.trials);
        if (errors) detail += " (" + std::to_string(errors) + " errors)";
        detail += ", ";
        if (std::string(name) == "fig1a") {
            for (const auto& r : recs)
                if (!r.error.empty()) info(1, "fig1a trial " + std::to_string(r.trial_seed) + ": " + r.error);
        }
    }
    pass = pass && worst_ms < kTrialBudgetMs;
    detail += "slowest run_nomad " + fmt("%.1f", worst_ms) + " ms";
    report(1, pass, "population recovery on gsyn_standin, ieee33_loops, fig1a family", detail);

    // The same fig1a models with the {17,18,19} triangle opened into a
    // 4-cycle: isolates the triangle as the cause of the failures.
    int ok = 0;
    for (int t = 0; t < kSeedsPerGraph; ++t) {
        const auto seed = mix_seed(kSeed, static_cast<std::uint64_t>(t));
        auto g = fig1a_family(seed);
        const int extra = static_cast<int>(g.num_vertices()) + 1;
        g.remove_edge(18, 19);
        g.add_edge(18, extra);
        g.add_edge(19, extra);
        cfg.graph = "fig1a";
        ok += run_trial_graph(cfg, g, seed).equivalence_pass;
    }
    info(1, "fig1a with the triangle {17,18,19} replaced by a 4-cycle: " + std::to_string(ok) + "/" +
                std::to_string(kSeedsPerGraph) + " pass");
    info(1, "elapsed " + fmt("%.1f", seconds_since(t0)) + " s");
}

void criterion2(const std::vector<CorpusModel>& corpus) {
    std::size_t pairs = 0, mismatches = 0, centre_mismatches = 0, graphs_with_mismatch = 0;
    std::size_t block_virtual = 0;
    for (const auto& m : corpus) {
        const int p = static_cast<int>(m.g.num_vertices());
        const auto ts = all_triples(p);
        std::vector<std::optional<int>> anc;
        std::vector<TripleCentre> centre;
        for (const auto& t : ts) {
            anc.push_back(oracle_joint_star_ancestor(m.g, copies(t, p)));
            centre.push_back(oracle_triple_centre(m.g, copies(t, p)));
        }
        bool any = false;
        for (std::size_t u = 0; u < ts.size(); ++u)
            for (std::size_t w = 0; w < ts.size(); ++w) {
                ++pairs;
                const bool got = tia(ts[u], ts[w], m.observed, Tolerances::population());
                const bool literal = anc[u] && anc[w] && *anc[u] == *anc[w];
                const bool by_centre = centre[u] == centre[w];
                if (got != literal) {
                    ++mismatches;
                    any = true;
                    if (!centre[u].is_star() && by_centre) ++block_virtual;
                }
                if (got != by_centre) ++centre_mismatches;
            }
        graphs_with_mismatch += any;
    }
    report(2, mismatches == 0, "tia matches oracle_tia on every ordered triple pair",
           std::to_string(mismatches) + " mismatches in " + std::to_string(pairs) + " pairs, " +
               std::to_string(graphs_with_mismatch) + " of " + std::to_string(corpus.size()) + " graphs");
    info(2, std::to_string(block_virtual) +
                " mismatches are pairs of non-star triples meeting at the same three vertices of one block");
    info(2, "tia against the block-cut-tree centre oracle: " + std::to_string(centre_mismatches) + " mismatches");
}

void criterion3(const std::vector<CorpusModel>& corpus) {
    std::size_t pairs = 0, matched = 0, virtual_pairs = 0, small_groups = 0;
    double worst = 0.0;
    for (const auto& m : corpus) {
        const int p = static_cast<int>(m.g.num_vertices());
        Diagnostics diag;
        auto res = identify_ancestors(m.observed, Tolerances::population(), &diag);
        std::map<int, std::optional<int>> truth;
        for (int h : res.catalog.a_hid)
            truth[h] = oracle_joint_star_ancestor(m.g, copies(res.catalog.collection(h).triples.front(), p));
        for (const auto& hm : diag.hidden_modes) {
            ++pairs;
            if (hm.mode.group_size < kMinModeGroup) ++small_groups;
            const auto& a = truth[hm.p];
            const auto& b = truth[hm.q];
            if (!a || !b) {
                ++virtual_pairs;
                continue;
            }
            const double want = oracle_hidden_distance(m.g, m.k, m.d, *a, *b);
            const double err = std::abs(hm.mode.value - want);
            worst = std::max(worst, err);
            if (err <= kModeTol && hm.mode.group_size >= kMinModeGroup) ++matched;
        }
    }
    report(3, matched == pairs, "eps_mode of the hidden-pair values equals the joint distance, group >= 4",
           std::to_string(matched) + "/" + std::to_string(pairs) + " pairs, worst error " + fmt("%.2e", worst) +
               ", " + std::to_string(small_groups) + " groups below 4");
    info(3, std::to_string(virtual_pairs) + " pairs involve a hidden collection with no star ancestor in the joint graph");
}

void criterion4(const std::vector<CorpusModel>& corpus) {
    std::size_t clusters = 0, exact = 0, failed_runs = 0;
    std::size_t with_triangle = 0;
    for (const auto& m : corpus) {
        const auto bd = block_decomposition(m.g);
        VertexSet noncut;
        for (const auto& b : bd.nontrivial_blocks)
            for (int v : b)
                if (!bd.cut_vertices.count(v)) noncut.insert(v);
        NomadOutput out;
        try {
            out = run_nomad(m.observed);
        } catch (const NomadError&) {
            ++failed_runs;
            continue;
        }
        bool bad = false;
        for (const auto& [anc, nc] : out.noncut) {
            ++clusters;
            const auto* l = out.clusters.leaf_of(anc);
            VertexSet want;
            for (int x : l->l2)
                if (noncut.count(x)) want.insert(x);
            if (nc.c_noncut == want) ++exact;
            else bad = true;
        }
        if (bad) {
            for (const auto& b : bd.nontrivial_blocks) {
                std::size_t inner = 0;
                for (int v : b) inner += !bd.cut_vertices.count(v);
                if (b.size() == 3 && inner > 0) {
                    ++with_triangle;
                    break;
                }
            }
        }
    }
    report(4, exact == clusters && failed_runs == 0, "NonCutTest equals block membership per leaf cluster",
           std::to_string(exact) + "/" + std::to_string(clusters) + " clusters exact, " +
               std::to_string(failed_runs) + " runs failed");
    info(4, std::to_string(with_triangle) +
                " graphs with a wrong cluster contain a triangle block with a non-cut vertex");
}

void criterion5(const std::vector<CorpusModel>& corpus) {
    std::size_t models = 0, sep_checked = 0, sep_bad = 0, gap_bad = 0, gamma_bad = 0;
    double worst_sep = 0.0;
    auto check = [&](const UndirectedGraph& g, const PrecisionMatrix& k, bool small) {
        ++models;
        const auto dist = information_distances(covariance(k), k.labels);
        const auto vs = g.vertices();
        double gmin = std::numeric_limits<double>::infinity();
        for (int m : vs) {
            const auto comps = g.components({m});
            std::map<int, int> comp;
            for (std::size_t c = 0; c < comps.size(); ++c)
                for (int v : comps[c]) comp[v] = static_cast<int>(c);
            for (int a : vs)
                for (int b : vs) {
                    if (a >= b || a == m || b == m) continue;
                    const bool sep = small ? oracle_is_separator(g, {m}, {a}, {b}) : comp[a] != comp[b];
                    const double r = std::abs(dist.at(a, m) + dist.at(m, b) - dist.at(a, b));
                    if (sep) {
                        ++sep_checked;
                        worst_sep = std::max(worst_sep, r);
                        sep_bad += r >= kAdditivityTol;
                    } else {
                        gmin = std::min(gmin, r);
                        gap_bad += r < k.margins.gamma - 1e-12;  // rounding order differs from the margin scan
                    }
                }
        }
        gamma_bad += !(k.margins.gamma > 0.0) || (std::isfinite(gmin) && std::abs(gmin - k.margins.gamma) > 1e-12);
    };
    for (const auto& m : corpus) check(m.g, m.k, true);
    for (int s = 0; s < kSeedsPerGraph; ++s) check(gsyn_standin(), synthesize_precision(gsyn_standin(), s), true);
    for (int s = 0; s < 4; ++s) {
        auto g = fig1a_family(s);
        check(g, synthesize_precision(g, s), false);
    }
    for (int s = 0; s < 2; ++s) check(ieee33_loops(), synthesize_precision(ieee33_loops(), s), false);
    report(5, sep_bad == 0 && gap_bad == 0 && gamma_bad == 0, "additivity on separated triples, gap >= gamma otherwise",
           std::to_string(models) + " models, " + std::to_string(sep_checked) + " separated triples, worst residual " +
               fmt("%.2e", worst_sep) + ", " + std::to_string(gap_bad) + " gaps below gamma, " +
               std::to_string(gamma_bad) + " gamma disagreements");
}

struct ConfounderCount {
    int differs = 0, in_class = 0, exact = 0;
};

ConfounderCount confounder_runs(const UndirectedGraph& g, const VertexSet& block, const VertexSet& noisy) {
    ConfounderCount c;
    for (int s = 1; s <= kConfounderSeeds; ++s) {
        auto k = synthesize_precision(g, mix_seed(kSeed, 100 + s));
        std::mt19937_64 rng(mix_seed(kSeed, 200 + s));
        std::uniform_real_distribution<double> noise(0.1, kNoiseMax);
        Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.num_vertices()));
        for (int v : noisy) d(v - 1) = noise(rng);
        auto split = split_noise(covariance(k), d, g, block);
        auto r = verify_confounder(split, g);
        c.differs += r.h_differs;
        c.in_class += r.h_in_class;
        c.exact += r.decomposition_error < kDecompositionTol && r.outside_deviation < kOutsideTol;
    }
    return c;
}

void criterion6() {
    const auto g = UndirectedGraph::from_edges(5, {{1, 2}, {2, 3}, {3, 4}, {2, 4}, {4, 5}});
    auto k = synthesize_precision(g, kSeed);
    Eigen::VectorXd d = Eigen::VectorXd::Zero(5);
    d(2) = 1.0;
    auto split = split_noise(covariance(k), d, g, {2, 3, 4});
    auto r = verify_confounder(split, g);
    const bool base = r.sigma_q_pd && r.decomposition_error < kDecompositionTol && r.outside_deviation < kOutsideTol &&
                      r.h_in_class && split.d_q.cwiseAbs().maxCoeff() == 0.0;
    auto c = confounder_runs(g, {2, 3, 4}, {3});
    report(6, base && c.differs >= kConfounderNeeded && c.in_class == kConfounderSeeds,
           "confounder split on 1-2, triangle {2,3,4}, 4-5",
           "decomposition error " + fmt("%.1e", r.decomposition_error) + ", outside deviation " +
               fmt("%.1e", r.outside_deviation) + ", H in [G] " + (r.h_in_class ? "yes" : "no") + ", H != G in " +
               std::to_string(c.differs) + "/" + std::to_string(kConfounderSeeds) + " seeds");
    info(6, "a triangle block is complete, so the perturbed block stays complete and H = G");
    const auto g8 = UndirectedGraph::from_edges(8, {{7, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 2}, {4, 6}, {6, 8}});
    auto c8 = confounder_runs(g8, {2, 3, 4, 5}, {3, 5});
    info(6, "4-cycle block {2,3,4,5} with noise at 3 and 5: H != G in " + std::to_string(c8.differs) + "/" +
                std::to_string(kConfounderSeeds) + ", H in [G] in " + std::to_string(c8.in_class) + "/" +
                std::to_string(kConfounderSeeds) + ", exact in " + std::to_string(c8.exact) + "/" +
                std::to_string(kConfounderSeeds));
}

void criterion7() {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg;
    cfg.graph = "chain_triangle";
    cfg.noise_max = kFiniteNoiseMax;
    cfg.trials = kFiniteTrials;
    cfg.seed = kSeed;
    std::vector<double> rate;
    std::string detail;
    for (std::size_t n : {1'000u, 10'000u, 100'000u}) {
        cfg.n_samples = n;
        auto recs = run_sweep(cfg);
        int ok = 0;
        for (const auto& r : recs) ok += r.equivalence_pass;
        rate.push_back(static_cast<double>(ok) / cfg.trials);
        detail += "n=" + std::to_string(n) + ": " + std::to_string(ok) + "/" + std::to_string(cfg.trials) + ", ";
    }
    bool monotone = true;
    for (std::size_t i = 1; i < rate.size(); ++i) {
        auto se = [](double r) { return std::sqrt(r * (1.0 - r) / kFiniteTrials); };
        monotone = monotone && rate[i] + 2.0 * std::hypot(se(rate[i]), se(rate[i - 1])) >= rate[i - 1];
    }
    const double secs = seconds_since(t0);
    report(7, rate.back() >= kFinitePassRate && monotone && secs < kFiniteBudgetS,
           "finite-sample pass rate on chain(8) plus a triangle",
           detail + (monotone ? "monotone" : "not monotone") + ", " + fmt("%.1f", secs) + " s");

    auto g = chain_triangle();
    auto k = synthesize_precision(g, mix_seed(mix_seed(kSeed, 0), 1));
    auto sigma = covariance(k);
    double rho_min = 1.0;
    for (Eigen::Index i = 0; i < sigma.rows(); ++i)
        for (Eigen::Index j = i + 1; j < sigma.cols(); ++j)
            rho_min = std::min(rho_min, std::abs(sigma(i, j)) / std::sqrt((sigma(i, i) + kFiniteNoiseMax) *
                                                                           (sigma(j, j) + kFiniteNoiseMax)));
    auto tol = Tolerances::finite(k.margins.tolerance_scale() / 4.0, k.margins.gamma);
    info(7, "first model: rho_min ~ " + fmt("%.4f", rho_min) + " at full noise, sep_tol " + fmt("%.2e", tol.sep_tol) +
                ", sampling sd of -log|rho| at that pair and n=1e5 ~ " + fmt("%.2f", 1.0 / (rho_min * std::sqrt(1e5))));
    try {
        info(7, "sample_bound(rho_min, eps_d, p=10, tau=0.05, c=1) = " +
                    std::to_string(sample_bound(rho_min, tol.eps_d, 10, 0.05, 1.0)));
    } catch (const ModelError& e) {
        info(7, std::string("sample_bound: ") + e.what());
    }
}

void criterion8() {
    auto csv = [](ExperimentConfig cfg) {
        std::ostringstream ss;
        run_sweep(cfg, &ss);
        return ss.str();
    };
    auto strip_runtime = [](const std::string& text) {
        std::istringstream in(text);
        std::string line, out;
        while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
        return out;
    };
    ExperimentConfig pop;
    pop.graph = "gsyn_standin";
    pop.noise_max = kNoiseMax;
    pop.trials = 12;
    pop.seed = kSeed;
    pop.threads = 4;
    pop.timing = false;
    ExperimentConfig fin = pop;
    fin.graph = "random_block(9,2)";
    fin.n_samples = 2000;
    fin.trials = 8;
    const bool a = csv(pop) == csv(pop);
    const bool b = csv(fin) == csv(fin);
    pop.timing = true;
    const bool c = strip_runtime(csv(pop)) == strip_runtime(csv(pop));
    report(8, a && b, "repeated sweeps give byte-identical CSV",
           std::string("population ") + (a ? "identical" : "differs") + ", finite " + (b ? "identical" : "differs"));
    info(8, std::string("with timing on, all columns except runtime_ms ") + (c ? "identical" : "differ"));
}

}  // namespace

int main() {
    std::cout << std::unitbuf;
    const auto t0 = std::chrono::steady_clock::now();
    int rejected = 0;
    const auto corpus = build_corpus(rejected);
    std::cout << "corpus: " << corpus.size() << " random connected graphs (p 4..7), " << rejected
              << " rejected by the margin floors\n";
    criterion1();
    criterion2(corpus);
    criterion3(corpus);
    criterion4(corpus);
    criterion5(corpus);
    criterion6();
    criterion7();
    criterion8();
    std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed"))
              << " in " << fmt("%.1f", seconds_since(t0)) << " s\n";
    return failures ? 1 : 0;
}
