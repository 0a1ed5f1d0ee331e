#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "nomad/equivalence.hpp"
#include "nomad/experiments.hpp"
#include "nomad/identifiability.hpp"
#include "nomad/io.hpp"
#include "nomad/nomad.hpp"
#include "nomad/oracle.hpp"

using namespace nomad;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Shared by every subcommand; unset optionals keep the config defaults.
struct Flags {
    std::string config;
    std::string graph;
    std::string graph_file;
    std::optional<double> noise_max;
    std::optional<std::size_t> samples;
    bool population = false;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::optional<double> xi, eps_d, sep_tol;
    std::optional<int> threads;
    std::string out;
    bool no_timing = false;
    bool verify = false;
};

void add_common(CLI::App* app, Flags& f, bool sweep_flags) {
    app->add_option("--config", f.config, "JSON config mirroring the flags")->check(CLI::ExistingFile);
    app->add_option("--graph", f.graph, "generator name, e.g. gsyn_standin, chain(8), random_block(9,2)");
    app->add_option("--graph-file", f.graph_file, "graph JSON instead of a generator")->check(CLI::ExistingFile);
    app->add_option("--noise-max", f.noise_max, "noise variances drawn uniform on [0, x]")->check(CLI::NonNegativeNumber);
    auto* s = app->add_option("--samples", f.samples, "draw n samples instead of population distances");
    app->add_flag("--population", f.population, "population distances")->excludes(s);
    app->add_option("--seed", f.seed, "experiment seed");
    app->add_option("--xi", f.xi, "TIA threshold");
    app->add_option("--eps-d", f.eps_d, "mode group width");
    app->add_option("--sep-tol", f.sep_tol, "separation test width");
    app->add_option("--out", f.out, "output file or directory");
    if (sweep_flags) {
        app->add_option("--trials", f.trials, "number of trials")->check(CLI::PositiveNumber);
        app->add_option("--threads", f.threads, "worker threads, 0 for all cores");
        app->add_flag("--no-timing", f.no_timing, "write runtime_ms = 0 for byte-stable output");
    }
}

ExperimentConfig make_config(const Flags& f) {
    ExperimentConfig c;
    if (!f.config.empty()) c = config_from_json(read_file(f.config));
    if (!f.graph.empty()) c.graph = f.graph;
    if (!f.graph_file.empty()) c.graph_file = f.graph_file;
    if (f.noise_max) c.noise_max = *f.noise_max;
    if (f.samples) c.n_samples = *f.samples;
    if (f.population) c.n_samples.reset();
    if (f.trials) c.trials = *f.trials;
    if (f.seed) c.seed = *f.seed;
    if (f.xi) c.xi = f.xi;
    if (f.eps_d) c.eps_d = f.eps_d;
    if (f.sep_tol) c.sep_tol = f.sep_tol;
    if (!f.out.empty()) c.output_dir = f.out;
    if (f.threads) c.threads = *f.threads;
    if (f.no_timing) c.timing = false;
    c.validate();
    return c;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text << "\n";
    } else {
        write_file(path, text + "\n");
        std::cerr << "wrote " << path << "\n";
    }
}

// One model draw, seeded the same way as a sweep trial with this seed.
struct Draw {
    UndirectedGraph g;
    PrecisionMatrix k;
    Eigen::VectorXd d;
    Eigen::MatrixXd sigma_o;
};

Draw draw_model(const ExperimentConfig& c) {
    Draw m;
    m.g = load_graph_source(c, c.seed);
    m.k = synthesize_precision(m.g, mix_seed(c.seed, 1), c.synthesis);
    const auto sigma = covariance(m.k);
    std::mt19937_64 rng(mix_seed(c.seed, 2));
    std::uniform_real_distribution<double> noise(0.0, c.noise_max);
    m.d.resize(sigma.rows());
    for (Eigen::Index i = 0; i < m.d.size(); ++i) m.d(i) = c.noise_max > 0.0 ? noise(rng) : 0.0;
    m.sigma_o = noisy_covariance(sigma, m.d);
    return m;
}

Tolerances tolerances(const ExperimentConfig& c, const ModelMargins* margins) {
    Tolerances tol;
    if (c.n_samples && margins) tol = Tolerances::finite(c.xi.value_or(margins->tolerance_scale() / 4.0), margins->gamma);
    else if (c.xi) tol.xi = *c.xi;
    if (c.eps_d) tol.eps_d = *c.eps_d;
    if (c.sep_tol) tol.sep_tol = *c.sep_tol;
    return tol;
}

json tolerances_json(const Tolerances& t) { return {{"xi", t.xi}, {"eps_d", t.eps_d}, {"sep_tol", t.sep_tol}}; }

json record_json(const TrialRecord& r) {
    json j{{"trial_seed", r.trial_seed},
           {"noise_max", r.noise_max},
           {"n_samples", r.n_samples},
           {"equivalence_pass", r.equivalence_pass},
           {"families_recovered", r.families_recovered},
           {"noncut_recovered", r.noncut_recovered},
           {"k_recovered", r.k_recovered}};
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

// Cross-checks of the fast graph routines against the exhaustive oracles.
json verify_graph(const UndirectedGraph& g, const UndirectedGraph& h) {
    json j;
    auto guarded = [&](const char* key, auto&& fn) {
        try {
            j[key] = fn();
        } catch (const BudgetExceeded& e) {
            j[key] = std::string("skipped: ") + e.what();
        }
    };
    guarded("blocks", [&] {
        auto fast = block_decomposition(g).blocks;
        std::sort(fast.begin(), fast.end());
        return fast == oracle_blocks(g);
    });
    guarded("star_triplets", [&] {
        const auto want = oracle_star_triplets(g);
        const auto vs = g.vertices();
        std::size_t bad = 0;
        for (std::size_t a = 0; a < vs.size(); ++a)
            for (std::size_t b = a + 1; b < vs.size(); ++b)
                for (std::size_t c = b + 1; c < vs.size(); ++c) {
                    const Triple u{vs[a], vs[b], vs[c]};
                    bad += want.count(u) != (star_ancestor(g, u) ? 1u : 0u);
                }
        return bad == 0;
    });
    guarded("same_class", [&] { return oracle_same_class(g, h) == same_equivalence_class(g, h); });
    return j;
}

UndirectedGraph demo_graph(const std::string& name, std::uint64_t seed) {
    // a triangle block between two leaves, and a 4-cycle whose cut vertices carry no leaves
    if (name == "block5") return UndirectedGraph::from_edges(5, {{1, 2}, {2, 3}, {3, 4}, {2, 4}, {4, 5}});
    if (name == "square8")
        return UndirectedGraph::from_edges(8, {{7, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 2}, {4, 6}, {6, 8}});
    return generate_graph(name, seed);
}

int cmd_generate(const Flags& f) {
    const auto c = make_config(f);
    emit(f.out, graph_to_json(load_graph_source(c, c.seed)));
    return 0;
}

int cmd_distances(const Flags& f) {
    const auto c = make_config(f);
    const auto m = draw_model(c);
    const auto dist = c.n_samples ? empirical_distances(sample(m.sigma_o, *c.n_samples, mix_seed(c.seed, 3)), m.k.labels)
                                  : information_distances(m.sigma_o, m.k.labels);
    emit(f.out, distances_to_json(dist));
    return 0;
}

int cmd_nomad(const Flags& f, const std::string& dist_file, const std::string& data_file, const std::string& ast_out) {
    const auto c = make_config(f);
    NomadOutput out;
    json extra;
    std::optional<UndirectedGraph> truth;
    if (!dist_file.empty()) {
        const auto tol = tolerances(c, nullptr);
        extra["tolerances"] = tolerances_json(tol);
        out = run_nomad(distances_from_json(read_file(dist_file)), tol);
    } else if (!data_file.empty()) {
        if (!c.xi) throw std::invalid_argument("--data needs --xi: there is no model to derive it from");
        const auto tol = tolerances(c, nullptr);
        extra["tolerances"] = tolerances_json(tol);
        out = run_nomad_samples(read_matrix(read_file(data_file)), tol);
    } else {
        const auto m = draw_model(c);
        const auto tol = tolerances(c, &m.k.margins);
        extra["tolerances"] = tolerances_json(tol);
        out = c.n_samples ? run_nomad_samples(sample(m.sigma_o, *c.n_samples, mix_seed(c.seed, 3)), tol)
                          : run_nomad(information_distances(m.sigma_o, m.k.labels), tol);
        truth = m.g;
        auto rec = score_graph(m.g, out.graph);
        rec.trial_seed = c.seed;
        rec.noise_max = c.noise_max;
        rec.n_samples = c.n_samples.value_or(0);
        extra["score"] = record_json(rec);
    }
    if (f.verify) {
        if (!truth) throw std::invalid_argument("--verify needs a generated graph");
        extra["verify"] = verify_graph(*truth, out.graph);
    }
    auto j = json::parse(nomad_output_json(out));
    j.update(extra);
    emit(f.out, j.dump(2));
    if (!ast_out.empty()) emit(ast_out, ast_to_json(out.ast));
    return 0;
}

int cmd_sweep(const Flags& f) {
    const auto c = make_config(f);
    fs::create_directories(c.output_dir);
    const auto csv_path = fs::path(c.output_dir) / "trials.csv";
    std::ofstream csv(csv_path);
    if (!csv) throw IoError("cannot write " + csv_path.string());
    write_file((fs::path(c.output_dir) / "config.json").string(), config_to_json(c) + "\n");
    const auto recs = run_sweep(c, &csv);
    int pass = 0, failed = 0;
    for (const auto& r : recs) {
        pass += r.equivalence_pass;
        if (!r.error.empty()) {
            ++failed;
            std::cerr << "trial " << r.trial_seed << ": " << r.error << "\n";
        }
    }
    std::cerr << "wrote " << csv_path.string() << ": " << pass << "/" << recs.size() << " in class";
    if (failed) std::cerr << ", " << failed << " errored";
    std::cerr << "\n";
    return 0;
}

int cmd_demo(const Flags& f, std::vector<int> block, double interior, bool all_blocks) {
    const std::uint64_t seed = f.seed.value_or(1);
    const auto g = demo_graph(f.graph.empty() ? "block5" : f.graph, seed);
    const auto bd = block_decomposition(g);
    if (bd.nontrivial_blocks.empty()) throw GraphError("graph has no non-trivial block");
    std::vector<VertexSet> blocks;
    if (all_blocks) blocks = bd.nontrivial_blocks;
    else if (block.empty()) blocks = {bd.nontrivial_blocks.front()};
    else blocks = {VertexSet(block.begin(), block.end())};

    const auto k = synthesize_precision(g, mix_seed(seed, 1));
    std::mt19937_64 rng(mix_seed(seed, 2));
    std::uniform_real_distribution<double> noise(0.0, f.noise_max.value_or(1.0));
    Eigen::VectorXd d(k.k.rows());
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = noise(rng);
    // the interior noise is what can move into the covariance
    for (const auto& b : blocks)
        for (int v : b)
            if (!bd.cut_vertices.count(v)) d(v - 1) = std::max(d(v - 1), interior);

    // each split starts from the previous one's covariance and leftover noise
    Eigen::MatrixXd sigma = covariance(k);
    json reports = json::array();
    for (const auto& b : blocks) {
        const auto split = split_noise(sigma, d, g, b);
        reports.push_back(json::parse(confounder_report_json(split, verify_confounder(split, g))));
        sigma = split.sigma_q;
        d = split.d_q;
    }
    emit(f.out, (reports.size() == 1 ? reports.front() : reports).dump(2));
    return 0;
}

int cmd_score(const Flags& f, const std::string& adjacency, bool csv) {
    const auto c = make_config(f);
    const auto r = score_external(adjacency, load_graph_source(c, c.seed));
    emit(f.out, csv ? trial_csv_header() + trial_csv_row(r) : record_json(r).dump(2));
    return r.equivalence_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph recovery under unknown diagonal noise"};
    app.require_subcommand(1);

    Flags gen_f, dist_f, nomad_f, sweep_f, demo_f, score_f;
    auto* gen = app.add_subcommand("generate", "write a generated graph as JSON");
    add_common(gen, gen_f, false);

    auto* dist = app.add_subcommand("distances", "draw a model and write its observed distances");
    add_common(dist, dist_f, false);

    std::string dist_file, data_file, ast_out;
    auto* run = app.add_subcommand("nomad", "recover the articulated set tree");
    add_common(run, nomad_f, false);
    auto* df = run->add_option("--distances", dist_file, "distance JSON")->check(CLI::ExistingFile);
    run->add_option("--data", data_file, "n x p sample matrix (CSV or whitespace)")->check(CLI::ExistingFile)->excludes(df);
    run->add_option("--ast-out", ast_out, "also write the tree JSON here");
    run->add_flag("--verify", nomad_f.verify, "cross-check with the exhaustive oracles")->group("");

    auto* sweep = app.add_subcommand("sweep", "run trials and write trials.csv to --out");
    add_common(sweep, sweep_f, true);

    std::vector<int> block;
    double interior = 1.0;
    auto* demo = app.add_subcommand("identifiability-demo", "move block-interior noise into the covariance");
    add_common(demo, demo_f, false);
    demo->add_option("--block", block, "block vertices; default the first non-trivial block");
    demo->add_option("--interior-noise", interior, "lower bound on noise at non-cut block vertices")
        ->check(CLI::PositiveNumber);
    bool all_blocks = false;
    demo->add_flag("--all-blocks", all_blocks, "split every non-trivial block in turn")->excludes("--block");

    std::string adjacency;
    bool score_csv = false;
    auto* score = app.add_subcommand("score", "score an external adjacency against --graph");
    add_common(score, score_f, false);
    score->add_option("--adjacency", adjacency, "graph JSON or 0/1 matrix")->required()->check(CLI::ExistingFile);
    score->add_flag("--csv", score_csv, "one CSV row instead of JSON");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*gen) return cmd_generate(gen_f);
        if (*dist) return cmd_distances(dist_f);
        if (*run) return cmd_nomad(nomad_f, dist_file, data_file, ast_out);
        if (*sweep) return cmd_sweep(sweep_f);
        if (*demo) return cmd_demo(demo_f, block, interior, all_blocks);
        if (*score) return cmd_score(score_f, adjacency, score_csv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
