#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "nomad/equivalence.hpp"
#include "nomad/experiments.hpp"
#include "nomad/io.hpp"

using namespace nomad;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / "nomad_test_experiments";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_SUITE_BEGIN("experiments");

TEST_CASE("generators") {
    SUBCASE("ieee33 feeder with ties") {
        const auto g = ieee33_loops();
        CHECK(g.num_vertices() == 33);
        CHECK(g.num_edges() == 37);
        const auto s = equivalence_signature(g);
        // the five ties close every lateral into a loop, so only the
        // substation pair 1-2 hangs off the single block
        CHECK(s.families == std::set<VertexSet>{{1, 2}});
        CHECK(block_decomposition(g).nontrivial_blocks.size() == 1);
        // 15..18 and 30..33 are paths on this feeder, never a star of leaves
        CHECK_FALSE(s.families.count({15, 16, 17, 18}));
        CHECK_FALSE(s.families.count({30, 31, 32, 33}));
    }
    SUBCASE("gsyn stand-in") {
        const auto s = equivalence_signature(gsyn_standin());
        CHECK(s.families.count({1, 2, 3}));
        CHECK(s.families.count({8, 9, 10}));
        CHECK(block_decomposition(gsyn_standin()).nontrivial_blocks.size() == 1);
    }
    SUBCASE("chains are trees") {
        for (int p : {1, 2, 5, 12}) {
            const auto g = chain(p);
            CHECK(g.num_edges() == static_cast<std::size_t>(p - 1));
            CHECK(block_decomposition(g).nontrivial_blocks.empty());
        }
    }
    SUBCASE("random_block has the requested block count") {
        for (std::uint64_t s = 0; s < 50; ++s) {
            const auto g = random_block(9, 2, s);
            CHECK(g.num_vertices() == 9);
            CHECK(g.connected());
            CHECK(block_decomposition(g).nontrivial_blocks.size() == 2);
        }
        CHECK_THROWS_AS(random_block(4, 2, 1), GraphError);
    }
    SUBCASE("fig1a family") {
        for (std::uint64_t s = 0; s < 8; ++s) {
            const auto g = fig1a_family(s);
            CHECK(g.connected());
            CHECK(equivalence_signature(g).k_set == VertexSet{4, 6, 7, 8, 9});
        }
        CHECK(fig1a_family(0).num_vertices() == 24);
        CHECK(fig1a_family(1).num_vertices() == 25);
    }
    SUBCASE("names") {
        CHECK(generate_graph("chain(6)", 0) == chain(6));
        CHECK(generate_graph("star(4)", 0) == star(4));
        CHECK(generate_graph("random_block(9,2)", 5) == random_block(9, 2, 5));
        CHECK(generate_graph("random_connected(6)", 5) == random_connected(6, 0.3, 5));
        CHECK(generate_graph("random_connected(6, 0.5)", 5) == random_connected(6, 0.5, 5));
        CHECK(generate_graph("chain_triangle", 0) == chain_triangle());
        CHECK_THROWS_AS(generate_graph("petersen", 0), GraphError);
        CHECK_THROWS_AS(generate_graph("chain(3,2)", 0), GraphError);
    }
    SUBCASE("seed mixing") {
        CHECK(mix_seed(1, 2) == mix_seed(1, 2));
        CHECK(mix_seed(1, 2) != mix_seed(2, 1));
        CHECK(mix_seed(1, 2) != mix_seed(1, 3));
    }
}

TEST_CASE("scoring") {
    const auto g = gsyn_standin();
    SUBCASE("score_graph") {
        auto r = score_graph(g, g);
        CHECK(r.equivalence_pass == 1);
        CHECK(r.families_recovered == 1.0);
        CHECK(r.noncut_recovered == 1.0);
        CHECK(r.k_recovered == 1.0);
        auto h = g;
        h.remove_edge(8, 10);
        h.add_edge(1, 10);
        r = score_graph(g, h);
        CHECK(r.equivalence_pass == 0);
        CHECK(r.families_recovered < 1.0);
        CHECK_THROWS_AS(score_graph(g, chain(9)), GraphError);
    }
    SUBCASE("score_external") {
        const auto same = scratch("same.json");
        write_file(same.string(), graph_to_json(g));
        CHECK(score_external(same.string(), g).equivalence_pass == 1);

        // block edge added, as a 0/1 matrix with a header row
        auto h = g;
        h.add_edge(5, 7);
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(10, 10);
        for (auto [u, v] : h.edges()) a(u - 1, v - 1) = a(v - 1, u - 1) = 1.0;
        const auto block = scratch("block.csv");
        write_file(block.string(), "v1,v2,v3,v4,v5,v6,v7,v8,v9,v10\n" + matrix_to_csv(a));
        CHECK(score_external(block.string(), g).equivalence_pass == 1);

        const auto empty = scratch("empty.csv");
        write_file(empty.string(), matrix_to_csv(Eigen::MatrixXd::Zero(10, 10)));
        const auto r = score_external(empty.string(), g);
        CHECK(r.equivalence_pass == 0);
        CHECK(r.families_recovered == 0.0);

        const auto small = scratch("small.csv");
        write_file(small.string(), matrix_to_csv(Eigen::MatrixXd::Zero(4, 4)));
        CHECK_THROWS_AS(score_external(small.string(), g), GraphError);
    }
    SUBCASE("every generator scores itself") {
        for (const char* name : {"gsyn_standin", "ieee33_loops", "fig1a", "chain_triangle", "random_block(9,2)"}) {
            const auto h = generate_graph(name, 3);
            CHECK(score_graph(h, h).equivalence_pass == 1);
        }
    }
}

TEST_CASE("run_sweep") {
    ExperimentConfig cfg;
    cfg.graph = "gsyn_standin";
    cfg.trials = 6;
    cfg.seed = 71;
    cfg.threads = 3;
    cfg.timing = false;
    SUBCASE("population recovery with and without noise") {
        for (double noise : {0.0, 5.0}) {
            cfg.noise_max = noise;
            for (const auto& r : run_sweep(cfg)) {
                CHECK(r.error.empty());
                CHECK(r.equivalence_pass == 1);
                CHECK(r.n_samples == 0);
            }
        }
    }
    SUBCASE("identical config gives identical bytes") {
        cfg.graph = "random_block(8,1)";
        std::ostringstream a, b;
        run_sweep(cfg, &a);
        cfg.threads = 1;
        run_sweep(cfg, &b);
        CHECK(a.str() == b.str());
        CHECK(a.str().rfind(trial_csv_header(), 0) == 0);
        const auto text = a.str();
        CHECK(std::count(text.begin(), text.end(), '\n') == cfg.trials + 1);
    }
    SUBCASE("finite mode records the sample size") {
        cfg.graph = "star(4)";
        cfg.n_samples = 500;
        cfg.trials = 2;
        for (const auto& r : run_sweep(cfg)) CHECK(r.n_samples == 500);
    }
    SUBCASE("per-trial failures are recorded") {
        cfg.graph = "chain(5)";
        cfg.synthesis.gamma_floor = 1e6;
        cfg.synthesis.max_attempts = 2;
        const auto recs = run_sweep(cfg);
        CHECK(recs.size() == 6);
        for (const auto& r : recs) CHECK(r.error.find("synthesis") == 0);
    }
    SUBCASE("invalid configs") {
        cfg.trials = 0;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        cfg.trials = 1;
        cfg.noise_max = -1.0;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    }
}

TEST_CASE("io") {
    SUBCASE("graph json") {
        const auto g = ieee33_loops();
        CHECK(graph_from_json(graph_to_json(g)) == g);
        CHECK(graph_to_json(chain(2)).find("\"p\": 2") != std::string::npos);
        UndirectedGraph sparse_ids;
        sparse_ids.add_edge(3, 7);
        CHECK(graph_from_json(graph_to_json(sparse_ids)) == sparse_ids);
        const std::string by_count = R"({"p": 3, "edges": [[1, 2], [2, 3]]})";
        const std::string no_edges = R"({"p": 3})";
        CHECK(graph_from_json(by_count) == chain(3));
        CHECK_THROWS_AS(graph_from_json("{"), IoError);
        CHECK_THROWS_AS(graph_from_json(no_edges), IoError);
    }
    SUBCASE("ast and distances") {
        const auto ast = build_ast(gsyn_standin());
        CHECK(ast_from_json(ast_to_json(ast)) == ast);
        const std::string path_ast = R"j({"parts": [[1], [2]], "edges": [[0, 1]], "articulation": [[0, 1, 1, 2]]})j";
        CHECK(ast_from_json(path_ast) == build_ast(chain(2)));
        const auto d = information_distances(covariance(synthesize_precision(star(4), 1)));
        const auto back = distances_from_json(distances_to_json(d));
        CHECK(back.labels() == d.labels());
        CHECK((back.matrix() - d.matrix()).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("config json") {
        const std::string text = R"j({"graph": "chain(8)", "samples": 1000, "trials": 3, "seed": 9, "xi": 0.1})j";
        const std::string typo = R"j({"grpah": "chain(8)"})j";
        const std::string no_trials = R"({"trials": 0})";
        auto c = config_from_json(text);
        CHECK(c.graph == "chain(8)");
        CHECK(c.n_samples == 1000u);
        CHECK(c.xi == 0.1);
        const auto again = config_from_json(config_to_json(c));
        CHECK(again.n_samples == c.n_samples);
        CHECK(again.seed == 9u);
        CHECK_THROWS_AS(config_from_json(typo), IoError);
        CHECK_THROWS_AS(config_from_json(no_trials), std::invalid_argument);
    }
    SUBCASE("csv rows") {
        TrialRecord r;
        r.trial_seed = 42;
        r.noise_max = 2.5;
        r.equivalence_pass = 1;
        r.families_recovered = 1.0;
        CHECK(trial_csv_row(r) == "42,2.500000,0,1,1.000000,0.000000,0.000000,0.000\n");
    }
    SUBCASE("matrices") {
        const auto m = read_matrix("a b\n1 2\n3 4\n");
        CHECK(m.rows() == 2);
        CHECK(m(1, 0) == 3.0);
        CHECK(read_matrix(matrix_to_csv(m)) == m);
        CHECK_THROWS_AS(read_matrix("1 2\n3\n"), IoError);
        CHECK_THROWS_AS(read_matrix("1 2\nx y\n"), IoError);
    }
}

TEST_SUITE_END();
