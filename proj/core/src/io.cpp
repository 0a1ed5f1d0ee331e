#include "nomad/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nomad {

using nlohmann::json;

namespace {

json graph_json(const UndirectedGraph& g) {
    json e = json::array();
    for (auto [u, v] : g.edges()) e.push_back({u, v});
    const auto vs = g.vertices();
    bool dense = true;
    for (std::size_t i = 0; i < vs.size(); ++i) dense = dense && vs[i] == static_cast<int>(i) + 1;
    // ids other than 1..p need the explicit list
    if (dense) return {{"p", vs.size()}, {"edges", e}};
    return {{"vertices", vs}, {"edges", e}};
}

json ast_json(const ArticulatedSetTree& ast) {
    json parts = json::array(), edges = json::array(), art = json::array();
    for (const auto& p : ast.parts) parts.push_back(std::vector<int>(p.begin(), p.end()));
    for (const auto& e : ast.edges) {
        edges.push_back({e.a, e.b});
        art.push_back({e.a, e.b, e.art_a, e.art_b});
    }
    return {{"parts", parts}, {"edges", edges}, {"articulation", art}};
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<double> r(m.cols());
        for (Eigen::Index j = 0; j < m.cols(); ++j) r[j] = m(i, j);
        rows.push_back(r);
    }
    return rows;
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("invalid JSON: ") + e.what());
    }
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << content;
}

std::string graph_to_json(const UndirectedGraph& g) { return graph_json(g).dump(2); }

UndirectedGraph graph_from_json(const std::string& text) {
    auto j = parse(text);
    try {
        UndirectedGraph g;
        if (j.contains("vertices"))
            for (int v : j.at("vertices")) g.add_vertex(v);
        else if (j.contains("p"))
            g = UndirectedGraph::with_vertices(1, j.at("p").get<int>());
        for (const auto& e : j.at("edges")) g.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
        return g;
    } catch (const json::exception& e) {
        throw IoError(std::string("bad graph JSON: ") + e.what());
    }
}

std::string ast_to_json(const ArticulatedSetTree& ast) { return ast_json(ast).dump(2); }

ArticulatedSetTree ast_from_json(const std::string& text) {
    auto j = parse(text);
    try {
        ArticulatedSetTree ast;
        for (const auto& p : j.at("parts")) {
            auto v = p.get<std::vector<int>>();
            ast.parts.emplace_back(v.begin(), v.end());
        }
        // the articulation rows carry the edge endpoints too
        for (const auto& a : j.at("articulation"))
            ast.edges.push_back({a.at(0), a.at(1), a.at(2), a.at(3)});
        if (ast.edges.size() != j.at("edges").size()) throw IoError("edges and articulation differ in length");
        return ast;
    } catch (const json::exception& e) {
        throw IoError(std::string("bad AST JSON: ") + e.what());
    }
}

std::string distances_to_json(const DistanceMatrix& d) {
    return json{{"labels", d.labels()}, {"d", matrix_json(d.matrix())}}.dump(2);
}

DistanceMatrix distances_from_json(const std::string& text) {
    auto j = parse(text);
    try {
        auto labels = j.at("labels").get<std::vector<int>>();
        const auto n = static_cast<Eigen::Index>(labels.size());
        Eigen::MatrixXd m(n, n);
        const auto& rows = j.at("d");
        if (rows.size() != labels.size()) throw IoError("distance matrix size does not match labels");
        for (Eigen::Index i = 0; i < n; ++i) {
            if (rows[i].size() != labels.size()) throw IoError("distance matrix is not square");
            for (Eigen::Index j2 = 0; j2 < n; ++j2) m(i, j2) = rows[i][j2].get<double>();
        }
        return {labels, m};
    } catch (const json::exception& e) {
        throw IoError(std::string("bad distance JSON: ") + e.what());
    }
}

std::string nomad_output_json(const NomadOutput& out) {
    const auto& dg = out.diagnostics;
    json stages = json::object();
    for (const auto& [name, ms] : dg.stage_ms) stages[name] = ms;
    json modes = json::array();
    for (const auto& m : dg.hidden_modes)
        modes.push_back({{"p", m.p}, {"q", m.q}, {"value", m.mode.value}, {"group_size", m.mode.group_size}});
    json leaf = json::array(), internal = json::array();
    for (const auto& l : out.clusters.leaf) {
        json e{{"ancestor", l.l1}, {"members", std::vector<int>(l.l2.begin(), l.l2.end())}};
        if (l.l3) e["articulation"] = *l.l3;
        leaf.push_back(e);
    }
    for (const auto& c : out.clusters.internal)
        internal.push_back({{"ancestors", std::vector<int>(c.i1.begin(), c.i1.end())},
                            {"members", std::vector<int>(c.i2.begin(), c.i2.end())}});
    json j{{"ast", ast_json(out.ast)},
           {"graph", graph_json(out.graph)},
           {"observed_ancestors", std::vector<int>(out.catalog.a_obs.begin(), out.catalog.a_obs.end())},
           {"hidden_ancestors", out.catalog.a_hid},
           {"leaf_clusters", leaf},
           {"internal_clusters", internal},
           {"diagnostics",
            {{"notes", dg.notes},
             {"stage_ms", stages},
             {"collection_sizes", dg.collection_sizes},
             {"hidden_modes", modes},
             {"dropped_uncovered", dg.dropped_uncovered},
             {"steiner_points", dg.steiner_points}}}};
    return j.dump(2);
}

std::string confounder_report_json(const ConfounderSplit& split, const ConfounderReport& r) {
    auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    json j{{"block", std::vector<int>(split.block.begin(), split.block.end())},
           {"block_cut", std::vector<int>(split.block_cut.begin(), split.block_cut.end())},
           {"leaf_precondition", split.leaf_precondition},
           {"d", vec(split.d)},
           {"d1", vec(split.d1)},
           {"d_q", vec(split.d_q)},
           {"sigma_q_pd", r.sigma_q_pd},
           {"decomposition_error", r.decomposition_error},
           {"outside_deviation", r.outside_deviation},
           {"h_in_class", r.h_in_class},
           {"h_differs", r.h_differs},
           {"h", graph_json(r.h)},
           {"sigma_star", matrix_json(split.sigma_star)},
           {"sigma_q", matrix_json(split.sigma_q)},
           {"k_star", matrix_json(r.k_star)},
           {"k_q", matrix_json(r.k_q)}};
    return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
    auto j = parse(text);
    ExperimentConfig c;
    try {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const auto& k = it.key();
            const auto& v = it.value();
            if (k == "graph") c.graph = v.get<std::string>();
            else if (k == "graph_file") c.graph_file = v.get<std::string>();
            else if (k == "noise_max") c.noise_max = v.get<double>();
            else if (k == "samples") c.n_samples = v.is_null() ? std::nullopt : std::optional<std::size_t>(v.get<std::size_t>());
            else if (k == "population") { if (v.get<bool>()) c.n_samples.reset(); }
            else if (k == "trials") c.trials = v.get<int>();
            else if (k == "seed") c.seed = v.get<std::uint64_t>();
            else if (k == "xi") c.xi = v.get<double>();
            else if (k == "eps_d") c.eps_d = v.get<double>();
            else if (k == "sep_tol") c.sep_tol = v.get<double>();
            else if (k == "out") c.output_dir = v.get<std::string>();
            else if (k == "threads") c.threads = v.get<int>();
            else if (k == "timing") c.timing = v.get<bool>();
            else if (k == "gamma_floor") c.synthesis.gamma_floor = v.get<double>();
            else if (k == "zeta_floor") c.synthesis.zeta_floor = v.get<double>();
            else if (k == "max_attempts") c.synthesis.max_attempts = v.get<int>();
            else throw IoError("unknown config key: " + k);
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("bad config JSON: ") + e.what());
    }
    c.validate();
    return c;
}

std::string config_to_json(const ExperimentConfig& c) {
    json j{{"graph", c.graph},
           {"noise_max", c.noise_max},
           {"trials", c.trials},
           {"seed", c.seed},
           {"out", c.output_dir},
           {"threads", c.threads},
           {"timing", c.timing},
           {"gamma_floor", c.synthesis.gamma_floor},
           {"zeta_floor", c.synthesis.zeta_floor},
           {"max_attempts", c.synthesis.max_attempts}};
    if (!c.graph_file.empty()) j["graph_file"] = c.graph_file;
    if (c.n_samples) j["samples"] = *c.n_samples;
    else j["population"] = true;
    if (c.xi) j["xi"] = *c.xi;
    if (c.eps_d) j["eps_d"] = *c.eps_d;
    if (c.sep_tol) j["sep_tol"] = *c.sep_tol;
    return j.dump(2);
}

std::string trial_csv_header() {
    return "trial_seed,noise_max,n_samples,equivalence_pass,families_recovered,noncut_recovered,k_recovered,"
           "runtime_ms\n";
}

std::string trial_csv_row(const TrialRecord& r) {
    return std::to_string(r.trial_seed) + "," + fmt("%.6f", r.noise_max) + "," + std::to_string(r.n_samples) + "," +
           std::to_string(r.equivalence_pass) + "," + fmt("%.6f", r.families_recovered) + "," +
           fmt("%.6f", r.noncut_recovered) + "," + fmt("%.6f", r.k_recovered) + "," + fmt("%.3f", r.runtime_ms) +
           "\n";
}

Eigen::MatrixXd read_matrix(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        for (char& ch : line)
            if (ch == ',' || ch == ';' || ch == '\t' || ch == '\r') ch = ' ';
        std::istringstream ls(line);
        std::vector<double> r;
        std::string tok;
        bool numeric = true;
        while (ls >> tok) {
            try {
                std::size_t used = 0;
                r.push_back(std::stod(tok, &used));
                numeric = numeric && used == tok.size();
            } catch (const std::exception&) {
                numeric = false;
            }
        }
        if (r.empty() && numeric) continue;  // blank line
        if (!numeric) {
            if (first) {
                first = false;
                continue;
            }
            throw IoError("non-numeric entry in matrix row " + std::to_string(rows.size() + 1));
        }
        first = false;
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw IoError("empty matrix");
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size()) throw IoError("ragged matrix");
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

std::string matrix_to_csv(const Eigen::MatrixXd& m) {
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out += ',';
            out += fmt("%.17g", m(i, j));
        }
        out += '\n';
    }
    return out;
}

}  // namespace nomad
