#include <chrono>

#include "nomad/nomad.hpp"

namespace nomad {

namespace {

void add_part(UndirectedGraph& h, const VertexSet& part) {
    std::vector<int> vs(part.begin(), part.end());
    if (vs.size() == 2) h.add_edge(vs[0], vs[1]);
    if (vs.size() > 2)
        for (std::size_t i = 0; i < vs.size(); ++i) h.add_edge(vs[i], vs[(i + 1) % vs.size()]);
}

}  // namespace

NomadOutput run_nomad(const DistanceMatrix& dist, const Tolerances& tol) {
    NomadOutput out;
    const auto& observed = dist.labels();
    for (int v : observed) {
        if (v <= 0) throw NomadError("run_nomad", "observed labels must be positive");
        out.graph.add_vertex(v);
    }
    if (observed.empty()) throw NomadError("run_nomad", "empty distance matrix");

    if (observed.size() < 3) {
        if (observed.size() == 2) out.graph.add_edge(observed[0], observed[1]);
        out.ast = build_ast(out.graph);
        return out;
    }

    auto& diag = out.diagnostics;
    auto anc = identify_ancestors(dist, tol, &diag);
    out.catalog = anc.catalog;
    if (out.catalog.a_obs.empty() && out.catalog.a_hid.empty()) {
        // No ancestors: the whole vertex set is one block.
        add_part(out.graph, out.graph.vertex_set());
        out.ast = build_ast(out.graph);
        return out;
    }
    out.clusters = learn_clusters(out.catalog, anc.ext, tol, &diag);
    auto pr = pale(out.clusters, out.catalog, anc.ext, observed, tol, &diag);
    out.noncut = pr.noncut;
    auto es = edge_set_ast(pr, out.clusters, out.catalog, anc.ext, tol, &diag);

    for (const auto& p : pr.parts) add_part(out.graph, p);
    for (const auto& b : es.cut_blocks) add_part(out.graph, b);
    for (const auto& e : pr.e_leaf)
        if (e.art_a != e.art_b) out.graph.add_edge(e.art_a, e.art_b);
    for (const auto& e : es.edges)
        if (e.art_a != e.art_b) out.graph.add_edge(e.art_a, e.art_b);
    if (!out.graph.connected()) throw NomadError("assemble", "recovered structure is disconnected");
    out.ast = build_ast(out.graph);
    return out;
}

NomadOutput run_nomad_samples(const Eigen::MatrixXd& data, const Tolerances& tol) {
    auto t0 = std::chrono::steady_clock::now();
    auto d = empirical_distances(data);
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    auto out = run_nomad(d, tol);
    out.diagnostics.stage_ms.insert(out.diagnostics.stage_ms.begin(), {"empirical_distances", ms});
    return out;
}

}  // namespace nomad
