#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nomad/experiments.hpp"
#include "nomad/identifiability.hpp"
#include "nomad/nomad.hpp"

namespace nomad {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// {"vertices": [...], "edges": [[u, v], ...]}
std::string graph_to_json(const UndirectedGraph& g);
UndirectedGraph graph_from_json(const std::string& text);

// {"parts": [[...]], "edges": [{"a", "b", "art_a", "art_b"}]}
std::string ast_to_json(const ArticulatedSetTree& ast);
ArticulatedSetTree ast_from_json(const std::string& text);

// {"labels": [...], "d": [[...]]}
std::string distances_to_json(const DistanceMatrix& d);
DistanceMatrix distances_from_json(const std::string& text);

std::string nomad_output_json(const NomadOutput& out);
std::string confounder_report_json(const ConfounderSplit& split, const ConfounderReport& report);

// Flat JSON mirror of the CLI flags.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);

std::string trial_csv_header();
std::string trial_csv_row(const TrialRecord& r);

// Rows of numbers separated by commas or whitespace; a first row that does
// not parse as numbers is skipped as a header.
Eigen::MatrixXd read_matrix(const std::string& text);
std::string matrix_to_csv(const Eigen::MatrixXd& m);

}  // namespace nomad
