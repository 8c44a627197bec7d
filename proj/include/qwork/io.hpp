#pragma once

#include "qwork/distributions.hpp"
#include "qwork/fluctuation.hpp"
#include "qwork/pointer.hpp"
#include "qwork/protocol.hpp"
#include "qwork/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qwork {

// Matrices serialize as nested arrays; every entry is [re, im] (a plain
// number is accepted on input as a real entry).
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j, const std::string& where);

struct OutputSpec {
  int grid_points = 2001;
  double n_sigma = 8.0;
  std::string format = "csv"; // csv | json
  std::string path;           // base name; empty -> command default
};

// Log-spaced imprecision sweep for the average-work command.
struct SweepSpec {
  double from = 1e-6;
  double to = 1e4;
  int points = 101;
};

// Convenience parameters of the two-level instantaneous-switch example; kept
// around so outputs can be reported in units of eps_i.
struct TwoLevelSpec {
  double p = 0.0;
  Complex q{0.0, 0.0};
  double eps_i = 1.0;
  double eps_f = 2.0;
};

struct ExperimentConfig {
  Matrix h_initial;
  Matrix h_final;
  Matrix initial_state;
  std::optional<Matrix> explicit_propagator;
  std::optional<Schedule> schedule;
  std::optional<double> beta;
  std::optional<TwoLevelSpec> two_level;
  std::optional<GaussianPointer> pointer;
  std::optional<Scheme> scheme;
  OutputSpec output;
  SweepSpec sweep;

  // Assembles the protocol: a schedule wins over an explicit propagator,
  // which wins over the sudden-switch default (identity propagator).
  Protocol protocol() const;
  // Pointer from the config; throws naming the missing field if absent.
  const GaussianPointer& require_pointer() const;
  double require_beta() const;
};

ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& file);

// All writers go through a temp file in the target directory followed by an
// atomic rename, so readers never observe partial files.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);
void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& j);

// Two-column CSV with a header row; values printed with %.17g so outputs are
// byte-stable across runs.
std::string two_column_csv(const std::string& header, const std::vector<double>& a,
                           const std::vector<double>& b);
void write_csv_atomic(const std::filesystem::path& path, const std::string& header,
                      const std::vector<double>& a, const std::vector<double>& b);

// Run metadata next to a data file ("<file>.meta.json"). The timestamp lives
// only here, keeping the data files themselves reproducible byte-for-byte.
void write_sidecar(const std::filesystem::path& data_file, nlohmann::json metadata);

nlohmann::json distribution_to_json(const GaussianMixture& dist);
nlohmann::json distribution_to_json(const AtomDistribution& dist);
nlohmann::json report_to_json(const RelationReport& report);

std::string format_double(double v);

} // namespace qwork
