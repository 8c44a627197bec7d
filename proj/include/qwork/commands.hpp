#pragma once

#include "qwork/io.hpp"

#include <filesystem>
#include <optional>

namespace qwork {

struct CommandContext {
  std::filesystem::path out_dir;
  std::string config_path;
};

// Figure-reproduction datasets of the two-level instantaneous switch (work
// pdfs, mean-work sweep, imprecise-limit comparison). Requires the two_level
// config form; q grids are derived from the configured ground population.
int cmd_spin_quench(const ExperimentConfig& cfg, const CommandContext& ctx);

// Work distribution of the configured scheme on the configured system.
int cmd_work_pdf(const ExperimentConfig& cfg, const CommandContext& ctx);

// Mean work versus measurement imprecision, dispatched concurrently.
int cmd_average_sweep(const ExperimentConfig& cfg, const CommandContext& ctx);

// Fluctuation-relation and oracle checks; nonzero exit on any failed
// tolerance. `inject_perturbation` deliberately offsets the free-energy
// difference to demonstrate the checks are sensitive (negative control).
int cmd_verify(const ExperimentConfig& cfg, const CommandContext& ctx,
               std::optional<double> inject_perturbation);

// Grid-simulator versus analytic densities for both measurement schemes.
int cmd_oracle_compare(const ExperimentConfig& cfg, const CommandContext& ctx);

} // namespace qwork
