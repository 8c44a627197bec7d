#include "qwork/commands.hpp"
#include "qwork/io.hpp"

#include <CLI11.hpp>

#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct CommonArgs {
  std::string config;
  std::string out_dir = ".";
  int seed = 0; // reserved; the pipeline is deterministic and ignores it
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "JSON experiment config")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir, "output directory (created if missing)")
      ->required();
  cmd->add_option("--seed", args.seed,
                  "reserved for future stochastic features; ignored");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"work-measurement toolkit: figure data, work pdfs, and "
               "fluctuation-relation verification for finite quantum systems"};
  app.require_subcommand(1);

  CommonArgs spin, pdf, sweep, verify, oracle;
  std::optional<double> inject;

  CLI::App* spin_cmd = app.add_subcommand(
      "spin-quench", "two-level instantaneous-switch figure datasets");
  add_common(spin_cmd, spin);
  CLI::App* pdf_cmd =
      app.add_subcommand("work-pdf", "work distribution of the configured scheme");
  add_common(pdf_cmd, pdf);
  CLI::App* sweep_cmd = app.add_subcommand(
      "average-sweep", "mean work across a readout-imprecision sweep");
  add_common(sweep_cmd, sweep);
  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "fluctuation relations, resolution margins, oracle cross-check");
  add_common(verify_cmd, verify);
  double inject_value = 0.0;
  CLI::Option* inject_opt = verify_cmd->add_option(
      "--inject-perturbation", inject_value,
      "offset the free-energy difference by this amount; the checks must fail "
      "(negative control)");
  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle-compare", "grid simulator vs analytic densities");
  add_common(oracle_cmd, oracle);

  CLI11_PARSE(app, argc, argv);

  try {
    const auto run = [&](const CommonArgs& args, auto&& fn) {
      std::filesystem::create_directories(args.out_dir);
      qwork::ExperimentConfig cfg = qwork::load_experiment_config(args.config);
      qwork::CommandContext ctx{args.out_dir, args.config};
      return fn(cfg, ctx);
    };
    if (spin_cmd->parsed()) {
      return run(spin, [](const auto& c, const auto& x) {
        return qwork::cmd_spin_quench(c, x);
      });
    }
    if (pdf_cmd->parsed()) {
      return run(pdf, [](const auto& c, const auto& x) {
        return qwork::cmd_work_pdf(c, x);
      });
    }
    if (sweep_cmd->parsed()) {
      return run(sweep, [](const auto& c, const auto& x) {
        return qwork::cmd_average_sweep(c, x);
      });
    }
    if (verify_cmd->parsed()) {
      if (inject_opt->count() > 0) inject = inject_value;
      return run(verify, [&](const auto& c, const auto& x) {
        return qwork::cmd_verify(c, x, inject);
      });
    }
    if (oracle_cmd->parsed()) {
      return run(oracle, [](const auto& c, const auto& x) {
        return qwork::cmd_oracle_compare(c, x);
      });
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
