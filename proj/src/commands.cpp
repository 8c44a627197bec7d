#include "qwork/commands.hpp"

#include "qwork/distributions.hpp"
#include "qwork/fluctuation.hpp"
#include "qwork/grid_oracle.hpp"
#include "qwork/spectral.hpp"
#include "qwork/states.hpp"
#include "qwork/two_level.hpp"

#include <cmath>
#include <future>
#include <iostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace qwork {

namespace {

using nlohmann::json;

struct Curve {
  std::vector<double> w;
  std::vector<double> pdf;
};

// Samples a mixture on its own grid; `energy_unit` rescales the axis (work in
// multiples of the unit, density multiplied by it so mass is preserved).
Curve sample_curve(const GaussianMixture& dist, const OutputSpec& out,
                   double energy_unit = 1.0) {
  Curve c;
  const std::vector<double> grid = evaluation_grid(dist, out.grid_points, out.n_sigma);
  c.w.reserve(grid.size());
  c.pdf.reserve(grid.size());
  for (double w : grid) {
    c.w.push_back(w / energy_unit);
    c.pdf.push_back(dist.evaluate(w) * energy_unit);
  }
  return c;
}

// Samples a mixture on somebody else's (already rescaled) grid.
Curve sample_on(const GaussianMixture& dist, const std::vector<double>& w_scaled,
                double energy_unit) {
  Curve c;
  c.w = w_scaled;
  c.pdf.reserve(w_scaled.size());
  for (double w : w_scaled) {
    c.pdf.push_back(dist.evaluate(w * energy_unit) * energy_unit);
  }
  return c;
}

json base_metadata(const char* command, const CommandContext& ctx) {
  return json{{"command", command}, {"config", ctx.config_path}};
}

void emit_curve(const std::filesystem::path& dir, const std::string& name,
                const Curve& c, const ExperimentConfig& cfg, json metadata,
                const GaussianMixture* mirror = nullptr) {
  const std::filesystem::path file = dir / (name + ".csv");
  write_csv_atomic(file, "w,pdf", c.w, c.pdf);
  if (mirror != nullptr && cfg.output.format == "json") {
    write_json_atomic(dir / (name + ".json"), distribution_to_json(*mirror));
  }
  write_sidecar(file, std::move(metadata));
}

std::vector<double> log_spaced(double from, double to, int points) {
  std::vector<double> v(points);
  const double lg0 = std::log10(from);
  const double lg1 = std::log10(to);
  for (int i = 0; i < points; ++i) {
    v[i] = std::pow(10.0, lg0 + (lg1 - lg0) * i / (points - 1));
  }
  return v;
}

// Mean work across a pure-pointer imprecision sweep, chunked across threads.
std::vector<double> sweep_means(const Protocol& protocol, const Matrix& rho,
                                const std::vector<double>& sigma2, double kappa,
                                double hbar) {
  std::vector<double> means(sigma2.size());
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t chunk = (sigma2.size() + hw - 1) / hw;
  std::vector<std::future<void>> jobs;
  for (std::size_t begin = 0; begin < sigma2.size(); begin += chunk) {
    const std::size_t end = std::min(begin + chunk, sigma2.size());
    jobs.push_back(std::async(std::launch::async, [&, begin, end] {
      for (std::size_t i = begin; i < end; ++i) {
        means[i] = mean_work(protocol,
                             GaussianPointer::pure(sigma2[i], kappa, hbar), rho);
      }
    }));
  }
  for (auto& j : jobs) j.get();
  return means;
}

struct CheckLine {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

void print_check(const CheckLine& c) {
  std::cout << c.name << ": value=" << format_double(c.value)
            << " threshold=" << format_double(c.threshold)
            << (c.pass ? " PASS" : " FAIL") << "\n";
}

} // namespace

int cmd_spin_quench(const ExperimentConfig& cfg, const CommandContext& ctx) {
  if (!cfg.two_level.has_value()) {
    throw std::invalid_argument(
        "config error at system.two_level: spin-quench needs the two_level form");
  }
  const TwoLevelSpec tl = *cfg.two_level;
  const double unit = tl.eps_i;
  const double unit2 = unit * unit;
  const double q_max = std::sqrt(tl.p * (1.0 - tl.p));
  const Protocol protocol = cfg.protocol();
  const double kappa = cfg.pointer.has_value() ? cfg.pointer->kappa() : 1.0;
  const double hbar = cfg.pointer.has_value() ? cfg.pointer->hbar() : 1.0;

  const AtomDistribution projective =
      pem_work_pdf(protocol, two_level_state(tl.p, 0.0));
  json lines = json::array();
  for (const Atom& a : projective.atoms()) lines.push_back(a.w / unit);

  // Work pdfs at fixed coherence, narrow to broad readout.
  struct PdfCase {
    const char* name;
    double q_scale;
    double sigma2;
  };
  const PdfCase pdf_cases[] = {
      {"pdf_q_zero_sigma2_0.01", 0.0, 0.01}, {"pdf_q_zero_sigma2_0.1", 0.0, 0.1},
      {"pdf_q_zero_sigma2_1", 0.0, 1.0},     {"pdf_q_plus_sigma2_0.1", 1.0, 0.1},
      {"pdf_q_minus_sigma2_0.1", -1.0, 0.1},
  };
  for (const PdfCase& pc : pdf_cases) {
    const Matrix rho = two_level_state(tl.p, pc.q_scale * q_max);
    const GaussianPointer ptr = GaussianPointer::pure(pc.sigma2 * unit2, kappa, hbar);
    const GaussianMixture dist = work_meter_pdf(protocol, ptr, rho);
    json meta = base_metadata("spin-quench", ctx);
    meta["dataset"] = "work pdf";
    meta["energy_unit"] = "eps_i";
    meta["q_over_q_max"] = pc.q_scale;
    meta["sigma_e2_over_eps_i2"] = pc.sigma2;
    meta["projective_work_values_over_eps_i"] = lines;
    emit_curve(ctx.out_dir, pc.name, sample_curve(dist, cfg.output, unit), cfg,
               std::move(meta), &dist);
  }

  // Mean work versus imprecision for five coherence settings.
  const std::vector<double> sigma2 =
      log_spaced(cfg.sweep.from * unit2, cfg.sweep.to * unit2, cfg.sweep.points);
  struct SweepCase {
    const char* name;
    double q_scale;
  };
  const SweepCase sweep_cases[] = {{"mean_vs_sigma2_q_plus", 1.0},
                                   {"mean_vs_sigma2_q_plus_half", 0.5},
                                   {"mean_vs_sigma2_q_zero", 0.0},
                                   {"mean_vs_sigma2_q_minus_half", -0.5},
                                   {"mean_vs_sigma2_q_minus", -1.0}};
  std::vector<std::future<std::vector<double>>> sweep_jobs;
  for (const SweepCase& sc : sweep_cases) {
    sweep_jobs.push_back(std::async(std::launch::async, [&, sc] {
      const Matrix rho = two_level_state(tl.p, sc.q_scale * q_max);
      std::vector<double> means(sigma2.size());
      for (std::size_t i = 0; i < sigma2.size(); ++i) {
        means[i] =
            mean_work(protocol, GaussianPointer::pure(sigma2[i], kappa, hbar), rho) /
            unit;
      }
      return means;
    }));
  }
  for (std::size_t s = 0; s < sweep_jobs.size(); ++s) {
    const SweepCase& sc = sweep_cases[s];
    const std::vector<double> means = sweep_jobs[s].get();
    std::vector<double> axis(sigma2.size());
    for (std::size_t i = 0; i < sigma2.size(); ++i) axis[i] = sigma2[i] / unit2;
    const Matrix rho = two_level_state(tl.p, sc.q_scale * q_max);
    const std::filesystem::path file = ctx.out_dir / (std::string(sc.name) + ".csv");
    write_csv_atomic(file, "sigma_e2,mean_work", axis, means);
    json meta = base_metadata("spin-quench", ctx);
    meta["dataset"] = "mean work vs imprecision";
    meta["energy_unit"] = "eps_i";
    meta["q_over_q_max"] = sc.q_scale;
    meta["asymptote_sigma2_to_0"] = pem_work_pdf(protocol, rho).mean() / unit;
    meta["asymptote_sigma2_to_inf"] = untouched_average_work(protocol, rho) / unit;
    write_sidecar(file, std::move(meta));
  }

  // Exact pdf against its imprecise limit at two broad readout widths.
  for (const double s2 : {1.0, 2.0}) {
    const Matrix rho = two_level_state(tl.p, q_max);
    const GaussianPointer ptr = GaussianPointer::pure(s2 * unit2, kappa, hbar);
    const GaussianMixture exact = work_meter_pdf(protocol, ptr, rho);
    const GaussianMixture limit = imprecise_limit_pdf(protocol, ptr, rho);
    const Curve exact_curve = sample_curve(exact, cfg.output, unit);
    const Curve limit_curve = sample_on(limit, exact_curve.w, unit);
    const std::string tag = (s2 == 1.0) ? "1" : "2";
    json meta = base_metadata("spin-quench", ctx);
    meta["dataset"] = "exact vs imprecise limit";
    meta["energy_unit"] = "eps_i";
    meta["q_over_q_max"] = 1.0;
    meta["sigma_e2_over_eps_i2"] = s2;
    json meta_limit = meta;
    emit_curve(ctx.out_dir, "pdf_exact_sigma2_" + tag, exact_curve, cfg,
               std::move(meta), &exact);
    emit_curve(ctx.out_dir, "pdf_imprecise_sigma2_" + tag, limit_curve, cfg,
               std::move(meta_limit), &limit);
  }
  std::cout << "spin-quench: wrote figure datasets to " << ctx.out_dir.string()
            << "\n";
  return 0;
}

int cmd_work_pdf(const ExperimentConfig& cfg, const CommandContext& ctx) {
  if (!cfg.scheme.has_value()) {
    throw std::invalid_argument("config error at scheme: work-pdf needs a scheme");
  }
  const Protocol protocol = cfg.protocol();
  const Matrix& rho = cfg.initial_state;
  const std::string base =
      cfg.output.path.empty() ? std::string("work_pdf") : cfg.output.path;
  json meta = base_metadata("work-pdf", ctx);
  meta["scheme"] = scheme_name(*cfg.scheme);

  switch (*cfg.scheme) {
    case Scheme::pem:
    case Scheme::tmh: {
      const AtomDistribution dist = (*cfg.scheme == Scheme::pem)
                                        ? pem_work_pdf(protocol, rho)
                                        : tmh_quasi_pdf(protocol, rho);
      std::vector<double> w, weight;
      for (const Atom& a : dist.atoms()) {
        w.push_back(a.w);
        weight.push_back(a.weight);
      }
      const std::filesystem::path file = ctx.out_dir / (base + ".csv");
      write_csv_atomic(file, "w,weight", w, weight);
      if (cfg.output.format == "json") {
        write_json_atomic(ctx.out_dir / (base + ".json"), distribution_to_json(dist));
      }
      meta["signed"] = dist.is_signed();
      write_sidecar(file, std::move(meta));
      break;
    }
    case Scheme::work_meter:
    case Scheme::two_gaussian:
    case Scheme::imprecise_limit: {
      const GaussianPointer& ptr = cfg.require_pointer();
      const GaussianMixture dist =
          (*cfg.scheme == Scheme::work_meter)
              ? work_meter_pdf(protocol, ptr, rho)
              : (*cfg.scheme == Scheme::two_gaussian)
                    ? two_gaussian_work_pdf(protocol, ptr, rho)
                    : imprecise_limit_pdf(protocol, ptr, rho);
      meta["sigma_e2"] = ptr.sigma_e2();
      meta["sigma_nd2"] = ptr.sigma_nd2();
      emit_curve(ctx.out_dir, base, sample_curve(dist, cfg.output), cfg,
                 std::move(meta), &dist);
      break;
    }
    case Scheme::broad_gaussian:
      throw std::invalid_argument(
          "config error at scheme: broad_gaussian is not a CLI scheme");
  }
  std::cout << "work-pdf: wrote " << (ctx.out_dir / base).string() << ".csv\n";
  return 0;
}

int cmd_average_sweep(const ExperimentConfig& cfg, const CommandContext& ctx) {
  const Protocol protocol = cfg.protocol();
  const Matrix& rho = cfg.initial_state;
  const double kappa = cfg.pointer.has_value() ? cfg.pointer->kappa() : 1.0;
  const double hbar = cfg.pointer.has_value() ? cfg.pointer->hbar() : 1.0;
  const std::vector<double> sigma2 =
      log_spaced(cfg.sweep.from, cfg.sweep.to, cfg.sweep.points);
  const std::vector<double> means = sweep_means(protocol, rho, sigma2, kappa, hbar);

  const std::string base =
      cfg.output.path.empty() ? std::string("average_sweep") : cfg.output.path;
  const std::filesystem::path file = ctx.out_dir / (base + ".csv");
  write_csv_atomic(file, "sigma_e2,mean_work", sigma2, means);
  json meta = base_metadata("average-sweep", ctx);
  meta["asymptote_sigma2_to_0"] = pem_work_pdf(protocol, rho).mean();
  meta["asymptote_sigma2_to_inf"] = untouched_average_work(protocol, rho);
  write_sidecar(file, std::move(meta));
  std::cout << "average-sweep: wrote " << file.string() << "\n";
  return 0;
}

int cmd_verify(const ExperimentConfig& cfg, const CommandContext& ctx,
               std::optional<double> inject_perturbation) {
  const Protocol protocol = cfg.protocol();
  const double beta = cfg.beta.value_or(1.0);
  const GaussianPointer& ptr = cfg.require_pointer();
  const double sigma_e2 = ptr.sigma_e2();

  ProcessPair pair =
      make_process_pair(protocol, canonical_state(protocol.h_initial, beta), beta);
  if (inject_perturbation.has_value()) {
    pair.delta_f += *inject_perturbation;
  }

  std::vector<CheckLine> lines;
  json checks = json::array();
  const auto add_report = [&](const RelationReport& r) {
    lines.push_back({r.relation, r.max_violation, r.threshold, r.pass});
    checks.push_back(report_to_json(r));
  };

  add_report(crooks_check(pair));
  add_report(modified_crooks_check(pair, sigma_e2));
  add_report(modified_crooks_check_two_gaussian(pair, sigma_e2));

  const JarzynskiResult jz =
      modified_jarzynski(protocol, ptr, pair.forward_state, beta);
  {
    // The negative control offsets delta_f; fold it into the compared side so
    // the deliberate perturbation is visible here too.
    const double offset = inject_perturbation.value_or(0.0);
    const double deviation =
        std::abs(std::expm1(jz.log_lhs - (jz.log_rhs - beta * offset)));
    CheckLine c{"modified_jarzynski", deviation, 1e-10, deviation <= 1e-10};
    lines.push_back(c);
    checks.push_back(json{{"relation", "modified_jarzynski"},
                          {"lhs", jz.lhs},
                          {"rhs", jz.rhs},
                          {"ratio_deviation", deviation},
                          {"threshold", 1e-10},
                          {"pass", c.pass}});
  }

  {
    const PointerGrid grid = make_pointer_grid(ptr, protocol, 1 << 13);
    const SampledDensity oracle =
        simulate_work_meter(protocol, ptr, cfg.initial_state, grid);
    const GaussianMixture analytic = work_meter_pdf(protocol, ptr, cfg.initial_state);
    const double l1 =
        l1_distance(oracle, [&](double w) { return analytic.evaluate(w); });
    CheckLine c{"oracle_work_meter_l1", l1, 1e-6, l1 <= 1e-6};
    lines.push_back(c);
    checks.push_back(json{{"relation", "oracle_work_meter_l1"},
                          {"max_violation", l1},
                          {"grid_points", grid.n_points},
                          {"threshold", 1e-6},
                          {"pass", c.pass}});
  }

  const ResolutionReport res = resolution_check(
      spectral_decompose(protocol.h_initial), spectral_decompose(protocol.h_final),
      ptr, &cfg.initial_state);

  bool all_pass = true;
  for (const CheckLine& c : lines) {
    print_check(c);
    all_pass = all_pass && c.pass;
  }

  json report{{"checks", std::move(checks)},
              {"beta", beta},
              {"sigma_e2", sigma_e2},
              {"injected_perturbation", inject_perturbation.value_or(0.0)},
              {"all_pass", all_pass},
              {"resolution",
               {{"coherence_margin", res.coherence_margin},
                {"separation_margin", res.separation_margin},
                {"smearing_margin", res.smearing_margin},
                {"accurate_verdict", res.accurate_verdict},
                {"imprecise_verdict", res.imprecise_verdict}}}};
  const std::filesystem::path file = ctx.out_dir / "verify_report.json";
  write_json_atomic(file, report);
  write_sidecar(file, base_metadata("verify", ctx));
  std::cout << (all_pass ? "verify: all checks passed"
                         : "verify: at least one check FAILED")
            << " (report " << file.string() << ")\n";
  return all_pass ? 0 : 1;
}

int cmd_oracle_compare(const ExperimentConfig& cfg, const CommandContext& ctx) {
  const Protocol protocol = cfg.protocol();
  const GaussianPointer& ptr = cfg.require_pointer();
  const Matrix& rho = cfg.initial_state;
  const PointerGrid grid = make_pointer_grid(ptr, protocol, 1 << 14);

  const bool run_wm =
      !cfg.scheme.has_value() || *cfg.scheme == Scheme::work_meter;
  const bool run_tg =
      !cfg.scheme.has_value() || *cfg.scheme == Scheme::two_gaussian;
  if (!run_wm && !run_tg) {
    throw std::invalid_argument(
        "config error at scheme: oracle-compare supports work_meter and "
        "two_gaussian only");
  }

  bool all_pass = true;
  json report{{"threshold", 1e-6}, {"grid_points", grid.n_points}};
  const auto compare = [&](const char* name, const SampledDensity& oracle,
                           const GaussianMixture& analytic) {
    const double l1 =
        l1_distance(oracle, [&](double w) { return analytic.evaluate(w); });
    const bool pass = l1 <= 1e-6;
    all_pass = all_pass && pass;
    report[name] = json{{"l1", l1}, {"pass", pass}, {"mass", oracle.mass}};
    print_check({std::string(name) + "_l1", l1, 1e-6, pass});
    const std::string base = std::string("oracle_") + name;
    write_csv_atomic(ctx.out_dir / (base + ".csv"), "w,pdf", oracle.w, oracle.pdf);
    Curve fit;
    fit.w = oracle.w;
    for (double w : oracle.w) fit.pdf.push_back(analytic.evaluate(w));
    write_csv_atomic(ctx.out_dir / ("analytic_" + std::string(name) + ".csv"),
                     "w,pdf", fit.w, fit.pdf);
  };

  if (run_wm) {
    compare("work_meter", simulate_work_meter(protocol, ptr, rho, grid),
            work_meter_pdf(protocol, ptr, rho));
  }
  if (run_tg) {
    compare("two_gaussian", simulate_two_measurements(protocol, ptr, rho, grid),
            two_gaussian_work_pdf(protocol, ptr, rho));
  }

  const std::filesystem::path file = ctx.out_dir / "oracle_report.json";
  report["all_pass"] = all_pass;
  write_json_atomic(file, report);
  write_sidecar(file, base_metadata("oracle-compare", ctx));
  return all_pass ? 0 : 1;
}

} // namespace qwork
