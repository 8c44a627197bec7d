#include "qwork/io.hpp"

#include "qwork/states.hpp"
#include "qwork/two_level.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>
#include <utility>

namespace qwork {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument("config error at " + where + ": " + what);
}

const json& require_key(const json& j, const std::string& where, const char* key) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where + "." + key, "missing required field");
  return *it;
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

double number_field(const json& j, const std::string& where, const char* key) {
  return as_number(require_key(j, where, key), where + "." + key);
}

double number_field_or(const json& j, const std::string& where, const char* key,
                       double fallback) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  return as_number(*it, where + "." + key);
}

std::string string_field(const json& j, const std::string& where, const char* key) {
  const json& v = require_key(j, where, key);
  if (!v.is_string()) fail(where + "." + key, "expected a string");
  return v.get<std::string>();
}

Complex entry_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return Complex(j[0].get<double>(), j[1].get<double>());
  }
  fail(where, "expected a number or a [re, im] pair");
}

Scheme scheme_from_string(const std::string& name, const std::string& where) {
  if (name == "pem") return Scheme::pem;
  if (name == "work_meter") return Scheme::work_meter;
  if (name == "two_gaussian") return Scheme::two_gaussian;
  if (name == "imprecise") return Scheme::imprecise_limit;
  if (name == "tmh") return Scheme::tmh;
  fail(where, "unknown scheme '" + name +
                  "' (expected pem | two_gaussian | work_meter | imprecise | tmh)");
}

GaussianPointer pointer_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  const double kappa = number_field_or(j, where, "kappa", 1.0);
  const double hbar = number_field_or(j, where, "hbar", 1.0);
  if (j.contains("sigma_e2")) {
    if (j.contains("purity")) {
      const std::string purity = string_field(j, where, "purity");
      if (purity != "pure") {
        fail(where + ".purity",
             "sigma_e2 shorthand only supports \"pure\"; give var_x/var_p/sym_xp "
             "explicitly for mixed pointers");
      }
    }
    return GaussianPointer::pure(number_field(j, where, "sigma_e2"), kappa, hbar);
  }
  const double var_x = number_field(j, where, "var_x");
  const double var_p = number_field(j, where, "var_p");
  const double sym_xp = number_field_or(j, where, "sym_xp", 0.0);
  return GaussianPointer(var_x, var_p, sym_xp, kappa, hbar);
}

} // namespace

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Matrix m;
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = j[r];
    const std::string row_path = where + "[" + std::to_string(r) + "]";
    if (!row.is_array() || row.empty()) fail(row_path, "expected a non-empty row array");
    if (r == 0) {
      cols = row.size();
      m = Matrix::Zero(rows, cols);
    } else if (row.size() != cols) {
      fail(row_path, "ragged matrix: row lengths differ");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      m(r, c) = entry_from_json(row[c], row_path + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

Protocol ExperimentConfig::protocol() const {
  if (schedule.has_value()) {
    Protocol p = protocol_from_schedule(*schedule);
    return p;
  }
  if (explicit_propagator.has_value()) {
    return make_protocol(h_initial, h_final, *explicit_propagator);
  }
  return sudden_quench(h_initial, h_final);
}

const GaussianPointer& ExperimentConfig::require_pointer() const {
  if (!pointer.has_value()) {
    fail("pointer", "this command needs a pointer specification");
  }
  return *pointer;
}

double ExperimentConfig::require_beta() const {
  if (!beta.has_value()) {
    fail("beta", "this command needs an inverse temperature");
  }
  return *beta;
}

ExperimentConfig parse_experiment_config(const json& j) {
  if (!j.is_object()) fail("(root)", "expected a JSON object");
  ExperimentConfig cfg;

  const json& system = require_key(j, "(root)", "system");
  if (system.contains("two_level")) {
    const json& tl = system["two_level"];
    const std::string where = "system.two_level";
    TwoLevelSpec spec;
    spec.p = number_field(tl, where, "p");
    spec.q = Complex(number_field_or(tl, where, "q_re", 0.0),
                     number_field_or(tl, where, "q_im", 0.0));
    spec.eps_i = number_field_or(tl, where, "eps_i", 1.0);
    spec.eps_f = number_field_or(tl, where, "eps_f", 2.0 * spec.eps_i);
    cfg.two_level = spec;
    cfg.h_initial = two_level_hamiltonian(spec.eps_i);
    cfg.h_final = two_level_transverse_hamiltonian(spec.eps_f);
    try {
      cfg.initial_state = two_level_state(spec.p, spec.q);
    } catch (const std::invalid_argument& e) {
      fail(where, e.what());
    }
  } else {
    const json& hams = require_key(system, "system", "hamiltonians");
    cfg.h_initial =
        matrix_from_json(require_key(hams, "system.hamiltonians", "initial"),
                         "system.hamiltonians.initial");
    cfg.h_final =
        matrix_from_json(require_key(hams, "system.hamiltonians", "final"),
                         "system.hamiltonians.final");
    const bool has_state = system.contains("initial_state");
    const bool has_canonical = system.contains("canonical");
    if (has_state == has_canonical) {
      fail("system", "give exactly one of initial_state or canonical");
    }
    if (has_state) {
      cfg.initial_state =
          matrix_from_json(system["initial_state"], "system.initial_state");
    } else {
      const double b = number_field(system["canonical"], "system.canonical", "beta");
      cfg.beta = b;
      cfg.initial_state = canonical_state(cfg.h_initial, b);
    }
  }

  if (system.contains("schedule")) {
    const json& sched = system["schedule"];
    if (!sched.is_array() || sched.empty()) {
      fail("system.schedule", "expected a non-empty array of segments");
    }
    Schedule s;
    for (std::size_t i = 0; i < sched.size(); ++i) {
      const std::string where = "system.schedule[" + std::to_string(i) + "]";
      ScheduleSegment seg;
      seg.hamiltonian =
          matrix_from_json(require_key(sched[i], where, "hamiltonian"),
                           where + ".hamiltonian");
      seg.duration = number_field(sched[i], where, "duration");
      s.segments.push_back(std::move(seg));
    }
    cfg.schedule = std::move(s);
  }
  if (system.contains("propagator")) {
    cfg.explicit_propagator =
        matrix_from_json(system["propagator"], "system.propagator");
  }

  if (j.contains("pointer")) {
    try {
      cfg.pointer = pointer_from_json(j["pointer"], "pointer");
    } catch (const std::invalid_argument& e) {
      const std::string what = e.what();
      if (what.rfind("config error", 0) == 0) throw;
      fail("pointer", what);
    }
  }
  if (j.contains("scheme")) {
    if (!j["scheme"].is_string()) fail("scheme", "expected a string");
    cfg.scheme = scheme_from_string(j["scheme"].get<std::string>(), "scheme");
  }
  if (j.contains("beta")) {
    cfg.beta = as_number(j["beta"], "beta");
  }
  if (j.contains("sweep")) {
    const json& sw = j["sweep"];
    cfg.sweep.from = number_field_or(sw, "sweep", "from", cfg.sweep.from);
    cfg.sweep.to = number_field_or(sw, "sweep", "to", cfg.sweep.to);
    cfg.sweep.points = static_cast<int>(
        number_field_or(sw, "sweep", "points", cfg.sweep.points));
    if (!(cfg.sweep.from > 0.0) || !(cfg.sweep.to > cfg.sweep.from)) {
      fail("sweep", "need 0 < from < to");
    }
    if (cfg.sweep.points < 2) fail("sweep.points", "need at least two points");
  }
  if (j.contains("output")) {
    const json& out = j["output"];
    if (!out.is_object()) fail("output", "expected an object");
    if (out.contains("grid")) {
      cfg.output.grid_points =
          static_cast<int>(number_field_or(out["grid"], "output.grid", "points", 2001));
      cfg.output.n_sigma = number_field_or(out["grid"], "output.grid", "n_sigma", 8.0);
      if (cfg.output.grid_points < 2) {
        fail("output.grid.points", "need at least two grid points");
      }
    }
    if (out.contains("format")) {
      cfg.output.format = string_field(out, "output", "format");
      if (cfg.output.format != "csv" && cfg.output.format != "json") {
        fail("output.format", "expected csv or json");
      }
    }
    if (out.contains("path")) {
      cfg.output.path = string_field(out, "output", "path");
    }
  }

  // Surface invalid physical parameters now, with config-level context.
  try {
    check_density_matrix(cfg.initial_state);
  } catch (const std::exception& e) {
    fail("system", std::string("initial state rejected: ") + e.what());
  }
  if (cfg.h_initial.rows() != cfg.initial_state.rows() ||
      cfg.h_final.rows() != cfg.initial_state.rows()) {
    fail("system", "Hamiltonian and state dimensions disagree");
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw std::invalid_argument("cannot open config file: " + file.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config file " + file.string() +
                                " is not valid JSON: " + e.what());
  }
  return parse_experiment_config(j);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    }
    out << content;
    if (!out.good()) {
      throw std::runtime_error("short write to " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

void write_json_atomic(const std::filesystem::path& path, const json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

std::string two_column_csv(const std::string& header, const std::vector<double>& a,
                           const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("two_column_csv: column lengths differ");
  }
  std::string out = header + "\n";
  for (std::size_t i = 0; i < a.size(); ++i) {
    out += format_double(a[i]);
    out += ',';
    out += format_double(b[i]);
    out += '\n';
  }
  return out;
}

void write_csv_atomic(const std::filesystem::path& path, const std::string& header,
                      const std::vector<double>& a, const std::vector<double>& b) {
  write_text_atomic(path, two_column_csv(header, a, b));
}

void write_sidecar(const std::filesystem::path& data_file, json metadata) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  metadata["generated_at"] = stamp;
  write_json_atomic(data_file.string() + ".meta.json", metadata);
}

json distribution_to_json(const GaussianMixture& dist) {
  json terms = json::array();
  for (const MixtureTerm& t : dist.terms()) {
    terms.push_back({{"weight", {t.weight.real(), t.weight.imag()}},
                     {"center", {t.center.real(), t.center.imag()}},
                     {"variance", t.variance}});
  }
  json j{{"scheme", scheme_name(dist.scheme())},
         {"sigma_e2", dist.sigma_e2()},
         {"terms", std::move(terms)}};
  if (dist.sigma_nd2() >= 0.0) j["sigma_nd2"] = dist.sigma_nd2();
  return j;
}

json distribution_to_json(const AtomDistribution& dist) {
  json atoms = json::array();
  for (const Atom& a : dist.atoms()) {
    atoms.push_back({{"w", a.w}, {"weight", a.weight}});
  }
  return json{{"scheme", scheme_name(dist.scheme())},
              {"signed", dist.is_signed()},
              {"atoms", std::move(atoms)}};
}

json report_to_json(const RelationReport& report) {
  return json{{"relation", report.relation},
              {"max_violation", report.max_violation},
              {"grid_points", report.grid_points},
              {"threshold", report.threshold},
              {"pass", report.pass}};
}

} // namespace qwork
