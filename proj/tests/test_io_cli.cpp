#include "qwork/io.hpp"

#include "helpers.hpp"
#include "qwork/states.hpp"
#include "qwork/two_level.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

using namespace qwork;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path data_file(const char* name) { return fs::path(QWORK_TEST_DATA_DIR) / name; }

// Scratch directory for CLI outputs, wiped per call site.
fs::path scratch(const char* tag) {
  const fs::path dir = fs::path("io_cli_scratch") / tag;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Runs the CLI binary; returns its exit code, captures stdout+stderr.
int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd =
      std::string(QWORK_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

json minimal_two_level() {
  return json{{"system", {{"two_level", {{"p", 0.7}}}}}};
}

} // namespace

TEST_SUITE("io_cli") {

TEST_CASE("matrix serialization round-trips exactly") {
  std::mt19937_64 rng(941);
  const Matrix m = qtest::random_ginibre(3, rng);
  const Matrix back = matrix_from_json(matrix_to_json(m), "roundtrip");
  CHECK((m - back).cwiseAbs().maxCoeff() == 0.0);

  // Plain numbers parse as real entries.
  const Matrix real = matrix_from_json(json::parse("[[0.5, 0.25], [0.25, 0.5]]"), "plain");
  CHECK(real(0, 1) == Complex(0.25, 0.0));
  CHECK(real(1, 1) == Complex(0.5, 0.0));

  CHECK_THROWS_WITH_AS(matrix_from_json(json::parse("[[1, 2], [3]]"), "bad"),
                       doctest::Contains("ragged"), std::invalid_argument);
}

TEST_CASE("two-level config file loads with every convenience field") {
  const ExperimentConfig cfg = load_experiment_config(data_file("spin_quench.json"));
  REQUIRE(cfg.two_level.has_value());
  CHECK(cfg.two_level->p == 0.7);
  CHECK(cfg.two_level->eps_f == 2.0);
  CHECK((cfg.h_initial - two_level_hamiltonian(1.0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((cfg.h_final - two_level_transverse_hamiltonian(2.0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(cfg.initial_state(1, 1).real() == doctest::Approx(0.7));
  REQUIRE(cfg.pointer.has_value());
  CHECK(cfg.pointer->sigma_e2() == doctest::Approx(0.1));
  CHECK(cfg.pointer->is_pure());
  REQUIRE(cfg.scheme.has_value());
  CHECK(*cfg.scheme == Scheme::work_meter);
  CHECK(cfg.require_beta() == 1.0);
  CHECK(cfg.sweep.points == 25);
  CHECK(cfg.output.grid_points == 801);
  // Sudden switch: no schedule or propagator configured.
  CHECK((cfg.protocol().propagator - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("full-matrix config: canonical ensemble and propagator precedence") {
  json j{{"system",
          {{"hamiltonians",
            {{"initial", matrix_to_json(two_level_hamiltonian(1.0))},
             {"final", matrix_to_json(two_level_transverse_hamiltonian(2.0))}}},
           {"canonical", {{"beta", 2.0}}}}}};
  ExperimentConfig cfg = parse_experiment_config(j);
  CHECK((cfg.initial_state - canonical_state(two_level_hamiltonian(1.0), 2.0))
            .cwiseAbs()
            .maxCoeff() < 1e-14);
  CHECK(cfg.require_beta() == 2.0);

  // An explicit propagator overrides the identity default...
  Matrix flip(2, 2);
  flip << Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0);
  j["system"]["propagator"] = matrix_to_json(flip);
  cfg = parse_experiment_config(j);
  CHECK((cfg.protocol().propagator - flip).cwiseAbs().maxCoeff() == 0.0);

  // ...and a schedule overrides both.
  j["system"]["schedule"] =
      json::array({{{"hamiltonian", matrix_to_json(two_level_hamiltonian(1.0))},
                    {"duration", 0.3}},
                   {{"hamiltonian", matrix_to_json(two_level_transverse_hamiltonian(2.0))},
                    {"duration", 0.4}}});
  cfg = parse_experiment_config(j);
  REQUIRE(cfg.schedule.has_value());
  const Matrix expected = propagator_from_schedule(*cfg.schedule);
  CHECK((cfg.protocol().propagator - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK(cfg.protocol().schedule.has_value());
}

TEST_CASE("config errors carry field paths") {
  CHECK_THROWS_WITH_AS(parse_experiment_config(json::parse("[]")),
                       doctest::Contains("(root)"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_experiment_config(json{{"system", json::object()}}),
                       doctest::Contains("system.hamiltonians"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse_experiment_config(json{{"system", {{"two_level", json::object()}}}}),
      doctest::Contains("config error at system.two_level.p"), std::invalid_argument);

  json both{{"system",
             {{"hamiltonians",
               {{"initial", matrix_to_json(two_level_hamiltonian(1.0))},
                {"final", matrix_to_json(two_level_hamiltonian(1.0))}}},
              {"canonical", {{"beta", 1.0}}},
              {"initial_state", matrix_to_json(two_level_state(0.5, 0.0))}}}};
  CHECK_THROWS_WITH_AS(parse_experiment_config(both),
                       doctest::Contains("exactly one of initial_state or canonical"),
                       std::invalid_argument);

  json bad_scheme = minimal_two_level();
  bad_scheme["scheme"] = "nonsense";
  CHECK_THROWS_WITH_AS(parse_experiment_config(bad_scheme),
                       doctest::Contains("unknown scheme"), std::invalid_argument);

  json mixed_purity = minimal_two_level();
  mixed_purity["pointer"] = {{"sigma_e2", 0.1}, {"purity", "mixed"}};
  CHECK_THROWS_WITH_AS(parse_experiment_config(mixed_purity),
                       doctest::Contains("pointer.purity"), std::invalid_argument);

  json bad_sweep = minimal_two_level();
  bad_sweep["sweep"] = {{"from", 0.0}, {"to", 1.0}, {"points", 5}};
  CHECK_THROWS_WITH_AS(parse_experiment_config(bad_sweep),
                       doctest::Contains("need 0 < from < to"), std::invalid_argument);

  json bad_format = minimal_two_level();
  bad_format["output"] = {{"format", "xml"}};
  CHECK_THROWS_WITH_AS(parse_experiment_config(bad_format),
                       doctest::Contains("output.format"), std::invalid_argument);

  json bad_state{{"system", {{"two_level", {{"p", 0.7}, {"q_re", 0.8}}}}}};
  CHECK_THROWS_WITH_AS(parse_experiment_config(bad_state),
                       doctest::Contains("system.two_level"), std::invalid_argument);

  // Commands that need absent sections name them.
  const ExperimentConfig bare = parse_experiment_config(minimal_two_level());
  CHECK_THROWS_WITH_AS(bare.require_pointer(), doctest::Contains("pointer"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(bare.require_beta(), doctest::Contains("beta"),
                       std::invalid_argument);
}

TEST_CASE("CSV rendering is exact and atomic writes land complete") {
  CHECK(two_column_csv("w,pdf", {0.5, 1.0}, {0.25, 2.0}) == "w,pdf\n0.5,0.25\n1,2\n");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");

  const fs::path dir = scratch("atomic");
  write_text_atomic(dir / "nested" / "deep.txt", "payload");
  CHECK(read_file(dir / "nested" / "deep.txt") == "payload");
  // No temp droppings left behind.
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "nested")) ++entries;
  CHECK(entries == 1);

  write_sidecar(dir / "nested" / "deep.txt", json{{"note", "check"}});
  const json meta = json::parse(read_file(dir / "nested" / "deep.txt.meta.json"));
  CHECK(meta.contains("generated_at"));
  CHECK(meta["note"] == "check");
}

TEST_CASE("distribution serialization carries schemes and components") {
  const Protocol p = two_level_quench(1.0, 2.0);
  const Matrix rho = two_level_state(0.7, std::sqrt(0.21));
  const json mix = distribution_to_json(work_meter_pdf(p, GaussianPointer::pure(0.1), rho));
  CHECK(mix["scheme"] == "work_meter");
  CHECK(mix["sigma_e2"].get<double>() == doctest::Approx(0.1));
  CHECK(mix["terms"].size() > 0);
  CHECK(mix["terms"][0].contains("weight"));
  CHECK(mix["terms"][0].contains("center"));
  CHECK(mix["terms"][0].contains("variance"));

  const json atoms = distribution_to_json(pem_work_pdf(p, rho));
  CHECK(atoms["scheme"] == "pem");
  CHECK(atoms["signed"] == false);
  CHECK(atoms["atoms"].size() == 4);
}

TEST_CASE("CLI work-pdf: stable bytes, metadata confined to the sidecar") {
  const fs::path first = scratch("work_pdf_a");
  const fs::path second = scratch("work_pdf_b");
  const std::string cfg = data_file("spin_quench.json").string();
  CHECK(run_cli("work-pdf --config " + cfg + " --out " + first.string(),
                first / "log.txt") == 0);
  CHECK(run_cli("work-pdf --config " + cfg + " --out " + second.string(),
                second / "log.txt") == 0);

  const std::string data = read_file(first / "work_pdf.csv");
  CHECK(data.rfind("w,pdf\n", 0) == 0);
  CHECK(data.find("generated_at") == std::string::npos);
  CHECK(data == read_file(second / "work_pdf.csv"));

  const json meta = json::parse(read_file(first / "work_pdf.csv.meta.json"));
  CHECK(meta.contains("generated_at"));
  CHECK(meta["command"] == "work-pdf");
  CHECK(meta["scheme"] == "work_meter");
}

TEST_CASE("CLI spin-quench: figure datasets appear with their sidecars") {
  const fs::path out = scratch("spin_quench");
  const std::string cfg = data_file("spin_quench.json").string();
  CHECK(run_cli("spin-quench --config " + cfg + " --out " + out.string(),
                out / "log.txt") == 0);
  for (const char* name :
       {"pdf_q_zero_sigma2_0.01", "pdf_q_plus_sigma2_0.1", "mean_vs_sigma2_q_plus",
        "mean_vs_sigma2_q_minus", "pdf_exact_sigma2_1", "pdf_imprecise_sigma2_2"}) {
    CAPTURE(name);
    CHECK(fs::exists(out / (std::string(name) + ".csv")));
    CHECK(fs::exists(out / (std::string(name) + ".csv.meta.json")));
  }
  const std::string sweep = read_file(out / "mean_vs_sigma2_q_zero.csv");
  CHECK(sweep.rfind("sigma_e2,mean_work\n", 0) == 0);
  const json meta = json::parse(read_file(out / "mean_vs_sigma2_q_plus.csv.meta.json"));
  CHECK(meta["q_over_q_max"] == 1.0);
  CHECK(meta.contains("asymptote_sigma2_to_0"));
  CHECK(meta.contains("asymptote_sigma2_to_inf"));
}

TEST_CASE("CLI average-sweep honours the configured grid") {
  const fs::path out = scratch("sweep");
  const std::string cfg = data_file("spin_quench.json").string();
  CHECK(run_cli("average-sweep --config " + cfg + " --out " + out.string(),
                out / "log.txt") == 0);
  const std::string csv = read_file(out / "average_sweep.csv");
  CHECK(csv.rfind("sigma_e2,mean_work\n", 0) == 0);
  int rows = -1; // discount the header
  for (char c : csv) rows += (c == '\n');
  CHECK(rows == 25);
}

TEST_CASE("CLI verify: green by default, red under an injected offset") {
  const fs::path out = scratch("verify_ok");
  const std::string cfg = data_file("spin_quench.json").string();
  CHECK(run_cli("verify --config " + cfg + " --out " + out.string(), out / "log.txt") ==
        0);
  const std::string log = read_file(out / "log.txt");
  CHECK(log.find("crooks") != std::string::npos);
  CHECK(log.find("FAIL") == std::string::npos);
  const json report = json::parse(read_file(out / "verify_report.json"));
  CHECK(report["all_pass"] == true);
  CHECK(report["checks"].size() == 5);

  const fs::path bad = scratch("verify_bad");
  CHECK(run_cli("verify --config " + cfg + " --out " + bad.string() +
                    " --inject-perturbation 1e-3",
                bad / "log.txt") == 1);
  const json red = json::parse(read_file(bad / "verify_report.json"));
  CHECK(red["all_pass"] == false);
  CHECK(red["injected_perturbation"] == 1e-3);
  CHECK(read_file(bad / "log.txt").find("FAIL") != std::string::npos);
}

TEST_CASE("CLI oracle-compare: simulator tracks the analytic density") {
  const fs::path out = scratch("oracle");
  const std::string cfg = data_file("spin_quench.json").string();
  CHECK(run_cli("oracle-compare --config " + cfg + " --out " + out.string(),
                out / "log.txt") == 0);
  CHECK(fs::exists(out / "oracle_work_meter.csv"));
  CHECK(fs::exists(out / "analytic_work_meter.csv"));
  // The config pins scheme = work_meter, so the two-reading files are absent.
  CHECK(!fs::exists(out / "oracle_two_gaussian.csv"));
  const json report = json::parse(read_file(out / "oracle_report.json"));
  CHECK(report["all_pass"] == true);
  CHECK(report["work_meter"]["l1"].get<double>() <= 1e-6);
}

TEST_CASE("CLI rejects broken invocations with distinct exit codes") {
  const fs::path out = scratch("errors");
  json broken = minimal_two_level();
  broken["system"]["two_level"]["p"] = 1.7;
  write_json_atomic(out / "broken.json", broken);
  CHECK(run_cli("work-pdf --config " + (out / "broken.json").string() + " --out " +
                    out.string(),
                out / "log.txt") == 2);
  CHECK(read_file(out / "log.txt").find("config error") != std::string::npos);

  // Missing scheme for work-pdf is a config error as well.
  json no_scheme = minimal_two_level();
  write_json_atomic(out / "no_scheme.json", no_scheme);
  CHECK(run_cli("work-pdf --config " + (out / "no_scheme.json").string() + " --out " +
                    out.string(),
                out / "log2.txt") == 2);
}

} // TEST_SUITE
