#include "qwork/fluctuation.hpp"

#include "helpers.hpp"
#include "qwork/states.hpp"
#include "qwork/two_level.hpp"

#include <doctest.h>

#include <cmath>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

using namespace qwork;

namespace {

Matrix random_real_symmetric(const std::vector<double>& evals, std::mt19937_64& rng) {
  const int dim = static_cast<int>(evals.size());
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd raw(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) raw(r, c) = g(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  const Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd d(dim);
  for (int i = 0; i < dim; ++i) d[i] = evals[static_cast<size_t>(i)];
  return (q * d.asDiagonal() * q.transpose()).cast<Complex>();
}

// Canonical populations of a two-level Hamiltonian, dressed with an
// eigenbasis coherence of the requested relative strength.
Matrix coherent_canonical(const Matrix& h, double beta, double relative_q) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const double gap = es.eigenvalues()[1] - es.eigenvalues()[0];
  const double p0 = 1.0 / (1.0 + std::exp(-beta * gap));
  const Vector v0 = es.eigenvectors().col(0), v1 = es.eigenvectors().col(1);
  Matrix rho = p0 * (v0 * v0.adjoint()) + (1.0 - p0) * (v1 * v1.adjoint());
  rho += relative_q * std::sqrt(p0 * (1.0 - p0)) *
         (v0 * v1.adjoint() + v1 * v0.adjoint());
  return rho;
}

} // namespace

TEST_SUITE("fluctuation") {

TEST_CASE("free energy difference of the two-level switch is pinned") {
  const Protocol p = two_level_quench(1.0, 2.0);
  const ProcessPair pair = make_process_pair(p, canonical_state(p.h_initial, 1.0), 1.0);
  CHECK(pair.delta_f == doctest::Approx(-0.3136663235247497).epsilon(1e-12));
  CHECK(pair.delta_f ==
        doctest::Approx(-std::log(std::cosh(1.0) / std::cosh(0.5))).epsilon(1e-12));

  const ProcessPair cold = make_process_pair(p, canonical_state(p.h_initial, 2.5), 2.5);
  CHECK(cold.delta_f ==
        doctest::Approx(-std::log(std::cosh(2.5) / std::cosh(1.25)) / 2.5).epsilon(1e-12));
}

TEST_CASE("detailed balance holds atom-wise for the sudden switch") {
  const Protocol p = two_level_quench(1.0, 2.0);
  for (double beta : {0.5, 1.0, 2.0}) {
    const ProcessPair pair = make_process_pair(p, canonical_state(p.h_initial, beta), beta);
    const RelationReport r = crooks_check(pair);
    CHECK(r.pass);
    CHECK(r.max_violation < 1e-10);
    CHECK(r.relation == "crooks");
    CHECK(r.grid_points == 4);
  }
  // Near-flat ensemble: the relation degenerates gracefully.
  const double tiny = 1e-6;
  CHECK(crooks_check(make_process_pair(p, canonical_state(p.h_initial, tiny), tiny)).pass);
}

TEST_CASE("coherences on the Boltzmann diagonal do not disturb the balance") {
  const Protocol p = two_level_quench(1.0, 2.0);
  const double beta = 1.0;
  const Matrix fwd = coherent_canonical(p.h_initial, beta, 0.6);
  const Matrix bwd = coherent_canonical(p.h_final, beta, -0.4);
  const ProcessPair pair = make_process_pair(p, fwd, beta, bwd);
  const RelationReport r = crooks_check(pair);
  CHECK(r.pass);
  CHECK(r.max_violation < 1e-10);
}

TEST_CASE("segment reversal: transposed propagator, balanced atoms") {
  std::mt19937_64 rng(921);
  Schedule s;
  s.segments.push_back({random_real_symmetric({0.0, 0.7, 1.9}, rng), 0.7});
  s.segments.push_back({random_real_symmetric({-0.4, 0.9, 1.6}, rng), 0.4});
  const Protocol fwd = protocol_from_schedule(s);
  const double beta = 1.3;
  const ProcessPair pair = make_process_pair(fwd, canonical_state(fwd.h_initial, beta), beta);

  CHECK((pair.backward.h_initial - fwd.h_final).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((pair.backward.h_final - fwd.h_initial).cwiseAbs().maxCoeff() < 1e-14);
  // Real generators: reversing the segments transposes the propagator.
  CHECK((pair.backward.propagator - fwd.propagator.transpose()).cwiseAbs().maxCoeff() <
        1e-12);

  const RelationReport r = crooks_check(pair);
  CHECK(r.pass);
  CHECK(r.max_violation < 1e-10);
}

TEST_CASE("backward construction: guards and explicit override") {
  const Matrix h0 = two_level_hamiltonian(1.0);
  const Matrix ht = two_level_transverse_hamiltonian(2.0);
  std::mt19937_64 rng(922);
  const Matrix u = qtest::random_unitary(2, rng);
  const Protocol bare = make_protocol(h0, ht, u);
  CHECK_THROWS_AS(build_backward(bare), std::invalid_argument);

  const Protocol backward = build_backward(bare, std::optional<Matrix>(u.adjoint()));
  CHECK((backward.propagator - u.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((backward.h_initial - ht).cwiseAbs().maxCoeff() < 1e-14);

  // Complex segment generators only admit plain reversal with a warning.
  Matrix pauli_y(2, 2);
  pauli_y << Complex(0.0, 0.0), Complex(0.0, -1.0), Complex(0.0, 1.0), Complex(0.0, 0.0);
  Schedule s;
  s.segments.push_back({pauli_y, 0.5});
  std::ostringstream captured;
  std::streambuf* old = std::clog.rdbuf(captured.rdbuf());
  build_backward(protocol_from_schedule(s));
  std::clog.rdbuf(old);
  CHECK(captured.str().find("anti-unitary") != std::string::npos);
}

TEST_CASE("smeared detailed balance holds and detects offsets") {
  const Protocol p = two_level_quench(1.0, 2.0);
  const double beta = 1.0;
  const ProcessPair pair = make_process_pair(p, canonical_state(p.h_initial, beta), beta);
  for (double v : {0.1, 0.5, 1e-6}) {
    const RelationReport one = modified_crooks_check(pair, v);
    CHECK(one.pass);
    CHECK(one.relation == "modified_crooks");
    const RelationReport two = modified_crooks_check_two_gaussian(pair, v);
    CHECK(two.pass);
    CHECK(two.relation == "modified_crooks_two_gaussian");
  }
  CHECK_THROWS_AS(modified_crooks_check(pair, 0.0), std::invalid_argument);

  // A free-energy offset grows the violation linearly: doubling the injected
  // shift doubles the response.
  ProcessPair bumped = pair;
  bumped.delta_f += 1e-6;
  const double once = modified_crooks_check(bumped, 0.5).max_violation;
  bumped.delta_f += 1e-6;
  const double twice = modified_crooks_check(bumped, 0.5).max_violation;
  CHECK(!modified_crooks_check(bumped, 0.5).pass);
  CHECK(once > 1e-7);
  CHECK(twice / once == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("exponential identity: exact for dephased meter statistics") {
  const Protocol p = two_level_quench(1.0, 2.0);
  for (double beta : {0.5, 1.0, 2.0}) {
    const Matrix rho = canonical_state(p.h_initial, beta);
    for (double v : {0.5, 1.0}) {
      const JarzynskiResult r = modified_jarzynski(p, GaussianPointer::pure(v), rho, beta);
      CHECK(r.ratio_deviation < 1e-10);
      CHECK(r.log_rhs ==
            doctest::Approx(-beta * free_energy_difference(p.h_initial, p.h_final, beta) +
                            0.5 * beta * beta * v)
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("exponential identity: pointer mixedness and chirp drop out") {
  const Protocol p = two_level_quench(1.0, 2.0);
  const double beta = 1.0;
  const Matrix rho = canonical_state(p.h_initial, beta);
  const JarzynskiResult pure = modified_jarzynski(p, GaussianPointer::pure(0.5), rho, beta);
  const JarzynskiResult mixed =
      modified_jarzynski(p, GaussianPointer(0.5, 2.0, 0.3, 1.0), rho, beta);
  CHECK(mixed.ratio_deviation < 1e-10);
  CHECK(mixed.lhs == doctest::Approx(pure.lhs).epsilon(1e-13));

  // A nearly sharp pointer recovers the bare exponential average.
  const JarzynskiResult sharp = modified_jarzynski(p, GaussianPointer::pure(1e-12), rho, beta);
  CHECK(sharp.ratio_deviation < 1e-10);
  CHECK(sharp.rhs == doctest::Approx(std::exp(-beta * free_energy_difference(
                                         p.h_initial, p.h_final, beta)))
                         .epsilon(1e-10));

  // Coherences on the input are tolerated: the identity concerns the
  // dephased statistics, which ignore them.
  const JarzynskiResult coherent =
      modified_jarzynski(p, GaussianPointer::pure(0.5), coherent_canonical(p.h_initial, beta, 1.0),
                         beta);
  CHECK(coherent.ratio_deviation < 1e-10);
}

TEST_CASE("coherent ensembles break the bare exponential average") {
  const Protocol p = two_level_quench(1.0, 2.0);
  const double beta = 1.0, v = 0.5;
  const Matrix coherent = coherent_canonical(p.h_initial, beta, 1.0);
  const double lhs = work_meter_pdf(p, GaussianPointer::pure(v), coherent).exp_moment(beta);
  const double rhs = std::exp(-beta * free_energy_difference(p.h_initial, p.h_final, beta) +
                              0.5 * beta * beta * v);
  const double violation = std::abs(lhs / rhs - 1.0);
  CHECK(violation > 1e-3);
  CHECK(violation == doctest::Approx(0.593).epsilon(0.02));
}

TEST_CASE("pair assembly rejects broken inputs") {
  const Protocol p = two_level_quench(1.0, 2.0);
  const Matrix canonical = canonical_state(p.h_initial, 1.0);
  CHECK_THROWS_AS(make_process_pair(p, canonical, -1.0), std::invalid_argument);
  // Populations off the Boltzmann weights are named and refused.
  CHECK_THROWS_WITH_AS(make_process_pair(p, two_level_state(0.5, 0.0), 1.0),
                       doctest::Contains("level"), std::invalid_argument);
  // Mismatched backward ensemble is caught as well.
  CHECK_THROWS_AS(
      make_process_pair(p, canonical, 1.0, std::optional<Matrix>(two_level_state(0.5, 0.0))),
      std::invalid_argument);
}

} // TEST_SUITE
