#include "qwork/pointer.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace qwork;

TEST_SUITE("pointer") {

TEST_CASE("pure factory saturates the uncertainty bound") {
  const GaussianPointer ptr = GaussianPointer::pure(0.1);
  CHECK(ptr.var_x() == doctest::Approx(0.1));
  CHECK(ptr.var_x() * ptr.var_p() == doctest::Approx(0.25));
  CHECK(ptr.sym_xp() == 0.0);
  CHECK(ptr.is_pure());
  CHECK(ptr.sigma_e2() == doctest::Approx(0.1));
  CHECK(ptr.sigma_nd2() == doctest::Approx(0.4)); // 4 sigma_e2 when pure
}

TEST_CASE("kappa rescales both effective variances") {
  const GaussianPointer ptr(0.5, 2.0, 0.0, 3.0);
  CHECK(ptr.sigma_e2() == doctest::Approx(0.5 / 9.0));
  CHECK(ptr.sigma_nd2() == doctest::Approx(1.0 / (9.0 * 2.0)));
  const EffectiveParams ep = effective_params(ptr);
  CHECK(ep.sigma_e2 == doctest::Approx(ptr.sigma_e2()));
  CHECK(ep.sigma_nd2 == doctest::Approx(ptr.sigma_nd2()));
  CHECK(ep.alpha == Complex(0.5, 0.0));
}

TEST_CASE("cross-correlated pointers shift alpha off the real axis") {
  const GaussianPointer ptr(1.0, 1.0, 0.6, 1.0);
  CHECK(!ptr.is_pure());
  CHECK(ptr.alpha().real() == doctest::Approx(0.5));
  CHECK(ptr.alpha().imag() == doctest::Approx(-0.3));
}

TEST_CASE("uncertainty violations are rejected") {
  CHECK_THROWS_AS(GaussianPointer(0.1, 0.1, 0.0, 1.0), std::invalid_argument);
  // Valid without correlation, invalid once sym_xp tightens the bound.
  CHECK_NOTHROW(GaussianPointer(0.5, 0.5, 0.0, 1.0));
  CHECK_THROWS_AS(GaussianPointer(0.5, 0.5, 0.9, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GaussianPointer::pure(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(GaussianPointer(0.5, 2.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("position kernel: Hermitian, normalized, correct moments") {
  const GaussianPointer mixed(0.8, 0.9, 0.3, 1.0);
  CHECK(std::abs(mixed.kernel(0.4, -0.2) - std::conj(mixed.kernel(-0.2, 0.4))) <
        1e-14);

  const double mass = qtest::trapezoid(
      [&](double x) { return mixed.kernel(x, x).real(); }, -12.0, 12.0, 4001);
  CHECK(std::abs(mass - 1.0) < 1e-10);

  const double second = qtest::trapezoid(
      [&](double x) { return x * x * mixed.kernel(x, x).real(); }, -12.0, 12.0,
      4001);
  CHECK(std::abs(second - mixed.var_x()) < 1e-9);
}

TEST_CASE("pure kernel factorizes into a Gaussian wavefunction") {
  const double v = 0.3;
  const GaussianPointer ptr = GaussianPointer::pure(v);
  const auto wave = [&](double x) {
    return std::pow(2.0 * kPi * v, -0.25) * std::exp(-x * x / (4.0 * v));
  };
  for (double x : {-0.7, 0.0, 0.4}) {
    for (double y : {-0.3, 0.2, 0.9}) {
      CHECK(std::abs(ptr.kernel(x, y) - Complex(wave(x) * wave(y), 0.0)) < 1e-14);
    }
  }
}

} // TEST_SUITE
