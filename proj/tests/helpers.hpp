#pragma once

#include "qwork/protocol.hpp"
#include "qwork/two_level.hpp"
#include "qwork/types.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace qtest {

using qwork::Complex;
using qwork::Matrix;
using qwork::Vector;

inline Matrix random_ginibre(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) m(r, c) = Complex(g(rng), g(rng));
  }
  return m;
}

inline Matrix random_unitary(int dim, std::mt19937_64& rng) {
  const Matrix g = random_ginibre(dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Fix the phase ambiguity so the distribution is Haar.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < dim; ++c) {
    const Complex d = r(c, c);
    q.col(c) *= d / std::abs(d);
  }
  return q;
}

// Hermitian matrix with eigenvalue gaps in [0.2, 1.2], so degeneracy grouping
// is never ambiguous under default tolerances.
inline Matrix random_hermitian_gapped(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd evals(dim);
  double e = -0.5 * dim + u(rng);
  for (int i = 0; i < dim; ++i) {
    evals[i] = e;
    e += 0.2 + u(rng);
  }
  const Matrix v = random_unitary(dim, rng);
  return v * evals.cast<Complex>().asDiagonal() * v.adjoint();
}

inline Matrix random_density(int dim, std::mt19937_64& rng) {
  const Matrix g = random_ginibre(dim, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

inline double gaussian_pdf(double w, double center, double variance) {
  const double z = w - center;
  return std::exp(-0.5 * z * z / variance) / std::sqrt(2.0 * qwork::kPi * variance);
}

// Work density of the two-level instantaneous switch read out through a pure
// Gaussian pointer; independent reference for the general machinery.
inline double switch_reference_pdf(double w, double p, Complex q, double eps_i,
                                   double eps_f, double sigma_e2) {
  const double sigma_nd2 = 4.0 * sigma_e2;
  const double hi = 0.5 * (eps_f + eps_i);
  const double lo = 0.5 * (eps_f - eps_i);
  double out = 0.5 * p * (gaussian_pdf(w, hi, sigma_e2) + gaussian_pdf(w, -lo, sigma_e2));
  out += 0.5 * (1.0 - p) *
         (gaussian_pdf(w, lo, sigma_e2) + gaussian_pdf(w, -hi, sigma_e2));
  out += std::exp(-eps_i * eps_i / (2.0 * sigma_nd2)) * q.real() *
         (gaussian_pdf(w, 0.5 * eps_f, sigma_e2) - gaussian_pdf(w, -0.5 * eps_f, sigma_e2));
  return out;
}

// Trapezoid rule on a uniform grid over [a, b].
template <typename F>
double trapezoid(F&& f, double a, double b, int points) {
  const double h = (b - a) / (points - 1);
  double total = 0.5 * (f(a) + f(b));
  for (int i = 1; i + 1 < points; ++i) total += f(a + i * h);
  return total * h;
}

} // namespace qtest
