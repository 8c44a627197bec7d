#include "qwork/states.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qwork {

void check_density_matrix(const Matrix& rho, const char* what) {
  check_hermitian(rho, what);
  const double tr_dev = std::abs(rho.trace() - Complex(1.0, 0.0));
  if (tr_dev > 1e-12 * std::max(1.0, rho.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument(std::string(what) + ": trace deviates from 1 by " +
                                std::to_string(tr_dev));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho);
  if (solver.eigenvalues().minCoeff() < -1e-10) {
    throw std::invalid_argument(std::string(what) + ": smallest eigenvalue " +
                                std::to_string(solver.eigenvalues().minCoeff()) +
                                " is below -1e-10");
  }
}

Matrix project_diagonal(const Matrix& rho, const SpectralDecomposition& d) {
  if (rho.rows() != d.dim) {
    throw std::invalid_argument("project_diagonal: dimension mismatch");
  }
  Matrix out = Matrix::Zero(d.dim, d.dim);
  for (const Matrix& p : d.projectors) out += p * rho * p;
  return out;
}

Matrix canonical_state(const Matrix& h, double beta) {
  if (beta < 0.0) throw std::invalid_argument("canonical_state: beta must be >= 0");
  SpectralDecomposition d = spectral_decompose(h);
  const double e0 = d.eigenvalues.front();
  Matrix unnorm = apply_spectral_function(
      d, [&](double e) { return Complex(std::exp(-beta * (e - e0)), 0.0); });
  return unnorm / unnorm.trace();
}

double log_partition_function(const SpectralDecomposition& d, double beta) {
  const double e0 = d.eigenvalues.front();
  double sum = 0.0;
  for (int k = 0; k < d.levels(); ++k) {
    sum += d.degeneracies[k] * std::exp(-beta * (d.eigenvalues[k] - e0));
  }
  return -beta * e0 + std::log(sum);
}

double free_energy_difference(const Matrix& h_initial, const Matrix& h_final, double beta) {
  if (beta <= 0.0) throw std::invalid_argument("free_energy_difference: beta must be > 0");
  SpectralDecomposition d0 = spectral_decompose(h_initial);
  SpectralDecomposition dt = spectral_decompose(h_final);
  return -(log_partition_function(dt, beta) - log_partition_function(d0, beta)) / beta;
}

bool has_boltzmann_diagonal(const Matrix& rho, const SpectralDecomposition& d, double beta,
                            double tol) {
  const double log_z = log_partition_function(d, beta);
  for (int k = 0; k < d.levels(); ++k) {
    const double expected =
        d.degeneracies[k] * std::exp(-beta * d.eigenvalues[k] - log_z);
    const double actual = (d.projectors[k] * rho).trace().real();
    if (std::abs(actual - expected) > tol) return false;
  }
  return true;
}

void require_boltzmann_diagonal(const Matrix& rho, const SpectralDecomposition& d, double beta,
                                const char* what, double tol) {
  const double log_z = log_partition_function(d, beta);
  for (int k = 0; k < d.levels(); ++k) {
    const double expected = d.degeneracies[k] * std::exp(-beta * d.eigenvalues[k] - log_z);
    const double actual = (d.projectors[k] * rho).trace().real();
    if (std::abs(actual - expected) > tol) {
      throw std::invalid_argument(
          std::string(what) + ": level " + std::to_string(k) + " (energy " +
          std::to_string(d.eigenvalues[k]) + ") has population " + std::to_string(actual) +
          ", Boltzmann weight requires " + std::to_string(expected));
    }
  }
}

} // namespace qwork
