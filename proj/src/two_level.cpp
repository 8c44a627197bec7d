#include "qwork/two_level.hpp"

#include <cmath>
#include <stdexcept>

namespace qwork {

Matrix two_level_hamiltonian(double eps) {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = Complex(0.5 * eps, 0.0);
  h(1, 1) = Complex(-0.5 * eps, 0.0);
  return h;
}

Matrix two_level_transverse_hamiltonian(double eps) {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 1) = Complex(0.5 * eps, 0.0);
  h(1, 0) = Complex(0.5 * eps, 0.0);
  return h;
}

Matrix two_level_state(double p, Complex q) {
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("two_level_state: population p must lie in [0, 1]");
  }
  if (std::norm(q) > p * (1.0 - p) + 1e-12) {
    throw std::invalid_argument(
        "two_level_state: |q|^2 exceeds p(1-p); the matrix would not be positive");
  }
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = Complex(1.0 - p, 0.0);
  rho(1, 1) = Complex(p, 0.0);
  rho(1, 0) = q;
  rho(0, 1) = std::conj(q);
  return rho;
}

Protocol two_level_quench(double eps_initial, double eps_final) {
  return sudden_quench(two_level_hamiltonian(eps_initial),
                       two_level_transverse_hamiltonian(eps_final));
}

} // namespace qwork
