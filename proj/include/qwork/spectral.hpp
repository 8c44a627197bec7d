#pragma once

#include <functional>
#include <vector>

#include "qwork/types.hpp"

namespace qwork {

// Distinct eigenvalues (ascending) of a Hermitian operator together with the
// orthogonal projectors onto the corresponding eigenspaces.
struct SpectralDecomposition {
  std::vector<double> eigenvalues; // distinct, ascending
  std::vector<Matrix> projectors;  // Hermitian, mutually orthogonal, sum to identity
  std::vector<int> degeneracies;   // trace of each projector
  int dim = 0;

  int levels() const { return static_cast<int>(eigenvalues.size()); }
  double spectral_range() const {
    return eigenvalues.empty() ? 0.0 : eigenvalues.back() - eigenvalues.front();
  }
};

// Throws std::invalid_argument when H deviates from its conjugate transpose by
// more than 1e-12 times the largest absolute entry.
void check_hermitian(const Matrix& h, const char* what);

// Eigenvalues closer than group_tol are merged into one degenerate level
// (transitive closure over near-equal neighbours). group_tol < 0 selects the
// default 1e-9 * (e_max - e_min).
SpectralDecomposition spectral_decompose(const Matrix& h, double group_tol = -1.0);

// Sum of f(e_n) * projector_n.
Matrix apply_spectral_function(const SpectralDecomposition& d,
                               const std::function<Complex(double)>& f);

// exp(-i * H * dt / hbar), computed by diagonalization.
Matrix hermitian_propagator(const Matrix& h, double dt, double hbar);

} // namespace qwork
