#include "qwork/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>
#include <string>

namespace qwork {

void check_hermitian(const Matrix& h, const char* what) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square and non-empty");
  }
  const double scale = h.cwiseAbs().maxCoeff();
  const double dev = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (dev > 1e-12 * std::max(scale, 1.0)) {
    throw std::invalid_argument(std::string(what) + ": matrix is not Hermitian (deviation " +
                                std::to_string(dev) + ")");
  }
}

SpectralDecomposition spectral_decompose(const Matrix& h, double group_tol) {
  check_hermitian(h, "spectral_decompose");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("spectral_decompose: eigensolver failed to converge");
  }
  const RealVector& evals = solver.eigenvalues(); // ascending
  const Matrix& evecs = solver.eigenvectors();
  const int n = static_cast<int>(evals.size());
  const double range = evals(n - 1) - evals(0);
  if (group_tol < 0.0) group_tol = 1e-9 * range;

  SpectralDecomposition d;
  d.dim = n;
  int start = 0;
  while (start < n) {
    int stop = start + 1;
    // Transitive closure: extend the group while consecutive gaps stay small.
    while (stop < n && evals(stop) - evals(stop - 1) <= group_tol) ++stop;
    const int deg = stop - start;
    Matrix block = evecs.middleCols(start, deg);
    Matrix proj = block * block.adjoint();
    proj = Complex(0.5, 0.0) * (proj + proj.adjoint().eval()); // scrub rounding skew
    double value = 0.0;
    for (int i = start; i < stop; ++i) value += evals(i);
    value /= deg;
    d.eigenvalues.push_back(value);
    d.projectors.push_back(std::move(proj));
    d.degeneracies.push_back(deg);
    start = stop;
  }
  return d;
}

Matrix apply_spectral_function(const SpectralDecomposition& d,
                               const std::function<Complex(double)>& f) {
  Matrix out = Matrix::Zero(d.dim, d.dim);
  for (int k = 0; k < d.levels(); ++k) out += f(d.eigenvalues[k]) * d.projectors[k];
  return out;
}

Matrix hermitian_propagator(const Matrix& h, double dt, double hbar) {
  if (hbar <= 0.0) throw std::invalid_argument("hermitian_propagator: hbar must be positive");
  SpectralDecomposition d = spectral_decompose(h, 0.0);
  const Complex i(0.0, 1.0);
  return apply_spectral_function(d, [&](double e) { return std::exp(-i * e * dt / hbar); });
}

} // namespace qwork
