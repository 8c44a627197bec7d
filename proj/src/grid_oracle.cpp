#include "qwork/grid_oracle.hpp"

#include "qwork/spectral.hpp"
#include "qwork/states.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qwork {

namespace {

constexpr double kTailWeight = 1e-12;
constexpr double kLeakageLimit = 1e-10;
constexpr int kMaxKernelRank = 4096;

// Parameters of the analytic eigen-decomposition of the Gaussian position
// kernel: eigenvalues (1-mix)*mix^k, eigenfunctions chirped Hermite functions
// of argument sqrt(scale)*x.
struct KernelBasis {
  double mix = 0.0;
  double scale = 0.0;
  double chirp = 0.0;
  int count = 0;

  double weight(int k) const {
    if (count == 1) return 1.0;
    return (1.0 - mix) * std::pow(mix, k);
  }
};

KernelBasis kernel_basis(const GaussianPointer& ptr, double tail_weight) {
  const double vx = ptr.var_x();
  const double vp = ptr.var_p();
  const double s = ptr.sym_xp();
  const double hbar = ptr.hbar();
  const double nu =
      std::sqrt(std::max(vx * vp - 0.25 * s * s, 0.25 * hbar * hbar));
  KernelBasis basis;
  basis.mix = std::max((2.0 * nu - hbar) / (2.0 * nu + hbar), 0.0);
  basis.scale = nu / (hbar * vx);
  basis.chirp = s / (4.0 * hbar * vx);
  if (basis.mix < 1e-14) {
    basis.count = 1;
  } else {
    basis.count = static_cast<int>(
        std::ceil(std::log(tail_weight) / std::log(basis.mix)));
    if (basis.count > kMaxKernelRank) {
      throw std::runtime_error(
          "grid oracle: pointer kernel needs more than 4096 eigenfunctions to "
          "reach the 1e-12 tail weight; reduce the pointer's mixedness");
    }
  }
  return basis;
}

// Rolling Hermite-function recurrence on a fixed argument vector. next() is
// h_k(xi) for k = 0, 1, 2, ... with unit L2 norm in xi.
class HermiteLadder {
 public:
  explicit HermiteLadder(RealVector xi) : xi_(std::move(xi)) {}

  const RealVector& next() {
    if (k_ == 0) {
      current_ = (-0.5 * xi_.array().square()).exp() *
                 std::pow(kPi, -0.25);
    } else if (k_ == 1) {
      previous_ = current_;
      current_ = std::sqrt(2.0) * xi_.array() * current_.array();
    } else {
      RealVector next = std::sqrt(2.0 / k_) * xi_.array() * current_.array() -
                        std::sqrt((k_ - 1.0) / k_) * previous_.array();
      previous_ = std::move(current_);
      current_ = std::move(next);
    }
    ++k_;
    return current_;
  }

 private:
  RealVector xi_;
  RealVector previous_;
  RealVector current_;
  int k_ = 0;
};

void check_grid(const PointerGrid& grid) {
  const int n = grid.n_points;
  if (n < 16 || (n & (n - 1)) != 0) {
    throw std::invalid_argument(
        "grid oracle: n_points must be a power of two and at least 16");
  }
  if (!(grid.x_max > grid.x_min)) {
    throw std::invalid_argument("grid oracle: x_max must exceed x_min");
  }
}

RealVector grid_positions(const PointerGrid& grid) {
  RealVector x(grid.n_points);
  const double dx = grid.dx();
  for (int j = 0; j < grid.n_points; ++j) x[j] = grid.x_min + j * dx;
  return x;
}

// Momentum-space phase implementing f(x) -> f(x - shift) on the periodic grid.
Vector translation_phase(const PointerGrid& grid, double shift) {
  const int n = grid.n_points;
  const double dq = 2.0 * kPi / (n * grid.dx());
  Vector phase(n);
  for (int k = 0; k < n; ++k) {
    const int folded = (k < n / 2) ? k : k - n;
    phase[k] = std::exp(Complex(0.0, -folded * dq * shift));
  }
  return phase;
}

Vector chirped_eigenfunction(const KernelBasis& basis, const RealVector& x,
                             const RealVector& hermite) {
  const double amp = std::pow(basis.scale, 0.25);
  Vector psi(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    psi[j] = amp * hermite[j] *
             std::exp(Complex(0.0, basis.chirp * x[j] * x[j]));
  }
  return psi;
}

struct StateMix {
  std::vector<double> weights;
  std::vector<Vector> vectors;
};

StateMix decompose_state(const Matrix& rho) {
  check_density_matrix(rho);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("grid oracle: state eigendecomposition failed");
  }
  StateMix mix;
  for (Eigen::Index i = 0; i < rho.rows(); ++i) {
    const double w = solver.eigenvalues()[i];
    if (w > 1e-14) {
      mix.weights.push_back(w);
      mix.vectors.push_back(solver.eigenvectors().col(i));
    }
  }
  return mix;
}

double guard_band_mass(const RealVector& density, double dx) {
  const Eigen::Index n = density.size();
  const Eigen::Index band = n / 32;
  return (density.head(band).sum() + density.tail(band).sum()) * dx;
}

void require_contained(double leakage, const PointerGrid& grid) {
  if (leakage > kLeakageLimit) {
    std::ostringstream msg;
    msg << "grid oracle: probability mass " << leakage
        << " sits in the outer guard bands of [" << grid.x_min << ", "
        << grid.x_max
        << "]; enlarge the grid extent or raise n_points before rerunning";
    throw std::runtime_error(msg.str());
  }
}

} // namespace

PointerGrid make_pointer_grid(const GaussianPointer& ptr, double spectral_span,
                              int n_points) {
  if (spectral_span < 0.0) {
    throw std::invalid_argument("make_pointer_grid: span must be >= 0");
  }
  const double sigma_x = std::sqrt(ptr.var_x());
  const double half =
      std::max(8.0 * sigma_x, ptr.kappa() * spectral_span + 8.0 * sigma_x);
  PointerGrid grid;
  grid.x_min = -half;
  grid.x_max = half;
  grid.n_points = n_points;
  check_grid(grid);
  return grid;
}

PointerGrid make_pointer_grid(const GaussianPointer& ptr, const Protocol& p,
                              int n_points) {
  const SpectralDecomposition d0 = spectral_decompose(p.h_initial);
  const SpectralDecomposition dt = spectral_decompose(p.h_final);
  double span = 0.0;
  for (double e : d0.eigenvalues) span = std::max(span, std::abs(e));
  for (double e : dt.eigenvalues) span = std::max(span, std::abs(e));
  for (double e0 : d0.eigenvalues) {
    for (double et : dt.eigenvalues) {
      span = std::max(span, std::abs(et - e0));
    }
  }
  return make_pointer_grid(ptr, span, n_points);
}

std::vector<double> pointer_eigenvalues(const GaussianPointer& ptr,
                                        double tail_weight) {
  const KernelBasis basis = kernel_basis(ptr, tail_weight);
  std::vector<double> values(basis.count);
  for (int k = 0; k < basis.count; ++k) values[k] = basis.weight(k);
  return values;
}

Vector pointer_eigenfunction(const GaussianPointer& ptr, int k,
                             const PointerGrid& grid) {
  if (k < 0) throw std::invalid_argument("pointer_eigenfunction: k must be >= 0");
  check_grid(grid);
  const KernelBasis basis = kernel_basis(ptr, kTailWeight);
  const RealVector x = grid_positions(grid);
  HermiteLadder ladder(std::sqrt(basis.scale) * x);
  for (int i = 0; i < k; ++i) ladder.next();
  return chirped_eigenfunction(basis, x, ladder.next());
}

void shift_in_position(Matrix& values, double shift, const PointerGrid& grid) {
  check_grid(grid);
  if (values.cols() != grid.n_points) {
    throw std::invalid_argument(
        "shift_in_position: register width does not match the grid");
  }
  Eigen::FFT<double> fft;
  const Vector phase = translation_phase(grid, shift);
  Eigen::VectorXcd row(grid.n_points), freq(grid.n_points);
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    row = values.row(r).transpose();
    fft.fwd(freq, row);
    freq = freq.cwiseProduct(phase);
    fft.inv(row, freq);
    values.row(r) = row.transpose();
  }
}

SampledDensity simulate_work_meter(const Protocol& p, const GaussianPointer& ptr,
                                   const Matrix& rho, const PointerGrid& grid) {
  check_grid(grid);
  if (rho.rows() != static_cast<Eigen::Index>(p.dim())) {
    throw std::invalid_argument("simulate_work_meter: state/protocol dim mismatch");
  }
  const SpectralDecomposition d0 = spectral_decompose(p.h_initial);
  const SpectralDecomposition dt = spectral_decompose(p.h_final);
  const StateMix mix = decompose_state(rho);
  const KernelBasis basis = kernel_basis(ptr, kTailWeight);
  const double kappa = ptr.kappa();
  const int n = grid.n_points;
  const double dx = grid.dx();
  const Eigen::Index dim = rho.rows();

  const RealVector x = grid_positions(grid);
  std::vector<Vector> enter_phase(d0.levels());
  for (int l = 0; l < d0.levels(); ++l) {
    enter_phase[l] = translation_phase(grid, -kappa * d0.eigenvalues[l]);
  }
  std::vector<Vector> exit_phase(dt.levels());
  for (int l = 0; l < dt.levels(); ++l) {
    exit_phase[l] = translation_phase(grid, kappa * dt.eigenvalues[l]);
  }

  // Pure system components already propagated through each initial eigenspace.
  std::vector<std::vector<Vector>> fed(mix.vectors.size());
  for (std::size_t i = 0; i < mix.vectors.size(); ++i) {
    fed[i].resize(d0.levels());
    for (int l = 0; l < d0.levels(); ++l) {
      fed[i][l] = p.propagator * (d0.projectors[l] * mix.vectors[i]);
    }
  }

  Eigen::FFT<double> fft;
  RealVector pdf_x = RealVector::Zero(n);
  HermiteLadder ladder(std::sqrt(basis.scale) * x);
  Eigen::VectorXcd psi_hat(n), row(n), freq(n);
  Matrix reg_hat(dim, n), out_hat(dim, n);
  for (int k = 0; k < basis.count; ++k) {
    const Vector psi = chirped_eigenfunction(basis, x, ladder.next());
    Eigen::VectorXcd psi_col = psi;
    fft.fwd(psi_hat, psi_col);
    for (std::size_t i = 0; i < mix.weights.size(); ++i) {
      const double w_ik = mix.weights[i] * basis.weight(k);
      reg_hat.setZero();
      for (int l = 0; l < d0.levels(); ++l) {
        reg_hat.noalias() +=
            fed[i][l] * psi_hat.cwiseProduct(enter_phase[l]).transpose();
      }
      out_hat.setZero();
      for (int m = 0; m < dt.levels(); ++m) {
        out_hat.noalias() +=
            (dt.projectors[m] * reg_hat) * exit_phase[m].asDiagonal();
      }
      for (Eigen::Index s = 0; s < dim; ++s) {
        freq = out_hat.row(s).transpose();
        fft.inv(row, freq);
        pdf_x += w_ik * row.cwiseAbs2();
      }
    }
  }

  const double leakage = guard_band_mass(pdf_x, dx);
  require_contained(leakage, grid);

  SampledDensity out;
  out.w.resize(n);
  out.pdf.resize(n);
  for (int j = 0; j < n; ++j) {
    out.w[j] = x[j] / kappa;
    out.pdf[j] = kappa * pdf_x[j];
  }
  out.mass = pdf_x.sum() * dx;
  out.leakage = leakage;
  return out;
}

SampledDensity simulate_two_measurements(const Protocol& p,
                                         const GaussianPointer& ptr,
                                         const Matrix& rho,
                                         const PointerGrid& grid) {
  check_grid(grid);
  if (rho.rows() != static_cast<Eigen::Index>(p.dim())) {
    throw std::invalid_argument(
        "simulate_two_measurements: state/protocol dim mismatch");
  }
  const SpectralDecomposition d0 = spectral_decompose(p.h_initial);
  const SpectralDecomposition dt = spectral_decompose(p.h_final);
  const StateMix mix = decompose_state(rho);
  const KernelBasis basis = kernel_basis(ptr, kTailWeight);
  const double kappa = ptr.kappa();
  const int n = grid.n_points;
  const double dx = grid.dx();
  const Eigen::Index dim = rho.rows();

  const RealVector x = grid_positions(grid);
  std::vector<Vector> enter_phase(d0.levels());
  for (int l = 0; l < d0.levels(); ++l) {
    enter_phase[l] = translation_phase(grid, kappa * d0.eigenvalues[l]);
  }
  std::vector<std::vector<Vector>> split(mix.vectors.size());
  for (std::size_t i = 0; i < mix.vectors.size(); ++i) {
    split[i].resize(d0.levels());
    for (int l = 0; l < d0.levels(); ++l) {
      split[i][l] = d0.projectors[l] * mix.vectors[i];
    }
  }

  // First reading: joint density over (first outcome m at tau, pointer-1 x).
  Eigen::FFT<double> fft;
  std::vector<RealVector> first(dt.levels(), RealVector::Zero(n));
  HermiteLadder ladder(std::sqrt(basis.scale) * x);
  Eigen::VectorXcd psi_hat(n), row(n), freq(n);
  std::vector<Vector> shifted(d0.levels());
  Matrix reg(dim, n), evolved(dim, n), projected(dim, n);
  for (int k = 0; k < basis.count; ++k) {
    const Vector psi = chirped_eigenfunction(basis, x, ladder.next());
    Eigen::VectorXcd psi_col = psi;
    fft.fwd(psi_hat, psi_col);
    for (int l = 0; l < d0.levels(); ++l) {
      freq = psi_hat.cwiseProduct(enter_phase[l]);
      fft.inv(row, freq);
      shifted[l] = row;
    }
    for (std::size_t i = 0; i < mix.weights.size(); ++i) {
      const double w_ik = mix.weights[i] * basis.weight(k);
      reg.setZero();
      for (int l = 0; l < d0.levels(); ++l) {
        reg.noalias() += split[i][l] * shifted[l].transpose();
      }
      evolved.noalias() = p.propagator * reg;
      for (int m = 0; m < dt.levels(); ++m) {
        projected.noalias() = dt.projectors[m] * evolved;
        first[m] += w_ik * projected.cwiseAbs2().colwise().sum().transpose();
      }
    }
  }

  // Second reading: analytic position density of pointer 2, displaced per
  // final level; readings subtract, so correlate against the first stage.
  const int padded = 2 * n;
  Eigen::VectorXcd c_total = Eigen::VectorXcd::Zero(padded);
  Eigen::VectorXcd a_pad(padded), b_pad(padded), a_hat(padded), b_hat(padded),
      c_hat(padded);
  double reader_deficit = 0.0;
  RealVector stage_one_marginal = RealVector::Zero(n);
  for (int m = 0; m < dt.levels(); ++m) {
    stage_one_marginal += first[m];
    RealVector reader(n);
    const double center = kappa * dt.eigenvalues[m];
    for (int j = 0; j < n; ++j) {
      reader[j] = ptr.kernel(x[j] - center, x[j] - center).real();
    }
    reader_deficit = std::max(reader_deficit, 1.0 - reader.sum() * dx);
    a_pad.setZero();
    b_pad.setZero();
    a_pad.head(n) = first[m].cast<Complex>();
    b_pad.head(n) = reader.cast<Complex>();
    fft.fwd(a_hat, a_pad);
    fft.fwd(b_hat, b_pad);
    c_hat = a_hat.conjugate().cwiseProduct(b_hat);
    fft.inv(b_pad, c_hat);
    c_total += b_pad;
  }

  const double leakage = std::max(guard_band_mass(stage_one_marginal, dx),
                                  std::max(reader_deficit, 0.0));
  require_contained(leakage, grid);

  SampledDensity out;
  out.w.resize(2 * n - 1);
  out.pdf.resize(2 * n - 1);
  double mass = 0.0;
  for (int l = -(n - 1); l <= n - 1; ++l) {
    const int idx = l + (n - 1);
    const int circ = (l >= 0) ? l : padded + l;
    const double density_y = dx * c_total[circ].real();
    out.w[idx] = l * dx / kappa;
    out.pdf[idx] = kappa * density_y;
    mass += density_y * dx;
  }
  out.mass = mass;
  out.leakage = leakage;
  return out;
}

Matrix simulate_energy_measurement_state(const Matrix& hamiltonian,
                                         const GaussianPointer& ptr,
                                         const Matrix& rho,
                                         const PointerGrid& grid) {
  check_grid(grid);
  if (rho.rows() != hamiltonian.rows()) {
    throw std::invalid_argument(
        "simulate_energy_measurement_state: state/Hamiltonian dim mismatch");
  }
  const SpectralDecomposition d = spectral_decompose(hamiltonian);
  const StateMix mix = decompose_state(rho);
  const KernelBasis basis = kernel_basis(ptr, kTailWeight);
  const double kappa = ptr.kappa();
  const int n = grid.n_points;
  const double dx = grid.dx();
  const Eigen::Index dim = rho.rows();

  const RealVector x = grid_positions(grid);
  std::vector<Vector> enter_phase(d.levels());
  for (int l = 0; l < d.levels(); ++l) {
    enter_phase[l] = translation_phase(grid, kappa * d.eigenvalues[l]);
  }

  Eigen::FFT<double> fft;
  Matrix state = Matrix::Zero(dim, dim);
  HermiteLadder ladder(std::sqrt(basis.scale) * x);
  Eigen::VectorXcd psi_hat(n), row(n), freq(n);
  std::vector<Vector> shifted(d.levels());
  Matrix reg(dim, n);
  for (int k = 0; k < basis.count; ++k) {
    const Vector psi = chirped_eigenfunction(basis, x, ladder.next());
    Eigen::VectorXcd psi_col = psi;
    fft.fwd(psi_hat, psi_col);
    for (int l = 0; l < d.levels(); ++l) {
      freq = psi_hat.cwiseProduct(enter_phase[l]);
      fft.inv(row, freq);
      shifted[l] = row;
    }
    for (std::size_t i = 0; i < mix.weights.size(); ++i) {
      const double w_ik = mix.weights[i] * basis.weight(k);
      reg.setZero();
      for (int l = 0; l < d.levels(); ++l) {
        reg.noalias() += (d.projectors[l] * mix.vectors[i]) * shifted[l].transpose();
      }
      state.noalias() += w_ik * dx * (reg * reg.adjoint());
    }
  }
  return state;
}

double l1_distance(const SampledDensity& sampled,
                   const std::function<double(double)>& analytic) {
  if (sampled.w.size() < 2) {
    throw std::invalid_argument("l1_distance: need at least two sample points");
  }
  const double dw = sampled.w[1] - sampled.w[0];
  double total = 0.0;
  for (std::size_t j = 0; j < sampled.w.size(); ++j) {
    total += std::abs(sampled.pdf[j] - analytic(sampled.w[j])) * dw;
  }
  return total;
}

} // namespace qwork
