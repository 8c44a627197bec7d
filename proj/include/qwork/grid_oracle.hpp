#pragma once

#include "qwork/pointer.hpp"
#include "qwork/protocol.hpp"
#include "qwork/types.hpp"

#include <functional>
#include <vector>

namespace qwork {

// Uniform position grid for pointer wavefunctions. `values` holds one complex
// row per system level (the joint system⊗pointer register); simulators start
// from their own registers, so a default-constructed (empty) `values` is fine.
struct PointerGrid {
  double x_min = 0.0;
  double x_max = 0.0;
  int n_points = 0; // must be a power of two
  Matrix values;    // dim x n_points, optional working register

  double dx() const { return (x_max - x_min) / n_points; }
  double x_at(int j) const { return x_min + j * dx(); }
};

// Symmetric grid covering +- max(8 sqrt(var_x), kappa*span + 8 sqrt(var_x)).
// `spectral_span` is the largest level difference (in energy units) whose
// kappa-scaled displacement the grid must contain.
PointerGrid make_pointer_grid(const GaussianPointer& ptr, double spectral_span,
                              int n_points = 1 << 14);

// Convenience: span taken from the protocol's two spectra (largest initial
// level, final level, and final-minus-initial difference in magnitude).
PointerGrid make_pointer_grid(const GaussianPointer& ptr, const Protocol& p,
                              int n_points = 1 << 14);

// Density sampled on a uniform grid of outcome values.
struct SampledDensity {
  std::vector<double> w;
  std::vector<double> pdf;
  double mass = 0.0;    // Riemann sum of pdf over w
  double leakage = 0.0; // probability mass found in the outer guard bands
};

// Eigenvalues of the pointer position kernel, largest first, truncated once
// the discarded tail weight drops below `tail_weight`.
std::vector<double> pointer_eigenvalues(const GaussianPointer& ptr,
                                        double tail_weight = 1e-12);

// k-th kernel eigenfunction sampled on the grid (unit L2 norm on the line).
Vector pointer_eigenfunction(const GaussianPointer& ptr, int k,
                             const PointerGrid& grid);

// Translate every level row of `values` by `shift` in position, implemented
// as a momentum-space phase so no interpolation error is introduced.
void shift_in_position(Matrix& values, double shift, const PointerGrid& grid);

// Single pointer coupled before and after the protocol; the reading x/kappa
// estimates work in one shot. Executes shift(-kappa e_n) -> U -> shift(+kappa e_m)
// on the joint register for every pure system/pointer component and bins the
// final |amplitude|^2 over x.
SampledDensity simulate_work_meter(const Protocol& p, const GaussianPointer& ptr,
                                   const Matrix& rho, const PointerGrid& grid);

// Two independent pointers read once each (energy at t=0, energy at t=tau);
// work is the difference of the calibrated readings.
SampledDensity simulate_two_measurements(const Protocol& p,
                                         const GaussianPointer& ptr,
                                         const Matrix& rho,
                                         const PointerGrid& grid);

// Non-selective post-measurement system state of a single pointer energy
// measurement, obtained by tracing the pointer out of the gridded joint state.
Matrix simulate_energy_measurement_state(const Matrix& hamiltonian,
                                         const GaussianPointer& ptr,
                                         const Matrix& rho,
                                         const PointerGrid& grid);

// Riemann L1 distance between a sampled density and an analytic one evaluated
// on the sample's grid.
double l1_distance(const SampledDensity& sampled,
                   const std::function<double(double)>& analytic);

} // namespace qwork
