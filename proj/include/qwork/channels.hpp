#pragma once

#include <vector>

#include "qwork/pointer.hpp"
#include "qwork/protocol.hpp"
#include "qwork/spectral.hpp"
#include "qwork/states.hpp"
#include "qwork/types.hpp"

namespace qwork {

// Complex joint weights indexed by (final level m, initial levels n, n').
// The diagonal slice n == n' holds the ordinary joint probabilities; the
// off-diagonal slices carry the coherence contributions.
class AmplitudeTensor {
 public:
  AmplitudeTensor(int final_levels, int initial_levels)
      : lf_(final_levels), l0_(initial_levels),
        values_(static_cast<size_t>(lf_) * l0_ * l0_, Complex(0.0, 0.0)) {}

  Complex& at(int m, int n, int np) { return values_[idx(m, n, np)]; }
  const Complex& at(int m, int n, int np) const { return values_[idx(m, n, np)]; }

  int final_levels() const { return lf_; }
  int initial_levels() const { return l0_; }

 private:
  size_t idx(int m, int n, int np) const {
    return (static_cast<size_t>(m) * l0_ + n) * l0_ + np;
  }
  int lf_, l0_;
  std::vector<Complex> values_;
};

// Non-normalized post-measurement operator attached to one outcome value.
struct OutcomeOperator {
  double outcome = 0.0;
  Matrix matrix;
};

// p(m, n) = Tr[P_m(final) U P_n(initial) rho P_n(initial) U^dag], rows m.
RealMatrix joint_probability(const Protocol& p, const Matrix& rho);

AmplitudeTensor amplitude_tensor(const Protocol& p, const Matrix& rho);

// Sum of P_m U P_n rho P_n U^dag P_m over all (m, n) whose work value
// e_m(final) - e_n(initial) lands on the merged atom containing w; the zero
// operator when w misses every atom.
OutcomeOperator pem_operation(const Protocol& p, const Matrix& rho, double w);

// Doubly dephased state: sum over all (m, n) of P_m U P_n rho P_n U^dag P_m.
Matrix pem_nonselective(const Protocol& p, const Matrix& rho);

// Single Gaussian-pointer energy measurement of the Hamiltonian described by
// d, resolved on the outcome E.
OutcomeOperator gaussian_energy_operation(const SpectralDecomposition& d,
                                          const GaussianPointer& ptr, const Matrix& rho,
                                          double E);

// M_E rho M_E^dag with M_E = (2 pi sigma_e2)^{-1/4} exp(-(E-H)^2/(4 sigma_e2)).
// Coincides with gaussian_energy_operation exactly for pure pointers.
OutcomeOperator kraus_energy_operation(const SpectralDecomposition& d, double sigma_e2,
                                       const Matrix& rho, double E);

// Two Gaussian energy measurements separated by the drive, resolved on the
// work w (difference of the two readings).
OutcomeOperator two_gaussian_work_operation(const Protocol& p, const GaussianPointer& ptr,
                                            const Matrix& rho, double w);

// Single pointer coupled before and after the drive, resolved on w.
OutcomeOperator work_meter_operation(const Protocol& p, const GaussianPointer& ptr,
                                     const Matrix& rho, double w);

// Closed-form outcome integrals of the two operations above.
Matrix work_meter_nonselective(const Protocol& p, const GaussianPointer& ptr, const Matrix& rho);
Matrix two_gaussian_nonselective(const Protocol& p, const GaussianPointer& ptr,
                                 const Matrix& rho);

} // namespace qwork
