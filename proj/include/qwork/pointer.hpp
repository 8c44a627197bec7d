#pragma once

#include "qwork/types.hpp"

namespace qwork {

// Zero-mean Gaussian pointer state with second moments var_x = <X^2>,
// var_p = <P^2>, sym_xp = <{X,P}>, coupled to the system with strength kappa.
// Derived measurement parameters:
//   sigma_e2  = var_x / kappa^2        (broadening of every outcome peak)
//   sigma_nd2 = hbar^2/(kappa^2 var_p) (survival scale of coherence terms)
//   alpha     = (1 - i sym_xp/hbar)/2
class GaussianPointer {
 public:
  GaussianPointer(double var_x, double var_p, double sym_xp, double kappa, double hbar = 1.0);

  // Minimum-uncertainty position state with the requested sigma_e2 at the
  // given coupling: var_x = sigma_e2 * kappa^2, var_p = hbar^2/(4 var_x).
  static GaussianPointer pure(double sigma_e2, double kappa = 1.0, double hbar = 1.0);

  double var_x() const { return var_x_; }
  double var_p() const { return var_p_; }
  double sym_xp() const { return sym_xp_; }
  double kappa() const { return kappa_; }
  double hbar() const { return hbar_; }

  double sigma_e2() const { return var_x_ / (kappa_ * kappa_); }
  double sigma_nd2() const { return hbar_ * hbar_ / (kappa_ * kappa_ * var_p_); }
  Complex alpha() const { return Complex(0.5, -0.5 * sym_xp_ / hbar_); }

  // det of the covariance matrix [[var_x, sym_xp/2],[sym_xp/2, var_p]] equals
  // hbar^2/4 exactly for pure states.
  bool is_pure(double tol = 1e-9) const;

  // Position-representation kernel sigma(x, y); Hermitian, unit trace.
  Complex kernel(double x, double y) const;

 private:
  double var_x_, var_p_, sym_xp_, kappa_, hbar_;
};

struct EffectiveParams {
  double sigma_e2 = 0.0;
  double sigma_nd2 = 0.0;
  Complex alpha{0.5, 0.0};
};

EffectiveParams effective_params(const GaussianPointer& p);

} // namespace qwork
