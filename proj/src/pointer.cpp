#include "qwork/pointer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qwork {

GaussianPointer::GaussianPointer(double var_x, double var_p, double sym_xp, double kappa,
                                 double hbar)
    : var_x_(var_x), var_p_(var_p), sym_xp_(sym_xp), kappa_(kappa), hbar_(hbar) {
  if (var_x <= 0.0 || var_p <= 0.0) {
    throw std::invalid_argument("GaussianPointer: var_x and var_p must be > 0");
  }
  if (kappa <= 0.0) throw std::invalid_argument("GaussianPointer: kappa must be > 0");
  if (hbar <= 0.0) throw std::invalid_argument("GaussianPointer: hbar must be > 0");
  const double bound = 0.25 * (hbar * hbar + sym_xp * sym_xp);
  if (var_x * var_p < bound - 1e-12) {
    throw std::invalid_argument(
        "GaussianPointer: state positivity requires var_x*var_p >= (hbar^2 + sym_xp^2)/4; got " +
        std::to_string(var_x * var_p) + " < " + std::to_string(bound));
  }
}

GaussianPointer GaussianPointer::pure(double sigma_e2, double kappa, double hbar) {
  if (sigma_e2 <= 0.0) throw std::invalid_argument("GaussianPointer::pure: sigma_e2 must be > 0");
  const double var_x = sigma_e2 * kappa * kappa;
  return GaussianPointer(var_x, hbar * hbar / (4.0 * var_x), 0.0, kappa, hbar);
}

bool GaussianPointer::is_pure(double tol) const {
  const double det = var_x_ * var_p_ - 0.25 * sym_xp_ * sym_xp_;
  const double target = 0.25 * hbar_ * hbar_;
  return std::abs(det - target) <= tol * target;
}

Complex GaussianPointer::kernel(double x, double y) const {
  // sigma(x,y) = (2 pi var_x)^{-1/2} exp(-mu) with
  // mu = var_p (x-y)^2 / (2 hbar^2)
  //    + [ (x+y)/2 - i sym_xp (x-y)/(2 hbar) ]^2 / (2 var_x).
  const double diff = x - y;
  const Complex bracket(0.5 * (x + y), -0.5 * sym_xp_ * diff / hbar_);
  const Complex mu = var_p_ * diff * diff / (2.0 * hbar_ * hbar_) +
                     bracket * bracket / (2.0 * var_x_);
  return std::exp(-mu) / std::sqrt(2.0 * kPi * var_x_);
}

EffectiveParams effective_params(const GaussianPointer& p) {
  return EffectiveParams{p.sigma_e2(), p.sigma_nd2(), p.alpha()};
}

} // namespace qwork
