#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qwork/channels.hpp"
#include "qwork/pointer.hpp"
#include "qwork/protocol.hpp"
#include "qwork/types.hpp"

namespace qwork {

enum class Scheme { pem, work_meter, two_gaussian, imprecise_limit, broad_gaussian, tmh };

const char* scheme_name(Scheme s);

// Discrete distribution over outcome values. Weights may be negative for
// quasi-probabilities; is_signed() reports whether any weight drops below
// -1e-12 (such distributions are kept as-is, never clipped).
struct Atom {
  double w = 0.0;
  double weight = 0.0;
};

class AtomDistribution {
 public:
  AtomDistribution(Scheme scheme, std::vector<Atom> atoms, double merge_tol);

  Scheme scheme() const { return scheme_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  double merge_tol() const { return merge_tol_; }
  bool is_signed() const { return signed_; }

  double mass() const;
  double moment(int k) const;
  double mean() const { return moment(1); }
  // <exp(-beta w)>, accumulated with the largest exponent factored out.
  double exp_moment(double beta) const;
  double log_exp_moment(double beta) const;
  // Weight of the atom within merge_tol of w (0 when there is none).
  double weight_at(double w) const;

 private:
  Scheme scheme_;
  std::vector<Atom> atoms_;
  double merge_tol_;
  bool signed_;
};

// One Gaussian component: weight and centre may be complex (conjugate partner
// terms keep every evaluation real), variance is real and positive.
struct MixtureTerm {
  Complex weight{0.0, 0.0};
  Complex center{0.0, 0.0};
  double variance = 0.0;
};

class GaussianMixture {
 public:
  // sigma_nd2 < 0 means "no coherence-suppression scale applies" (broad
  // single-Gaussian approximation).
  GaussianMixture(Scheme scheme, std::vector<MixtureTerm> terms, double sigma_e2,
                  double sigma_nd2);

  Scheme scheme() const { return scheme_; }
  const std::vector<MixtureTerm>& terms() const { return terms_; }
  double sigma_e2() const { return sigma_e2_; }
  double sigma_nd2() const { return sigma_nd2_; }

  // Density at w; throws std::runtime_error if the imaginary residue exceeds
  // 1e-10 * max(1, |real part|).
  double evaluate(double w) const;
  // Analytic total mass: every component integrates to exactly 1, so the mass
  // is the real part of the weight sum.
  double mass() const;
  // Analytic k-th moment (complex-centre Gaussian moments, term-wise).
  double moment(int k) const;
  double mean() const { return moment(1); }
  // <exp(-beta w)> = sum_j Re[weight_j exp(-beta c_j + beta^2 var_j/2)],
  // accumulated in the log domain.
  double exp_moment(double beta) const;
  double log_exp_moment(double beta) const;
  // [min Re(center) - n_sigma*max width, max Re(center) + n_sigma*max width].
  std::pair<double, double> extent(double n_sigma = 8.0) const;

 private:
  Scheme scheme_;
  std::vector<MixtureTerm> terms_;
  double sigma_e2_;
  double sigma_nd2_;
};

// Uniform grid of `points` samples spanning dist.extent(n_sigma).
std::vector<double> evaluation_grid(const GaussianMixture& dist, int points = 2001,
                                    double n_sigma = 8.0);

// Projective two-measurement work distribution: atoms at e_m(final) -
// e_n(initial) with joint-probability weights.
AtomDistribution pem_work_pdf(const Protocol& p, const Matrix& rho);

// Work-meter density: one component per (m, n, n') with weight
// exp(-(e_n-e_n')^2/(2 sigma_nd2)) * t(m,n,n'), centre
// e_m - (e_n+e_n')/2 + i <{X,P}> (e_n-e_n')/(2 hbar), variance sigma_e2.
GaussianMixture work_meter_pdf(const Protocol& p, const GaussianPointer& ptr, const Matrix& rho);

// Two separate Gaussian energy measurements: same weights and centres as the
// work-meter, variance doubled.
GaussianMixture two_gaussian_work_pdf(const Protocol& p, const GaussianPointer& ptr,
                                      const Matrix& rho);

// Weak-coupling limit of the work-meter density: suppression factors replaced
// by 1, everything else unchanged.
GaussianMixture imprecise_limit_pdf(const Protocol& p, const GaussianPointer& ptr,
                                    const Matrix& rho);

// Deconvolved signed atoms underlying the weak-coupling density; only defined
// for sym_xp = 0 (otherwise the inversion diverges and the call throws).
AtomDistribution imprecise_q(const Protocol& p, const Matrix& rho, double sym_xp);

// Single Gaussian centred at the measurement-free average work.
GaussianMixture broad_gaussian_approx(const Protocol& p, const Matrix& rho, double sigma_e2);

// Symmetrized two-time quasi-probability marginalized to work: atoms at
// e_m(final) - e_n(initial) with weights Tr rho {U^dag P_m U, P_n}/2.
AtomDistribution tmh_quasi_pdf(const Protocol& p, const Matrix& rho);

// Exact closed form for the work-meter average: endpoint energy difference of
// the dephased state plus coherence corrections damped by sigma_nd2.
double mean_work(const Protocol& p, const GaussianPointer& ptr, const Matrix& rho);

// G(u) = sum over (m,n,n') of suppressed weights times
// exp(i u c) exp(-sigma_e2 u^2 / 2); G(0) = 1, G(-u) = conj(G(u)).
class CharacteristicFunction {
 public:
  CharacteristicFunction(Scheme scheme, std::vector<MixtureTerm> terms);
  Complex operator()(double u) const;
  Scheme scheme() const { return scheme_; }
  const std::vector<MixtureTerm>& terms() const { return terms_; }

 private:
  Scheme scheme_;
  std::vector<MixtureTerm> terms_;
};

CharacteristicFunction characteristic_function(const Protocol& p, const GaussianPointer& ptr,
                                               const Matrix& rho);

// Margins of the three resolution inequalities, with "much smaller/larger"
// read as a factor of ten.
struct ResolutionReport {
  double sigma_e2 = 0.0;
  double sigma_nd2 = 0.0;
  double min_sq_initial_gap = 0.0; // min over distinct initial-level pairs (e_n - e_n')^2
  double min_sq_work_gap = 0.0;    // min over distinct merged work values (w - w')^2
  double sq_initial_spread = 0.0;  // (e_max - e_min)^2 over occupied initial levels
  double coherence_margin = 0.0;   // min_sq_initial_gap / (2 sigma_nd2); want >= 10
  double separation_margin = 0.0;  // min_sq_work_gap / (2 sigma_e2);     want >= 10
  double smearing_margin = 0.0;    // 2 sigma_nd2 / sq_initial_spread;    want >= 10
  bool accurate_verdict = false;   // coherence and separation margins both >= 10
  bool imprecise_verdict = false;  // smearing margin >= 10
};

// rho (optional) restricts the spread measure to levels occupied above
// `epsilon`; with rho == nullptr all levels count.
ResolutionReport resolution_check(const SpectralDecomposition& d0,
                                  const SpectralDecomposition& dt, const GaussianPointer& ptr,
                                  const Matrix* rho = nullptr, double epsilon = 1e-6);

} // namespace qwork
