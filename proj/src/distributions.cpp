#include "qwork/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "atom_merge.hpp"

namespace qwork {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Moment of a unit-mass Gaussian with complex centre c: E[(c + s Z)^k] with
// Z standard normal, via the binomial sum over even powers of s.
Complex complex_gaussian_moment(Complex c, double variance, int k) {
  Complex total(0.0, 0.0);
  double binom = 1.0; // C(k, 2j) * (2j-1)!! accumulated incrementally
  for (int j = 0; 2 * j <= k; ++j) {
    if (j > 0) {
      // C(k, 2j)(2j-1)!! = C(k, 2j-2)(2j-3)!! * (k-2j+2)(k-2j+1)/(2j)
      binom *= static_cast<double>((k - 2 * j + 2)) * (k - 2 * j + 1) / (2.0 * j);
    }
    total += binom * std::pow(variance, j) * std::pow(c, k - 2 * j);
  }
  return total;
}

double require_small_imag(Complex value, const char* what) {
  if (std::abs(value.imag()) > 1e-10 * std::max(1.0, std::abs(value.real()))) {
    throw std::runtime_error(std::string(what) + ": imaginary residue " +
                             std::to_string(value.imag()));
  }
  return value.real();
}

struct MixtureInputs {
  SpectralDecomposition d0, dt;
  AmplitudeTensor tensor;
  EffectiveParams ep;
  double half_shift = 0.0; // <{X,P}> / (2 hbar)
};

MixtureInputs gather(const Protocol& p, const GaussianPointer& ptr, const Matrix& rho) {
  MixtureInputs in{spectral_decompose(p.h_initial), spectral_decompose(p.h_final),
                   amplitude_tensor(p, rho), effective_params(ptr),
                   0.5 * ptr.sym_xp() / ptr.hbar()};
  return in;
}

GaussianMixture build_gaussian_scheme(Scheme scheme, const Protocol& p,
                                      const GaussianPointer& ptr, const Matrix& rho) {
  MixtureInputs in = gather(p, ptr, rho);
  const bool suppress = scheme != Scheme::imprecise_limit;
  const double variance =
      scheme == Scheme::two_gaussian ? 2.0 * in.ep.sigma_e2 : in.ep.sigma_e2;
  std::vector<MixtureTerm> terms;
  terms.reserve(static_cast<size_t>(in.dt.levels()) * in.d0.levels() * in.d0.levels());
  for (int m = 0; m < in.dt.levels(); ++m) {
    for (int n = 0; n < in.d0.levels(); ++n) {
      for (int np = 0; np < in.d0.levels(); ++np) {
        const double en = in.d0.eigenvalues[n], enp = in.d0.eigenvalues[np];
        const double de = en - enp;
        double factor = 1.0;
        if (suppress) factor = std::exp(-de * de / (2.0 * in.ep.sigma_nd2));
        const Complex weight = factor * in.tensor.at(m, n, np);
        const Complex center(in.dt.eigenvalues[m] - 0.5 * (en + enp), in.half_shift * de);
        terms.push_back(MixtureTerm{weight, center, variance});
      }
    }
  }
  return GaussianMixture(scheme, std::move(terms), in.ep.sigma_e2, in.ep.sigma_nd2);
}

} // namespace

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::pem: return "pem";
    case Scheme::work_meter: return "work_meter";
    case Scheme::two_gaussian: return "two_gaussian";
    case Scheme::imprecise_limit: return "imprecise";
    case Scheme::broad_gaussian: return "broad_gaussian";
    case Scheme::tmh: return "tmh";
  }
  return "unknown";
}

AtomDistribution::AtomDistribution(Scheme scheme, std::vector<Atom> atoms, double merge_tol)
    : scheme_(scheme), merge_tol_(merge_tol) {
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(atoms.size());
  for (const Atom& a : atoms) pairs.push_back({a.w, a.weight});
  for (const auto& [w, weight] : detail::merge_weighted_atoms(std::move(pairs), merge_tol)) {
    atoms_.push_back(Atom{w, weight});
  }
  signed_ = false;
  for (const Atom& a : atoms_) {
    if (a.weight < -1e-12) signed_ = true;
  }
}

double AtomDistribution::mass() const {
  double sum = 0.0;
  for (const Atom& a : atoms_) sum += a.weight;
  return sum;
}

double AtomDistribution::moment(int k) const {
  double sum = 0.0;
  for (const Atom& a : atoms_) sum += a.weight * std::pow(a.w, k);
  return sum;
}

double AtomDistribution::exp_moment(double beta) const {
  return std::exp(log_exp_moment(beta));
}

double AtomDistribution::log_exp_moment(double beta) const {
  double shift = -kInf;
  for (const Atom& a : atoms_) shift = std::max(shift, -beta * a.w);
  double sum = 0.0;
  for (const Atom& a : atoms_) sum += a.weight * std::exp(-beta * a.w - shift);
  if (sum <= 0.0) {
    throw std::runtime_error("log_exp_moment: non-positive exponential average");
  }
  return shift + std::log(sum);
}

double AtomDistribution::weight_at(double w) const {
  for (const Atom& a : atoms_) {
    if (std::abs(a.w - w) <= merge_tol_) return a.weight;
  }
  return 0.0;
}

GaussianMixture::GaussianMixture(Scheme scheme, std::vector<MixtureTerm> terms, double sigma_e2,
                                 double sigma_nd2)
    : scheme_(scheme), terms_(std::move(terms)), sigma_e2_(sigma_e2), sigma_nd2_(sigma_nd2) {
  for (const MixtureTerm& t : terms_) {
    if (t.variance <= 0.0) {
      throw std::invalid_argument("GaussianMixture: component variances must be > 0");
    }
  }
}

double GaussianMixture::evaluate(double w) const {
  Complex total(0.0, 0.0);
  for (const MixtureTerm& t : terms_) {
    const Complex z = w - t.center;
    total += t.weight * std::exp(-z * z / (2.0 * t.variance)) /
             std::sqrt(2.0 * kPi * t.variance);
  }
  return require_small_imag(total, "GaussianMixture::evaluate");
}

double GaussianMixture::mass() const {
  Complex total(0.0, 0.0);
  for (const MixtureTerm& t : terms_) total += t.weight;
  return require_small_imag(total, "GaussianMixture::mass");
}

double GaussianMixture::moment(int k) const {
  Complex total(0.0, 0.0);
  for (const MixtureTerm& t : terms_) {
    total += t.weight * complex_gaussian_moment(t.center, t.variance, k);
  }
  return require_small_imag(total, "GaussianMixture::moment");
}

double GaussianMixture::exp_moment(double beta) const {
  return std::exp(log_exp_moment(beta));
}

double GaussianMixture::log_exp_moment(double beta) const {
  // Term j contributes weight_j * exp(-beta c_j + beta^2 var_j / 2); factor
  // out the largest real exponent before summing.
  double shift = -kInf;
  std::vector<double> log_mag(terms_.size());
  std::vector<double> phase(terms_.size());
  for (size_t j = 0; j < terms_.size(); ++j) {
    const MixtureTerm& t = terms_[j];
    const double mag = std::abs(t.weight);
    log_mag[j] = (mag > 0.0 ? std::log(mag) : -kInf) - beta * t.center.real() +
                 0.5 * beta * beta * t.variance;
    phase[j] = std::arg(t.weight) - beta * t.center.imag();
    shift = std::max(shift, log_mag[j]);
  }
  double sum = 0.0;
  for (size_t j = 0; j < terms_.size(); ++j) {
    if (std::isfinite(log_mag[j])) sum += std::exp(log_mag[j] - shift) * std::cos(phase[j]);
  }
  if (sum <= 0.0) {
    throw std::runtime_error("log_exp_moment: non-positive exponential average");
  }
  return shift + std::log(sum);
}

std::pair<double, double> GaussianMixture::extent(double n_sigma) const {
  double lo = kInf, hi = -kInf;
  for (const MixtureTerm& t : terms_) {
    const double width = n_sigma * std::sqrt(t.variance);
    lo = std::min(lo, t.center.real() - width);
    hi = std::max(hi, t.center.real() + width);
  }
  return {lo, hi};
}

std::vector<double> evaluation_grid(const GaussianMixture& dist, int points, double n_sigma) {
  if (points < 2) throw std::invalid_argument("evaluation_grid: need at least 2 points");
  const auto [lo, hi] = dist.extent(n_sigma);
  std::vector<double> grid(points);
  const double step = (hi - lo) / (points - 1);
  for (int i = 0; i < points; ++i) grid[i] = lo + step * i;
  return grid;
}

AtomDistribution pem_work_pdf(const Protocol& p, const Matrix& rho) {
  const RealMatrix joint = joint_probability(p, rho);
  const SpectralDecomposition d0 = spectral_decompose(p.h_initial);
  const SpectralDecomposition dt = spectral_decompose(p.h_final);
  detail::MergedWorkValues merged = detail::merge_work_values(d0.eigenvalues, dt.eigenvalues);
  std::vector<Atom> atoms;
  for (size_t a = 0; a < merged.values.size(); ++a) {
    double weight = 0.0;
    for (const auto& [m, n] : merged.members[a]) weight += joint(m, n);
    atoms.push_back(Atom{merged.values[a], weight});
  }
  return AtomDistribution(Scheme::pem, std::move(atoms), merged.merge_tol);
}

GaussianMixture work_meter_pdf(const Protocol& p, const GaussianPointer& ptr, const Matrix& rho) {
  return build_gaussian_scheme(Scheme::work_meter, p, ptr, rho);
}

GaussianMixture two_gaussian_work_pdf(const Protocol& p, const GaussianPointer& ptr,
                                      const Matrix& rho) {
  return build_gaussian_scheme(Scheme::two_gaussian, p, ptr, rho);
}

GaussianMixture imprecise_limit_pdf(const Protocol& p, const GaussianPointer& ptr,
                                    const Matrix& rho) {
  return build_gaussian_scheme(Scheme::imprecise_limit, p, ptr, rho);
}

AtomDistribution imprecise_q(const Protocol& p, const Matrix& rho, double sym_xp) {
  if (sym_xp != 0.0) {
    throw std::invalid_argument(
        "imprecise_q: deconvolution diverges for sym_xp != 0; only sym_xp = 0 is supported");
  }
  const SpectralDecomposition d0 = spectral_decompose(p.h_initial);
  const SpectralDecomposition dt = spectral_decompose(p.h_final);
  const AmplitudeTensor t = amplitude_tensor(p, rho);
  std::vector<std::pair<double, Complex>> raw;
  for (int m = 0; m < dt.levels(); ++m) {
    for (int n = 0; n < d0.levels(); ++n) {
      for (int np = 0; np < d0.levels(); ++np) {
        raw.push_back({dt.eigenvalues[m] -
                           0.5 * (d0.eigenvalues[n] + d0.eigenvalues[np]),
                       t.at(m, n, np)});
      }
    }
  }
  double lo = kInf, hi = -kInf;
  for (const auto& entry : raw) {
    lo = std::min(lo, entry.first);
    hi = std::max(hi, entry.first);
  }
  // (n, n') and (n', n) contribute conjugate weights at the same position, so
  // taking real parts term-wise equals summing each conjugate pair.
  std::vector<Atom> atoms;
  for (const auto& [w, weight] : raw) atoms.push_back(Atom{w, weight.real()});
  return AtomDistribution(Scheme::imprecise_limit, std::move(atoms), 1e-8 * (hi - lo));
}

GaussianMixture broad_gaussian_approx(const Protocol& p, const Matrix& rho, double sigma_e2) {
  if (sigma_e2 <= 0.0) {
    throw std::invalid_argument("broad_gaussian_approx: sigma_e2 must be > 0");
  }
  check_density_matrix(rho, "broad_gaussian_approx state");
  const double center = untouched_average_work(p, rho);
  return GaussianMixture(Scheme::broad_gaussian,
                         {MixtureTerm{Complex(1.0, 0.0), Complex(center, 0.0), sigma_e2}},
                         sigma_e2, -1.0);
}

AtomDistribution tmh_quasi_pdf(const Protocol& p, const Matrix& rho) {
  check_density_matrix(rho, "tmh_quasi_pdf state");
  if (rho.rows() != p.dim()) throw std::invalid_argument("tmh_quasi_pdf: dimension mismatch");
  const SpectralDecomposition d0 = spectral_decompose(p.h_initial);
  const SpectralDecomposition dt = spectral_decompose(p.h_final);
  detail::MergedWorkValues merged = detail::merge_work_values(d0.eigenvalues, dt.eigenvalues);
  std::vector<Atom> atoms;
  for (size_t a = 0; a < merged.values.size(); ++a) {
    Complex weight(0.0, 0.0);
    for (const auto& [m, n] : merged.members[a]) {
      const Matrix heis = p.propagator.adjoint() * dt.projectors[m] * p.propagator;
      weight += 0.5 * (rho * (heis * d0.projectors[n] + d0.projectors[n] * heis)).trace();
    }
    atoms.push_back(Atom{merged.values[a], require_small_imag(weight, "tmh_quasi_pdf")});
  }
  return AtomDistribution(Scheme::tmh, std::move(atoms), merged.merge_tol);
}

double mean_work(const Protocol& p, const GaussianPointer& ptr, const Matrix& rho) {
  check_density_matrix(rho, "mean_work state");
  if (rho.rows() != p.dim()) throw std::invalid_argument("mean_work: dimension mismatch");
  const SpectralDecomposition d0 = spectral_decompose(p.h_initial);
  const double sigma_nd2 = ptr.sigma_nd2();
  const Matrix dephased = project_diagonal(rho, d0);
  Complex total = (p.h_final * p.propagator * dephased * p.propagator.adjoint()).trace() -
                  (p.h_initial * rho).trace();
  for (int n = 0; n < d0.levels(); ++n) {
    for (int np = 0; np < n; ++np) {
      const double de = d0.eigenvalues[n] - d0.eigenvalues[np];
      const Matrix cross = d0.projectors[n] * rho * d0.projectors[np] +
                           d0.projectors[np] * rho * d0.projectors[n];
      total += std::exp(-de * de / (2.0 * sigma_nd2)) *
               (p.h_final * p.propagator * cross * p.propagator.adjoint()).trace();
    }
  }
  return require_small_imag(total, "mean_work");
}

CharacteristicFunction::CharacteristicFunction(Scheme scheme, std::vector<MixtureTerm> terms)
    : scheme_(scheme), terms_(std::move(terms)) {}

Complex CharacteristicFunction::operator()(double u) const {
  const Complex i(0.0, 1.0);
  Complex total(0.0, 0.0);
  for (const MixtureTerm& t : terms_) {
    total += t.weight * std::exp(i * u * t.center - 0.5 * t.variance * u * u);
  }
  return total;
}

CharacteristicFunction characteristic_function(const Protocol& p, const GaussianPointer& ptr,
                                               const Matrix& rho) {
  GaussianMixture mix = work_meter_pdf(p, ptr, rho);
  return CharacteristicFunction(Scheme::work_meter, mix.terms());
}

ResolutionReport resolution_check(const SpectralDecomposition& d0,
                                  const SpectralDecomposition& dt, const GaussianPointer& ptr,
                                  const Matrix* rho, double epsilon) {
  ResolutionReport r;
  r.sigma_e2 = ptr.sigma_e2();
  r.sigma_nd2 = ptr.sigma_nd2();

  r.min_sq_initial_gap = kInf;
  for (size_t n = 1; n < d0.eigenvalues.size(); ++n) {
    const double gap = d0.eigenvalues[n] - d0.eigenvalues[n - 1];
    r.min_sq_initial_gap = std::min(r.min_sq_initial_gap, gap * gap);
  }

  detail::MergedWorkValues merged = detail::merge_work_values(d0.eigenvalues, dt.eigenvalues);
  r.min_sq_work_gap = kInf;
  for (size_t a = 1; a < merged.values.size(); ++a) {
    const double gap = merged.values[a] - merged.values[a - 1];
    r.min_sq_work_gap = std::min(r.min_sq_work_gap, gap * gap);
  }

  double lo = kInf, hi = -kInf;
  for (size_t n = 0; n < d0.eigenvalues.size(); ++n) {
    if (rho != nullptr) {
      const double population = (d0.projectors[n] * (*rho)).trace().real();
      if (population < epsilon) continue;
    }
    lo = std::min(lo, d0.eigenvalues[n]);
    hi = std::max(hi, d0.eigenvalues[n]);
  }
  const double spread = (hi > lo) ? hi - lo : 0.0;
  r.sq_initial_spread = spread * spread;

  r.coherence_margin = r.min_sq_initial_gap / (2.0 * r.sigma_nd2);
  r.separation_margin = r.min_sq_work_gap / (2.0 * r.sigma_e2);
  r.smearing_margin =
      r.sq_initial_spread > 0.0 ? 2.0 * r.sigma_nd2 / r.sq_initial_spread : kInf;
  r.accurate_verdict = r.coherence_margin >= 10.0 && r.separation_margin >= 10.0;
  r.imprecise_verdict = r.smearing_margin >= 10.0;
  return r;
}

} // namespace qwork
