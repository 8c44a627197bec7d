#include "qwork/fluctuation.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace qwork {

namespace {

bool is_real_matrix(const Matrix& m) {
  return m.imag().cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, m.cwiseAbs().maxCoeff());
}

void validate_pair_states(const ProcessPair& pair) {
  const SpectralDecomposition d0 = spectral_decompose(pair.forward.h_initial);
  const SpectralDecomposition dt = spectral_decompose(pair.backward.h_initial);
  require_boltzmann_diagonal(pair.forward_state, d0, pair.beta,
                             "process pair (forward state)");
  require_boltzmann_diagonal(pair.backward_state, dt, pair.beta,
                             "process pair (backward state)");
}

// Relative deviation, ignoring points where both sides are numerically dead.
double relative_violation(double lhs, double rhs) {
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  if (scale < 1e-290) return 0.0;
  return std::abs(lhs - rhs) / scale;
}

RelationReport smeared_detailed_balance(const ProcessPair& pair, double sigma_e2,
                                        bool two_measurements, const char* relation) {
  if (sigma_e2 <= 0.0) {
    throw std::invalid_argument("modified detailed-balance check: sigma_e2 must be > 0");
  }
  validate_pair_states(pair);
  const GaussianPointer ptr = GaussianPointer::pure(sigma_e2);
  const SpectralDecomposition d0 = spectral_decompose(pair.forward.h_initial);
  const SpectralDecomposition dt = spectral_decompose(pair.backward.h_initial);
  const Matrix rho_f = project_diagonal(pair.forward_state, d0);
  const Matrix rho_b = project_diagonal(pair.backward_state, dt);
  const GaussianMixture pdf_f = two_measurements
                                    ? two_gaussian_work_pdf(pair.forward, ptr, rho_f)
                                    : work_meter_pdf(pair.forward, ptr, rho_f);
  const GaussianMixture pdf_b = two_measurements
                                    ? two_gaussian_work_pdf(pair.backward, ptr, rho_b)
                                    : work_meter_pdf(pair.backward, ptr, rho_b);

  // The shift is half the component variance times beta.
  const double component_variance = two_measurements ? 2.0 * sigma_e2 : sigma_e2;
  const double shift = 0.5 * component_variance * pair.beta;
  const auto [flo, fhi] = pdf_f.extent(6.0);
  const auto [blo, bhi] = pdf_b.extent(6.0);
  // p_f is sampled at w - shift, p_b at -w - shift: cover both images.
  const double lo = std::min(flo + shift, -bhi - shift);
  const double hi = std::max(fhi + shift, -blo - shift);
  const int points = 2001;
  RelationReport report{relation, 0.0, points, 1e-8, false};
  for (int i = 0; i < points; ++i) {
    const double w = lo + (hi - lo) * i / (points - 1);
    const double lhs = pdf_f.evaluate(w - shift);
    const double rhs =
        std::exp(-pair.beta * (pair.delta_f - w)) * pdf_b.evaluate(-w - shift);
    report.max_violation = std::max(report.max_violation, relative_violation(lhs, rhs));
  }
  report.pass = report.max_violation <= report.threshold;
  return report;
}

} // namespace

Protocol build_backward(const Protocol& p, const std::optional<Matrix>& explicit_propagator) {
  if (explicit_propagator.has_value()) {
    return make_protocol(p.h_final, p.h_initial, *explicit_propagator);
  }
  if (!p.schedule.has_value()) {
    throw std::invalid_argument(
        "build_backward: protocol carries no schedule; supply the reversed propagator "
        "explicitly");
  }
  Schedule reversed = *p.schedule;
  std::reverse(reversed.segments.begin(), reversed.segments.end());
  for (const ScheduleSegment& seg : reversed.segments) {
    if (!is_real_matrix(seg.hamiltonian)) {
      std::clog << "build_backward: complex segment Hamiltonian; plain segment reversal "
                   "ignores anti-unitary conjugation\n";
      break;
    }
  }
  Matrix u = reversed.segments.empty()
                 ? Matrix::Identity(p.dim(), p.dim())
                 : propagator_from_schedule(reversed);
  Protocol backward = make_protocol(p.h_final, p.h_initial, u);
  backward.schedule = reversed;
  return backward;
}

ProcessPair make_process_pair(const Protocol& forward, const Matrix& forward_state, double beta,
                              const std::optional<Matrix>& backward_state,
                              const std::optional<Matrix>& explicit_backward_propagator) {
  if (beta <= 0.0) throw std::invalid_argument("make_process_pair: beta must be > 0");
  check_density_matrix(forward_state, "make_process_pair forward state");
  ProcessPair pair;
  pair.forward = forward;
  pair.forward_state = forward_state;
  pair.backward = build_backward(forward, explicit_backward_propagator);
  pair.backward_state =
      backward_state.has_value() ? *backward_state : canonical_state(forward.h_final, beta);
  check_density_matrix(pair.backward_state, "make_process_pair backward state");
  pair.beta = beta;
  pair.delta_f = free_energy_difference(forward.h_initial, forward.h_final, beta);
  validate_pair_states(pair);
  return pair;
}

RelationReport crooks_check(const ProcessPair& pair) {
  validate_pair_states(pair);
  const AtomDistribution forward = pem_work_pdf(pair.forward, pair.forward_state);
  const AtomDistribution backward = pem_work_pdf(pair.backward, pair.backward_state);
  RelationReport report{"crooks", 0.0, static_cast<int>(forward.atoms().size()), 1e-9, false};
  for (const Atom& a : forward.atoms()) {
    const double rhs =
        std::exp(-pair.beta * (pair.delta_f - a.w)) * backward.weight_at(-a.w);
    report.max_violation = std::max(report.max_violation, relative_violation(a.weight, rhs));
  }
  report.pass = report.max_violation <= report.threshold;
  return report;
}

RelationReport modified_crooks_check(const ProcessPair& pair, double sigma_e2) {
  return smeared_detailed_balance(pair, sigma_e2, false, "modified_crooks");
}

RelationReport modified_crooks_check_two_gaussian(const ProcessPair& pair, double sigma_e2) {
  return smeared_detailed_balance(pair, sigma_e2, true, "modified_crooks_two_gaussian");
}

JarzynskiResult modified_jarzynski(const Protocol& p, const GaussianPointer& ptr,
                                   const Matrix& rho_canonical, double beta) {
  if (beta <= 0.0) throw std::invalid_argument("modified_jarzynski: beta must be > 0");
  check_density_matrix(rho_canonical, "modified_jarzynski state");
  const SpectralDecomposition d0 = spectral_decompose(p.h_initial);
  require_boltzmann_diagonal(rho_canonical, d0, beta, "modified_jarzynski");
  const Matrix dephased = project_diagonal(rho_canonical, d0);
  const GaussianMixture pdf = work_meter_pdf(p, ptr, dephased);
  JarzynskiResult r;
  r.log_lhs = pdf.log_exp_moment(beta);
  r.log_rhs = -beta * free_energy_difference(p.h_initial, p.h_final, beta) +
              0.5 * beta * beta * ptr.sigma_e2();
  r.lhs = std::exp(r.log_lhs);
  r.rhs = std::exp(r.log_rhs);
  r.ratio_deviation = std::abs(std::expm1(r.log_lhs - r.log_rhs));
  return r;
}

} // namespace qwork
