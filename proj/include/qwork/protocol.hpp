#pragma once

#include <optional>
#include <vector>

#include "qwork/spectral.hpp"
#include "qwork/types.hpp"

namespace qwork {

struct ScheduleSegment {
  Matrix hamiltonian;
  double duration = 0.0; // must be > 0
};

// Piecewise-constant drive: segments applied in order, each for its duration.
struct Schedule {
  std::vector<ScheduleSegment> segments;
  double hbar = 1.0;
};

// A forward process: Hamiltonians at the two endpoints plus the unitary
// generated in between. When built from a Schedule the schedule is kept so the
// time-reversed propagator can be reconstructed by segment reversal.
struct Protocol {
  Matrix h_initial;
  Matrix h_final;
  Matrix propagator;
  std::optional<Schedule> schedule;

  int dim() const { return static_cast<int>(h_initial.rows()); }
};

// Product of segment propagators exp(-i H_k dt_k / hbar), later segments
// applied on the left. Empty schedule yields the identity (dim taken from the
// segments; throws if there are none to take it from).
Matrix propagator_from_schedule(const Schedule& s);

// Validates Hermiticity of both Hamiltonians and unitarity of u (1e-10).
Protocol make_protocol(const Matrix& h_initial, const Matrix& h_final, const Matrix& u);

// Instantaneous switch h_initial -> h_final: identity propagator, empty
// schedule retained so the reversed process is well defined.
Protocol sudden_quench(const Matrix& h_initial, const Matrix& h_final);

// Endpoint Hamiltonians are the first and last segment generators.
Protocol protocol_from_schedule(const Schedule& s);

// Tr[U^dag H_final U rho] - Tr[H_initial rho]; the imaginary residue must stay
// below 1e-10 (throws std::runtime_error otherwise).
double untouched_average_work(const Protocol& p, const Matrix& rho);

} // namespace qwork
