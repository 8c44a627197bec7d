#include "qwork/protocol.hpp"

#include <cmath>
#include <stdexcept>

namespace qwork {

namespace {

void check_unitary(const Matrix& u, const char* what) {
  if (u.rows() != u.cols() || u.rows() == 0) {
    throw std::invalid_argument(std::string(what) + ": propagator must be square");
  }
  const Matrix gram = u.adjoint() * u;
  const double dev = (gram - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
  if (dev > 1e-10) {
    throw std::invalid_argument(std::string(what) + ": propagator is not unitary (deviation " +
                                std::to_string(dev) + ")");
  }
}

} // namespace

Matrix propagator_from_schedule(const Schedule& s) {
  if (s.hbar <= 0.0) throw std::invalid_argument("propagator_from_schedule: hbar must be > 0");
  if (s.segments.empty()) {
    throw std::invalid_argument(
        "propagator_from_schedule: empty schedule has no dimension; use sudden_quench or "
        "make_protocol for instantaneous processes");
  }
  const int dim = static_cast<int>(s.segments.front().hamiltonian.rows());
  Matrix u = Matrix::Identity(dim, dim);
  for (const ScheduleSegment& seg : s.segments) {
    if (seg.duration <= 0.0) {
      throw std::invalid_argument("propagator_from_schedule: segment durations must be > 0");
    }
    if (seg.hamiltonian.rows() != dim) {
      throw std::invalid_argument("propagator_from_schedule: segment dimension mismatch");
    }
    u = hermitian_propagator(seg.hamiltonian, seg.duration, s.hbar) * u;
  }
  return u;
}

Protocol make_protocol(const Matrix& h_initial, const Matrix& h_final, const Matrix& u) {
  check_hermitian(h_initial, "make_protocol(h_initial)");
  check_hermitian(h_final, "make_protocol(h_final)");
  check_unitary(u, "make_protocol");
  if (h_initial.rows() != u.rows() || h_final.rows() != u.rows()) {
    throw std::invalid_argument("make_protocol: dimension mismatch");
  }
  return Protocol{h_initial, h_final, u, std::nullopt};
}

Protocol sudden_quench(const Matrix& h_initial, const Matrix& h_final) {
  Protocol p = make_protocol(h_initial, h_final,
                             Matrix::Identity(h_initial.rows(), h_initial.cols()));
  p.schedule = Schedule{}; // empty schedule: the reversed process is also instantaneous
  return p;
}

Protocol protocol_from_schedule(const Schedule& s) {
  Matrix u = propagator_from_schedule(s);
  Protocol p = make_protocol(s.segments.front().hamiltonian, s.segments.back().hamiltonian, u);
  p.schedule = s;
  return p;
}

double untouched_average_work(const Protocol& p, const Matrix& rho) {
  if (rho.rows() != p.dim()) {
    throw std::invalid_argument("untouched_average_work: dimension mismatch");
  }
  const Complex final_term = (p.propagator.adjoint() * p.h_final * p.propagator * rho).trace();
  const Complex initial_term = (p.h_initial * rho).trace();
  const Complex value = final_term - initial_term;
  if (std::abs(value.imag()) > 1e-10 * std::max(1.0, std::abs(value.real()))) {
    throw std::runtime_error("untouched_average_work: imaginary residue " +
                             std::to_string(value.imag()));
  }
  return value.real();
}

} // namespace qwork
