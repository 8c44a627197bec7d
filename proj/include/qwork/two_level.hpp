#pragma once

#include "qwork/protocol.hpp"
#include "qwork/types.hpp"

namespace qwork {

// Two-level system with level splitting eps: basis vector 0 is the excited
// state (+eps/2), basis vector 1 the ground state (-eps/2).
Matrix two_level_hamiltonian(double eps);

// Final Hamiltonian of the instantaneous-switch example: same splitting
// structure rotated onto the transverse axis, (eps/2) sigma_x.
Matrix two_level_transverse_hamiltonian(double eps);

// rho = [[1-p, conj(q)], [q, p]]: p is the ground-state population, q the
// <ground|rho|excited> coherence. Validates positivity (|q|^2 <= p(1-p)).
Matrix two_level_state(double p, Complex q);

// Instantaneous switch from the longitudinal to the transverse Hamiltonian.
Protocol two_level_quench(double eps_initial, double eps_final);

} // namespace qwork
