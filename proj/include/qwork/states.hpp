#pragma once

#include "qwork/spectral.hpp"
#include "qwork/types.hpp"

namespace qwork {

// Throws std::invalid_argument unless rho is Hermitian with unit trace
// (within 1e-12) and smallest eigenvalue >= -1e-10.
void check_density_matrix(const Matrix& rho, const char* what = "density matrix");

// Sum of P_n rho P_n over the eigenspaces of d (removes coherences between
// distinct levels).
Matrix project_diagonal(const Matrix& rho, const SpectralDecomposition& d);

// exp(-beta H) / Tr exp(-beta H), evaluated with the spectrum shifted by the
// ground energy so large beta cannot overflow.
Matrix canonical_state(const Matrix& h, double beta);

// Degeneracy-weighted partition function sum_n d_n exp(-beta e_n), returned as
// log Z to keep extreme beta finite.
double log_partition_function(const SpectralDecomposition& d, double beta);

// -(1/beta) * log(Z_final / Z_initial).
double free_energy_difference(const Matrix& h_initial, const Matrix& h_final, double beta);

// True when every level population Tr P_n rho matches d_n exp(-beta e_n)/Z
// within tol (coherences are not constrained).
bool has_boltzmann_diagonal(const Matrix& rho, const SpectralDecomposition& d, double beta,
                            double tol = 1e-10);

// Throws std::invalid_argument naming the first offending level when the
// Boltzmann-diagonal condition fails.
void require_boltzmann_diagonal(const Matrix& rho, const SpectralDecomposition& d, double beta,
                                const char* what, double tol = 1e-10);

} // namespace qwork
