#include "qwork/channels.hpp"

#include <cmath>
#include <stdexcept>

#include "atom_merge.hpp"

namespace qwork {

namespace {

// Shared precomputation: endpoint spectra and the sandwiched blocks
// A(m, n) = P_m(final) U P_n(initial).
struct Levels {
  SpectralDecomposition d0, dt;
  std::vector<Matrix> blocks; // blocks[m * L0 + n] = A(m, n)

  const Matrix& a(int m, int n) const { return blocks[static_cast<size_t>(m) * d0.levels() + n]; }
};

Levels make_levels(const Protocol& p, const Matrix& rho) {
  check_density_matrix(rho, "channel input state");
  if (rho.rows() != p.dim()) throw std::invalid_argument("channel: dimension mismatch");
  Levels lv;
  lv.d0 = spectral_decompose(p.h_initial);
  lv.dt = spectral_decompose(p.h_final);
  lv.blocks.reserve(static_cast<size_t>(lv.dt.levels()) * lv.d0.levels());
  for (int m = 0; m < lv.dt.levels(); ++m) {
    const Matrix left = lv.dt.projectors[m] * p.propagator;
    for (int n = 0; n < lv.d0.levels(); ++n) {
      lv.blocks.push_back(left * lv.d0.projectors[n]);
    }
  }
  return lv;
}

// Gaussian factor exp(-z^2 / (2 variance)) with the complex centre shift
// folded into z.
Complex gaussian_factor(double outcome, double mid, double imag_shift, double variance) {
  const Complex z(outcome - mid, imag_shift);
  return std::exp(-z * z / (2.0 * variance));
}

} // namespace

RealMatrix joint_probability(const Protocol& p, const Matrix& rho) {
  Levels lv = make_levels(p, rho);
  RealMatrix out(lv.dt.levels(), lv.d0.levels());
  for (int m = 0; m < lv.dt.levels(); ++m) {
    for (int n = 0; n < lv.d0.levels(); ++n) {
      out(m, n) = (lv.a(m, n) * rho * lv.a(m, n).adjoint()).trace().real();
    }
  }
  return out;
}

AmplitudeTensor amplitude_tensor(const Protocol& p, const Matrix& rho) {
  Levels lv = make_levels(p, rho);
  AmplitudeTensor t(lv.dt.levels(), lv.d0.levels());
  for (int m = 0; m < lv.dt.levels(); ++m) {
    for (int n = 0; n < lv.d0.levels(); ++n) {
      const Matrix left = lv.a(m, n) * rho;
      for (int np = 0; np < lv.d0.levels(); ++np) {
        t.at(m, n, np) = (left * lv.a(m, np).adjoint()).trace();
      }
    }
  }
  return t;
}

OutcomeOperator pem_operation(const Protocol& p, const Matrix& rho, double w) {
  Levels lv = make_levels(p, rho);
  detail::MergedWorkValues atoms =
      detail::merge_work_values(lv.d0.eigenvalues, lv.dt.eigenvalues);
  Matrix sum = Matrix::Zero(p.dim(), p.dim());
  for (size_t a = 0; a < atoms.values.size(); ++a) {
    if (std::abs(w - atoms.values[a]) <= atoms.merge_tol) {
      for (const auto& [m, n] : atoms.members[a]) {
        sum += lv.a(m, n) * rho * lv.a(m, n).adjoint();
      }
      break;
    }
  }
  return OutcomeOperator{w, std::move(sum)};
}

Matrix pem_nonselective(const Protocol& p, const Matrix& rho) {
  Levels lv = make_levels(p, rho);
  Matrix sum = Matrix::Zero(p.dim(), p.dim());
  for (int m = 0; m < lv.dt.levels(); ++m) {
    for (int n = 0; n < lv.d0.levels(); ++n) {
      sum += lv.a(m, n) * rho * lv.a(m, n).adjoint();
    }
  }
  return sum;
}

OutcomeOperator gaussian_energy_operation(const SpectralDecomposition& d,
                                          const GaussianPointer& ptr, const Matrix& rho,
                                          double E) {
  check_density_matrix(rho, "gaussian_energy_operation state");
  if (rho.rows() != d.dim) {
    throw std::invalid_argument("gaussian_energy_operation: dimension mismatch");
  }
  const EffectiveParams ep = effective_params(ptr);
  const double half_shift = 0.5 * ptr.sym_xp() / ptr.hbar();
  const double pref = 1.0 / std::sqrt(2.0 * kPi * ep.sigma_e2);
  Matrix sum = Matrix::Zero(d.dim, d.dim);
  for (int n = 0; n < d.levels(); ++n) {
    for (int np = 0; np < d.levels(); ++np) {
      const double en = d.eigenvalues[n], enp = d.eigenvalues[np];
      const double supp = std::exp(-(en - enp) * (en - enp) / (2.0 * ep.sigma_nd2));
      const Complex g =
          gaussian_factor(E, 0.5 * (en + enp), half_shift * (en - enp), ep.sigma_e2);
      sum += (pref * supp * g) * (d.projectors[n] * rho * d.projectors[np]);
    }
  }
  return OutcomeOperator{E, std::move(sum)};
}

OutcomeOperator kraus_energy_operation(const SpectralDecomposition& d, double sigma_e2,
                                       const Matrix& rho, double E) {
  if (sigma_e2 <= 0.0) {
    throw std::invalid_argument("kraus_energy_operation: sigma_e2 must be > 0");
  }
  check_density_matrix(rho, "kraus_energy_operation state");
  if (rho.rows() != d.dim) {
    throw std::invalid_argument("kraus_energy_operation: dimension mismatch");
  }
  const double pref = std::pow(2.0 * kPi * sigma_e2, -0.25);
  Matrix kraus = Matrix::Zero(d.dim, d.dim);
  for (int n = 0; n < d.levels(); ++n) {
    const double e = d.eigenvalues[n];
    kraus += pref * std::exp(-(E - e) * (E - e) / (4.0 * sigma_e2)) * d.projectors[n];
  }
  return OutcomeOperator{E, kraus * rho * kraus.adjoint()};
}

OutcomeOperator two_gaussian_work_operation(const Protocol& p, const GaussianPointer& ptr,
                                            const Matrix& rho, double w) {
  Levels lv = make_levels(p, rho);
  const EffectiveParams ep = effective_params(ptr);
  const double half_shift = 0.5 * ptr.sym_xp() / ptr.hbar();
  const double pref = 1.0 / std::sqrt(4.0 * kPi * ep.sigma_e2);
  Matrix sum = Matrix::Zero(p.dim(), p.dim());
  for (int m = 0; m < lv.dt.levels(); ++m) {
    for (int mp = 0; mp < lv.dt.levels(); ++mp) {
      const double de_final = lv.dt.eigenvalues[m] - lv.dt.eigenvalues[mp];
      for (int n = 0; n < lv.d0.levels(); ++n) {
        for (int np = 0; np < lv.d0.levels(); ++np) {
          const double de_initial = lv.d0.eigenvalues[n] - lv.d0.eigenvalues[np];
          const double w_mn = lv.dt.eigenvalues[m] - lv.d0.eigenvalues[n];
          const double w_mpnp = lv.dt.eigenvalues[mp] - lv.d0.eigenvalues[np];
          const double supp = std::exp(
              -(de_final * de_final + de_initial * de_initial) / (2.0 * ep.sigma_nd2));
          const Complex g = gaussian_factor(w, 0.5 * (w_mn + w_mpnp),
                                            half_shift * (w_mn - w_mpnp), 2.0 * ep.sigma_e2);
          sum += (pref * supp * g) * (lv.a(m, n) * rho * lv.a(mp, np).adjoint());
        }
      }
    }
  }
  return OutcomeOperator{w, std::move(sum)};
}

OutcomeOperator work_meter_operation(const Protocol& p, const GaussianPointer& ptr,
                                     const Matrix& rho, double w) {
  Levels lv = make_levels(p, rho);
  const EffectiveParams ep = effective_params(ptr);
  const double half_shift = 0.5 * ptr.sym_xp() / ptr.hbar();
  const double pref = 1.0 / std::sqrt(2.0 * kPi * ep.sigma_e2);
  Matrix sum = Matrix::Zero(p.dim(), p.dim());
  for (int m = 0; m < lv.dt.levels(); ++m) {
    for (int mp = 0; mp < lv.dt.levels(); ++mp) {
      for (int n = 0; n < lv.d0.levels(); ++n) {
        for (int np = 0; np < lv.d0.levels(); ++np) {
          const double w_mn = lv.dt.eigenvalues[m] - lv.d0.eigenvalues[n];
          const double w_mpnp = lv.dt.eigenvalues[mp] - lv.d0.eigenvalues[np];
          const double dw = w_mn - w_mpnp;
          const double supp = std::exp(-dw * dw / (2.0 * ep.sigma_nd2));
          const Complex g =
              gaussian_factor(w, 0.5 * (w_mn + w_mpnp), half_shift * dw, ep.sigma_e2);
          sum += (pref * supp * g) * (lv.a(m, n) * rho * lv.a(mp, np).adjoint());
        }
      }
    }
  }
  return OutcomeOperator{w, std::move(sum)};
}

Matrix work_meter_nonselective(const Protocol& p, const GaussianPointer& ptr, const Matrix& rho) {
  Levels lv = make_levels(p, rho);
  const double sigma_nd2 = ptr.sigma_nd2();
  Matrix sum = Matrix::Zero(p.dim(), p.dim());
  for (int m = 0; m < lv.dt.levels(); ++m) {
    for (int mp = 0; mp < lv.dt.levels(); ++mp) {
      for (int n = 0; n < lv.d0.levels(); ++n) {
        for (int np = 0; np < lv.d0.levels(); ++np) {
          const double dw = lv.dt.eigenvalues[m] - lv.d0.eigenvalues[n] -
                            lv.dt.eigenvalues[mp] + lv.d0.eigenvalues[np];
          sum += std::exp(-dw * dw / (2.0 * sigma_nd2)) *
                 (lv.a(m, n) * rho * lv.a(mp, np).adjoint());
        }
      }
    }
  }
  return sum;
}

Matrix two_gaussian_nonselective(const Protocol& p, const GaussianPointer& ptr,
                                 const Matrix& rho) {
  Levels lv = make_levels(p, rho);
  const double sigma_nd2 = ptr.sigma_nd2();
  Matrix sum = Matrix::Zero(p.dim(), p.dim());
  for (int m = 0; m < lv.dt.levels(); ++m) {
    for (int mp = 0; mp < lv.dt.levels(); ++mp) {
      const double de_final = lv.dt.eigenvalues[m] - lv.dt.eigenvalues[mp];
      for (int n = 0; n < lv.d0.levels(); ++n) {
        for (int np = 0; np < lv.d0.levels(); ++np) {
          const double de_initial = lv.d0.eigenvalues[n] - lv.d0.eigenvalues[np];
          sum += std::exp(-(de_final * de_final + de_initial * de_initial) /
                          (2.0 * sigma_nd2)) *
                 (lv.a(m, n) * rho * lv.a(mp, np).adjoint());
        }
      }
    }
  }
  return sum;
}

} // namespace qwork
