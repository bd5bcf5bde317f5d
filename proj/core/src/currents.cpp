#include "nfs/currents.hpp"

#include <cmath>

namespace nfs {

using namespace std::complex_literals;

void Geometry::validate() const {
  if (std::abs(k_hat.norm() - 1.0) > 1e-12 || std::abs(e0.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("Geometry: direction vectors must be unit");
  if (std::abs(k_hat.dot(e0)) > 1e-12)
    throw std::invalid_argument("Geometry: e0 must be transverse to k");
  if ((frame * frame.transpose() - Eigen::Matrix3d::Identity()).norm() > 1e-10)
    throw std::invalid_argument("Geometry: frame must be orthogonal");
}

Eigen::Vector3cd spherical_unit_vector(int q) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  switch (q) {
    case 0:
      return {0.0, 0.0, 1.0};
    case 1:
      return {-inv_sqrt2, -1i * inv_sqrt2, 0.0};
    case -1:
      return {inv_sqrt2, -1i * inv_sqrt2, 0.0};
    default:
      throw std::invalid_argument("spherical_unit_vector: q must be -1, 0, +1");
  }
}

double current_prefactor(const NuclearConstants& consts) {
  // shared [3(2I_e+1) c^5 Gamma_gamma / (4 w0^3)]^(1/2)-type factor; absolute
  // dimensioned pieces drop out of the reported (normalized) intensities, so
  // only the Gamma_gamma dependence is kept.
  return std::sqrt(consts.Gamma_gamma_eV() / hbar_eV_s);
}

CurrentMatrixElement current_element(const TransitionLine& line,
                                     const Geometry& geom,
                                     const NuclearConstants& consts) {
  CurrentMatrixElement elem;
  elem.line = line;
  elem.prefactor = current_prefactor(consts);
  if (std::abs(line.two_q()) > 2) return elem;  // zero element, 3-j selection
  // the 3-j selection rule picks the photon component q = m_g - m_e
  const int q = -line.q();
  const double w =
      three_j(1, 2, 3, -line.two_m_g, 2 * q, line.two_m_e) * ((q % 2) ? -1.0 : 1.0);
  if (w == 0.0) return elem;
  const Eigen::Vector3cd n_lab = geom.frame * spherical_unit_vector(-q);
  const Eigen::Vector3cd k_c = geom.k_hat.cast<std::complex<double>>();
  elem.j_vec = elem.prefactor * w * k_c.cross(n_lab);
  return elem;
}

Eigen::Vector3cd time_current(const CurrentMatrixElement& elem, double t,
                              const NuclearConstants& consts) {
  const std::complex<double> phase =
      std::exp(-1i * elem.line.omega_hf * t - 0.5 * consts.decay_rate() * t);
  return elem.j_vec * phase;
}

std::complex<double> coupling(const CurrentMatrixElement& elem,
                              const Eigen::Vector3d& e0) {
  return elem.j_vec.dot(e0.cast<std::complex<double>>());
}

}  // namespace nfs
