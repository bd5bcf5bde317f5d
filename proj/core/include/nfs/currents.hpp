#pragma once

#include <Eigen/Dense>
#include <complex>

#include "nfs/angular.hpp"
#include "nfs/constants.hpp"

namespace nfs {

// Fixed lab-frame geometry: beam along k_hat, linear polarization e0 (perp to
// k), and the initial quantization axis. `frame` maps quantization-frame
// coordinates to lab coordinates; its third column is the quantization axis.
struct Geometry {
  Eigen::Vector3d k_hat{0.0, 1.0, 0.0};
  Eigen::Vector3d e0{1.0, 0.0, 0.0};
  Eigen::Matrix3d frame = Eigen::Matrix3d::Identity();
  double k_magnitude = 7.3e10;  // 1/m, 14.4 keV photon

  Eigen::Vector3d quantization_axis() const { return frame.col(2); }
  void validate() const;
};

struct CurrentMatrixElement {
  TransitionLine line;
  Eigen::Vector3cd j_vec = Eigen::Vector3cd::Zero();  // lab frame
  double prefactor = 1.0;
};

// Spherical unit vectors n_q in the quantization frame.
Eigen::Vector3cd spherical_unit_vector(int q);

// Shared prefactor of all six currents; proportional to sqrt(Gamma_gamma).
double current_prefactor(const NuclearConstants& consts);

// j_l = prefactor * 3j(Ig,1,Ie; -m_g,q,m_e) * (-1)^q * k_hat x n_{-q},
// with n_{-q} rotated into the lab frame before the cross product.
CurrentMatrixElement current_element(const TransitionLine& line,
                                     const Geometry& geom,
                                     const NuclearConstants& consts);

// J_l(t) = j_l * exp(-i Omega_l t - Gamma0 t / (2 hbar))
Eigen::Vector3cd time_current(const CurrentMatrixElement& elem, double t,
                              const NuclearConstants& consts);

// j_vec^dagger . e0
std::complex<double> coupling(const CurrentMatrixElement& elem,
                              const Eigen::Vector3d& e0);

}  // namespace nfs
