#pragma once

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <vector>

#include "nfs/switching.hpp"

namespace nfs {

struct SampleConfig {
  double effective_thickness_xi = 5.0;  // xi = sigma_R N0 L / 4
  double thickness_m = 1e-6;            // reporting only; K*L fixed by xi
};

struct TimeGrid {
  double t_start = 0.0;
  double t_end = 300e-9;
  double dt = 0.05e-9;

  int samples() const;
  double time(int i) const { return t_start + i * dt; }
  void validate() const;
};

// Scattered field at the sample exit, projected on e_x (sigma) and e_z (pi).
// Intensities are in units of the unperturbed first-order t->0+ intensity.
struct FieldRecord {
  TimeGrid grid;
  Eigen::VectorXcd E_sigma;
  Eigen::VectorXcd E_pi;
  std::vector<Eigen::VectorXcd> order_sigma;  // per-order terms, optional
  std::vector<Eigen::VectorXcd> order_pi;
  int truncation_order = 1;
  bool converged = true;
  double residual_rel = 0.0;  // max|E_last| / max|E| when not converged
};

// First scattering order: piecewise closed form
//   E1(t) = sum_l A_l exp(-i Omega_l (t - t_k) - Gamma0 t / (2 hbar))
// per inter-switch interval k, from the interval's own amplitude set.
// The grid must be covered by the history's validity windows.
FieldRecord first_order_field(const std::vector<AmplitudeSet>& history,
                              const TimeGrid& grid, const LevelScheme& scheme,
                              const Geometry& geom,
                              const NuclearConstants& consts);

// Truncated multiple-scattering series: Picard iteration in scattering order
// with per-line running memory integrals (trapezoidal, O(samples) per order).
// Stops at max_order or when max|E_{n+1}| < tol_rel * max|sum E|; the delta
// pulse enters analytically through the first-order source only.
FieldRecord solve_series(const SampleConfig& sample,
                         const SwitchSequence& sequence,
                         const LevelScheme& scheme, const Geometry& geom,
                         const NuclearConstants& consts, const TimeGrid& grid,
                         int max_order = 8, double tol_rel = 1e-8);

struct IntensityRow {
  double t = 0.0;
  double I_total = 0.0;
  double I_sigma = 0.0;
  double I_pi = 0.0;
};

std::vector<IntensityRow> intensity_series(const FieldRecord& rec);

// CSV: t_ns,I_total,I_sigma,I_pi,ReE_sigma,ImE_sigma,ReE_pi,ImE_pi
void write_intensity_csv(const FieldRecord& rec, std::ostream& os);

// Integral of intensity over [t_lo, t_hi] (trapezoid on the record grid).
double window_energy_sigma(const FieldRecord& rec, double t_lo, double t_hi);
double window_energy_pi(const FieldRecord& rec, double t_lo, double t_hi);

}  // namespace nfs
