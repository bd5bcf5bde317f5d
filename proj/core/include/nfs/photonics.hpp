#pragma once

#include <complex>
#include <iosfwd>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nfs/scattering.hpp"

namespace nfs {

struct WindowSpec {
  std::pair<double, double> sigma_window{0.0, 0.0};  // s
  std::pair<double, double> pi_window{0.0, 0.0};
  void validate(const TimeGrid& grid) const;  // disjoint, inside the grid
};

struct ZeroPhotonError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// |Psi> = alpha |1>_sigma |0>_pi + beta |0>_sigma |1>_pi
struct TwoModeState {
  std::complex<double> alpha{1.0, 0.0};
  std::complex<double> beta{0.0, 0.0};
  double loss_fraction = 0.0;
};

struct InterferometerConfig {
  double phase_sigma = 0.0;
  double phase_pi = 0.0;
  double splitter_transmittance = 0.5;
};

// |beta|^2 from the pi-window pi-intensity, |alpha|^2 from the sigma-window
// sigma-intensity, jointly normalized; relative phase set to 0 by convention
// (only phase differences are observable, absorbed into the shifters).
// loss_fraction counts energy outside the windows plus an incoherent-decay
// proxy of ic_ratio times the coherent total. Throws ZeroPhotonError when the
// combined window energy is negligible (< 1e-20 of the coherent total).
TwoModeState extract_modes(const FieldRecord& rec, const WindowSpec& windows,
                           const NuclearConstants& consts);

// Lossless Mach-Zehnder recombination; for a 50/50 splitter
// P_D1 = 1/2 + |alpha||beta| cos(dphi + arg(alpha conj(beta))), dphi =
// phase_sigma - phase_pi. Conditioned on photon arrival.
std::pair<double, double> detector_probabilities(const TwoModeState& state,
                                                 const InterferometerConfig& cfg);

// V = 2 |alpha| |beta|
double visibility(const TwoModeState& state);

struct BellSettings {
  double a = 0.0;
  double a_prime = 1.5707963267948966;   // pi/2
  double b = 0.7853981633974483;         // pi/4
  double b_prime = 2.356194490192345;    // 3pi/4
};

struct BellResult {
  double S = 0.0;
  double classical_bound = 2.0;
  double E_ab = 0.0, E_abp = 0.0, E_apb = 0.0, E_apbp = 0.0;
};

// E(phi_a, phi_b) = V cos(phi_a - phi_b + arg(alpha conj(beta)));
// S = |E(a,b) - E(a,b') + E(a',b) + E(a',b')| (CHSH-style surrogate).
double correlation(const TwoModeState& state, double phi_a, double phi_b);
BellResult bell_scan(const TwoModeState& state, const BellSettings& settings);

// CSV scan over a (phi_a, phi_b) grid: `phi_a,phi_b,E,P_D1,P_D2` rows plus a
// trailing summary line with S at `settings` and the classical bound.
void write_bell_scan_csv(const TwoModeState& state, const BellSettings& settings,
                         int points_per_axis, std::ostream& os);

}  // namespace nfs
