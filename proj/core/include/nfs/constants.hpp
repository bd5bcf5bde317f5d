#pragma once

namespace nfs {

// CODATA-style constants in eV-based units.
inline constexpr double hbar_eV_s = 6.582119569e-16;
inline constexpr double mu_N_eV_per_T = 3.1524512550e-8;

// 14.413 keV Moessbauer transition of 57Fe.
struct NuclearConstants {
  double E0_eV = 14413.0;
  double tau_s = 141e-9;     // excited-state lifetime
  double ic_ratio = 8.0;     // Gamma_IC / Gamma_gamma

  double Gamma0_eV() const { return hbar_eV_s / tau_s; }
  double Gamma_gamma_eV() const { return Gamma0_eV() / (1.0 + ic_ratio); }
  // total decay rate Gamma0/hbar in 1/s
  double decay_rate() const { return 1.0 / tau_s; }
};

}  // namespace nfs
