#pragma once

#include <array>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nfs/constants.hpp"

namespace nfs {

// Spin stored as 2I so half-integers stay exact.
struct SpinHalfInt {
  int twice_value = 0;

  SpinHalfInt() = default;
  explicit SpinHalfInt(int twice) : twice_value(twice) {
    if (twice < 0) throw std::invalid_argument("SpinHalfInt: negative 2I");
  }
  bool valid_projection(int twice_m) const {
    return std::abs(twice_m) <= twice_value &&
           ((twice_m - twice_value) % 2 == 0);
  }
};

// One hyperfine transition line l = (m_g, m_e). Projections doubled.
struct TransitionLine {
  int two_m_g = 0;
  int two_m_e = 0;
  double omega_hf = 0.0;  // rad/s

  // photon spherical component q = m_e - m_g
  int two_q() const { return two_m_e - two_m_g; }
  int q() const { return two_q() / 2; }
};

struct OverrideLine {
  int two_m_g = 0;
  int two_m_e = 0;
  double omega = 0.0;  // rad/s
};

struct HyperfineConfig {
  double field_tesla = 0.0;
  double g_factor_ground = 0.0;
  double g_factor_excited = 0.0;
  std::optional<std::array<OverrideLine, 6>> override_frequencies;
};

// Hyperfine level scheme of the 57Fe 14.4 keV transition: I_g=1/2, I_e=3/2,
// six M1 lines. Sublevel shifts (rad/s) are kept so that every coherence
// (m_g, m_e), including the non-radiative |Delta m|=2 ones, has a frequency.
struct LevelScheme {
  SpinHalfInt I_g{1};
  SpinHalfInt I_e{3};
  std::array<TransitionLine, 6> lines;
  std::array<double, 2> ground_shift{};   // indexed by (2m_g+1)/2 -> {-1/2,+1/2}
  std::array<double, 4> excited_shift{};  // {-3/2,-1/2,+1/2,+3/2}

  double ground_level(int two_m_g) const {
    return ground_shift[(two_m_g + 1) / 2];
  }
  double excited_level(int two_m_e) const {
    return excited_shift[(two_m_e + 3) / 2];
  }
  // frequency of an arbitrary ground-excited coherence
  double omega(int two_m_g, int two_m_e) const {
    return excited_level(two_m_e) - ground_level(two_m_g);
  }
  const TransitionLine& line(int two_m_g, int two_m_e) const;

  // |Omega| of the Delta m = 0 lines
  double Omega0() const { return std::abs(omega(1, 1)); }
  // |Omega| of the (-1/2, +3/2)-type coherences
  double Omega1() const { return std::abs(omega(-1, 3)); }
};

// Wigner small-d matrix element d^I_{m_to, m_from}(beta), direct factorial sum.
double wigner_small_d(SpinHalfInt I, int two_m_to, int two_m_from, double beta);

// Wigner 3-j symbol via the Racah formula; all arguments doubled.
// Invalid (m-sum, triangle, projection) configurations return 0.
double three_j(int tj1, int tj2, int tj3, int tm1, int tm2, int tm3);

// Full rotation matrix element D^I_{m1,m2}(alpha,beta,gamma) (z-y-z).
std::complex<double> wigner_D(SpinHalfInt I, int two_m1, int two_m2,
                              double alpha, double beta, double gamma);

// Six-line scheme from a Zeeman model, or from explicit per-line overrides.
// With overrides, the sublevel shifts are reconstructed by least squares so
// that the |Delta m|=2 coherence frequencies remain defined.
LevelScheme build_level_scheme(const HyperfineConfig& config);

// Default config: Omega0 anchored to the first quantum-beat minimum at 8 ns,
// the Omega1/Omega0 ratio from the 57Fe ground/excited g-factors.
HyperfineConfig calibrated_config();

}  // namespace nfs
