#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "nfs/currents.hpp"

namespace nfs {

struct SampleConfig;  // scattering.hpp

// Euler angles (z-y-z, intrinsic) of one hyperfine-field rotation, i.e. the
// rotation of the new quantization frame relative to the current one.
struct RotationSpec {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  Eigen::Matrix3d matrix() const;  // Rz(alpha) Ry(beta) Rz(gamma)
  bool is_identity(double tol = 1e-14) const;
};

// Rotation taking the axis from e_z onto the beam (e_y): kills the coupling of
// every transition to the forward-scattered field.
RotationSpec beam_parallel_rotation();
// Inverse rotation restoring the axis from the beam back onto e_z.
RotationSpec back_to_z_rotation();

struct SwitchingEvent {
  double time = 0.0;  // s
  RotationSpec rotation;
};

struct SwitchSequence {
  std::vector<SwitchingEvent> events;
  void validate() const;  // strictly increasing positive times
};

// One ground-excited coherence. The |Delta m|=2 pairs radiate nothing in the
// forward direction but must be carried: rotations repopulate the radiative
// pairs from them, and their beat frequency (Omega1 type) shows up in the
// released amplitudes.
struct CoherencePair {
  int two_m_g = 0;
  int two_m_e = 0;
  std::complex<double> b{0.0, 0.0};
};

// Excitation amplitudes valid on one inter-switch interval. The public face is
// the six radiative entries A_l = K j_l(frame) b_l; the full eight-pair
// bookkeeping and the active frame are kept so switching history composes.
struct AmplitudeSet {
  std::array<CoherencePair, 8> pairs{};
  Eigen::Matrix3d frame = Eigen::Matrix3d::Identity();
  double valid_from = 0.0;
  double valid_to = std::numeric_limits<double>::infinity();
  double K = 1.0;  // shared coupling constant (from the sample thickness)

  struct Entry {
    TransitionLine line;
    Eigen::Vector3cd A = Eigen::Vector3cd::Zero();  // lab frame
  };

  Eigen::Vector3d quantization_axis() const { return frame.col(2); }
  const std::complex<double>& b(int two_m_g, int two_m_e) const;
  std::complex<double>& b(int two_m_g, int two_m_e);

  // Exactly six entries, keyed by (m_g, m_e) with |Delta m| <= 1.
  std::array<Entry, 6> entries(const LevelScheme& scheme, const Geometry& geom,
                               const NuclearConstants& consts) const;
  double max_abs_A(const LevelScheme& scheme, const Geometry& geom,
                   const NuclearConstants& consts) const;
  // sum_l |b_l|^2 over all eight pairs; invariant under switching
  double population_norm() const;
};

// The eight (m_g, m_e) pairs in a fixed canonical order.
const std::array<std::pair<int, int>, 8>& coherence_pairs();

// A_l(0) = K j_l (j_l^dagger . e0): only lines coupled to e0 are excited.
AmplitudeSet initial_amplitudes(const Geometry& geom, const LevelScheme& scheme,
                                const SampleConfig& sample,
                                const NuclearConstants& consts);

// Transport across one instantaneous rotation at event.time:
//   b'_{l'} = sum_l conj(D^{1/2}_{m'_g m_g} D^{3/2}_{m'_e m_e})
//             * exp(-i Omega_l (t_s - valid_from)) * b_l,
// frame' = frame * R(alpha,beta,gamma). Composes over repeated switches.
AmplitudeSet apply_switch(const AmplitudeSet& amps, const SwitchingEvent& event,
                          const LevelScheme& scheme);

// Amplitude sets for every inter-switch interval of a sequence.
std::vector<AmplitudeSet> transport_history(const AmplitudeSet& initial,
                                            const SwitchSequence& sequence,
                                            const LevelScheme& scheme);

// Independent closed-form oracle for the suppress-at-t1 / restore-at-t2
// scenario. Returns the six relative amplitudes, normalized so that the
// unperturbed Delta m = 0 amplitudes would be 1/6:
//   Delta m =  0 pairs: (3 sin Omega1 D + sin Omega0 D) / 24
//   inner |Dm| = 1    : (3 cos Omega1 D - cos Omega0 D) / 48
//   stretched |Dm| = 1: (  cos Omega1 D + cos Omega0 D) / 16
// with D = t2 - t1. Throws if t1 is not a suppression time.
std::array<std::complex<double>, 6> two_switch_closed_form(
    double t1, double t2, const LevelScheme& scheme);

// t = (n - 1/2) pi / Omega0, n = 1..n_max
std::vector<double> suppression_times(const LevelScheme& scheme, int n_max);

enum class ReleaseTarget { sigma_only, pi_only, full_suppression };

struct DesignError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DesignCandidate {
  double time = 0.0;          // s
  double residual_rel = 0.0;  // zeroed-group max|A| / pre-switch max|A|
  bool exact = false;         // residual below the design tolerance
};

struct DesignOptions {
  double scan_step = 0.1e-9;
  double refine_tol = 1e-13;   // s (0.1 fs), bisection/golden-section stop
  double exact_tol_rel = 1e-4; // candidate counts as an exact zero below this
  double floor_fraction = 0.1; // released group must exceed this x window max
  double release_residual_max = 0.25;  // clean-release cut used by the planner
};

// Scan `window` for times where switching (back-to-z for release targets,
// beam-parallel for full suppression) drives the targeted amplitude group
// below tolerance. Returns time-sorted candidates; exact ones if any exist,
// otherwise the best local minima flagged residual (approximate designs).
std::vector<DesignCandidate> design_release_time(
    const AmplitudeSet& history, ReleaseTarget target,
    std::pair<double, double> window, const LevelScheme& scheme,
    const Geometry& geom, const NuclearConstants& consts,
    const DesignOptions& opts = {});

enum class Polarization { sigma, pi };

struct FourSwitchPlan {
  SwitchSequence sequence;                 // beam-parallel / back / bp / back
  std::array<DesignCandidate, 4> chosen;   // per-switch residual report
};

// t1 suppress, t2 release pi, t3 re-suppress, t4 release the requested final
// polarization. Each time is the first admissible candidate in its window.
FourSwitchPlan four_switch_plan(Polarization final_polarization,
                                const LevelScheme& scheme, const Geometry& geom,
                                const SampleConfig& sample,
                                const NuclearConstants& consts,
                                double t_max = 300e-9,
                                const DesignOptions& opts = {});

}  // namespace nfs
