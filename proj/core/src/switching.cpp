#include "nfs/switching.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nfs/scattering.hpp"

namespace nfs {

using namespace std::complex_literals;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix3d rot_z(double t) {
  Eigen::Matrix3d m;
  m << std::cos(t), -std::sin(t), 0, std::sin(t), std::cos(t), 0, 0, 0, 1;
  return m;
}

Eigen::Matrix3d rot_y(double t) {
  Eigen::Matrix3d m;
  m << std::cos(t), 0, std::sin(t), 0, 1, 0, -std::sin(t), 0, std::cos(t);
  return m;
}

bool is_radiative(int two_m_g, int two_m_e) {
  return std::abs(two_m_e - two_m_g) <= 2;
}

Geometry with_frame(const Geometry& geom, const Eigen::Matrix3d& frame) {
  Geometry g = geom;
  g.frame = frame;
  return g;
}

// Reference amplitude scale: the unperturbed Delta m = 0 amplitude magnitude
// reconstructed from the (conserved) population norm, |A| = K |j| |b| with
// |j| = |b| for the initially driven lines.
double reference_amplitude(const AmplitudeSet& amps,
                           const NuclearConstants& /*consts*/) {
  return amps.K * amps.population_norm() / 2.0;
}

double group_max_A(const std::array<AmplitudeSet::Entry, 6>& entries,
                   ReleaseTarget target) {
  double m = 0.0;
  for (const auto& e : entries) {
    const bool dm0 = (e.line.two_q() == 0);
    const bool in_group = (target == ReleaseTarget::full_suppression) ||
                          (target == ReleaseTarget::pi_only ? dm0 : !dm0);
    if (in_group) m = std::max(m, e.A.norm());
  }
  return m;
}

double complementary_max_A(const std::array<AmplitudeSet::Entry, 6>& entries,
                           ReleaseTarget target) {
  double m = 0.0;
  for (const auto& e : entries) {
    const bool dm0 = (e.line.two_q() == 0);
    const bool released = (target == ReleaseTarget::pi_only ? !dm0 : dm0);
    if (released) m = std::max(m, e.A.norm());
  }
  return m;
}

template <typename F>
double golden_minimize(F f, double a, double b, double tol) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

Eigen::Matrix3d RotationSpec::matrix() const {
  return rot_z(alpha) * rot_y(beta) * rot_z(gamma);
}

bool RotationSpec::is_identity(double tol) const {
  return (matrix() - Eigen::Matrix3d::Identity()).norm() < tol;
}

RotationSpec beam_parallel_rotation() { return {kPi / 2, kPi / 2, kPi / 2}; }

RotationSpec back_to_z_rotation() { return {-kPi / 2, -kPi / 2, 0.0}; }

void SwitchSequence::validate() const {
  double prev = 0.0;
  for (const auto& e : events) {
    if (e.time <= prev)
      throw std::invalid_argument(
          "SwitchSequence: times must be strictly increasing and positive");
    prev = e.time;
  }
}

const std::array<std::pair<int, int>, 8>& coherence_pairs() {
  static const std::array<std::pair<int, int>, 8> p{{{-1, -3},
                                                     {-1, -1},
                                                     {-1, 1},
                                                     {-1, 3},
                                                     {1, -3},
                                                     {1, -1},
                                                     {1, 1},
                                                     {1, 3}}};
  return p;
}

const std::complex<double>& AmplitudeSet::b(int two_m_g, int two_m_e) const {
  for (const auto& p : pairs)
    if (p.two_m_g == two_m_g && p.two_m_e == two_m_e) return p.b;
  throw std::invalid_argument("AmplitudeSet: no such coherence pair");
}

std::complex<double>& AmplitudeSet::b(int two_m_g, int two_m_e) {
  for (auto& p : pairs)
    if (p.two_m_g == two_m_g && p.two_m_e == two_m_e) return p.b;
  throw std::invalid_argument("AmplitudeSet: no such coherence pair");
}

std::array<AmplitudeSet::Entry, 6> AmplitudeSet::entries(
    const LevelScheme& scheme, const Geometry& geom,
    const NuclearConstants& consts) const {
  std::array<Entry, 6> out;
  const Geometry g = with_frame(geom, frame);
  int i = 0;
  for (const auto& [tmg, tme] : coherence_pairs()) {
    if (!is_radiative(tmg, tme)) continue;
    TransitionLine line{tmg, tme, scheme.omega(tmg, tme)};
    const auto elem = current_element(line, g, consts);
    out[i].line = line;
    out[i].A = K * elem.j_vec * b(tmg, tme);
    ++i;
  }
  return out;
}

double AmplitudeSet::max_abs_A(const LevelScheme& scheme, const Geometry& geom,
                               const NuclearConstants& consts) const {
  double m = 0.0;
  for (const auto& e : entries(scheme, geom, consts)) m = std::max(m, e.A.norm());
  return m;
}

double AmplitudeSet::population_norm() const {
  double s = 0.0;
  for (const auto& p : pairs) s += std::norm(p.b);
  return s;
}

AmplitudeSet initial_amplitudes(const Geometry& geom, const LevelScheme& scheme,
                                const SampleConfig& sample,
                                const NuclearConstants& consts) {
  geom.validate();
  AmplitudeSet amps;
  amps.frame = geom.frame;
  const double p2 = current_prefactor(consts) * current_prefactor(consts);
  // K chosen so the thin-sample kernel strength reproduces xi Gamma0 / hbar
  amps.K = 3.0 * sample.effective_thickness_xi /
           (consts.tau_s * p2);
  int i = 0;
  for (const auto& [tmg, tme] : coherence_pairs()) {
    amps.pairs[i].two_m_g = tmg;
    amps.pairs[i].two_m_e = tme;
    if (is_radiative(tmg, tme)) {
      TransitionLine line{tmg, tme, scheme.omega(tmg, tme)};
      const auto elem = current_element(line, geom, consts);
      amps.pairs[i].b = coupling(elem, geom.e0);
    }
    ++i;
  }
  return amps;
}

AmplitudeSet apply_switch(const AmplitudeSet& amps, const SwitchingEvent& event,
                          const LevelScheme& scheme) {
  if (event.time < amps.valid_from)
    throw std::invalid_argument("apply_switch: event precedes validity window");
  const double dt = event.time - amps.valid_from;
  const auto& rot = event.rotation;

  AmplitudeSet out = amps;
  out.frame = amps.frame * rot.matrix();
  out.valid_from = event.time;
  out.valid_to = std::numeric_limits<double>::infinity();

  // phase accumulated on the old basis since the interval start
  std::array<std::complex<double>, 8> phased;
  for (int i = 0; i < 8; ++i) {
    const auto& p = amps.pairs[i];
    const double w = scheme.omega(p.two_m_g, p.two_m_e);
    phased[i] = p.b * std::exp(std::complex<double>(0.0, -w * dt));
  }
  for (auto& pn : out.pairs) {
    std::complex<double> s = 0.0;
    for (int i = 0; i < 8; ++i) {
      const auto& p = amps.pairs[i];
      const auto dg = wigner_D(SpinHalfInt{1}, pn.two_m_g, p.two_m_g, rot.alpha,
                               rot.beta, rot.gamma);
      const auto de = wigner_D(SpinHalfInt{3}, pn.two_m_e, p.two_m_e, rot.alpha,
                               rot.beta, rot.gamma);
      s += std::conj(dg * de) * phased[i];
    }
    pn.b = s;
  }
  return out;
}

std::vector<AmplitudeSet> transport_history(const AmplitudeSet& initial,
                                            const SwitchSequence& sequence,
                                            const LevelScheme& scheme) {
  sequence.validate();
  std::vector<AmplitudeSet> history;
  history.push_back(initial);
  for (const auto& ev : sequence.events) {
    history.back().valid_to = ev.time;
    history.push_back(apply_switch(history.back(), ev, scheme));
  }
  return history;
}

std::array<std::complex<double>, 6> two_switch_closed_form(
    double t1, double t2, const LevelScheme& scheme) {
  const double Om0 = scheme.Omega0(), Om1 = scheme.Omega1();
  if (std::abs(std::cos(Om0 * t1)) > 1e-6)
    throw std::invalid_argument(
        "two_switch_closed_form: t1 must be a suppression time");
  if (t2 <= t1)
    throw std::invalid_argument("two_switch_closed_form: need t2 > t1");
  const double D = t2 - t1;
  const double f_dm0 = 3.0 * std::sin(Om1 * D) + std::sin(Om0 * D);
  const double f_inner = 3.0 * std::cos(Om1 * D) - std::cos(Om0 * D);
  const double f_str = std::cos(Om1 * D) + std::cos(Om0 * D);
  // line order (-1,-3) (-1,-1) (-1,1) (1,-1) (1,1) (1,3)
  return {f_str / 16.0,  f_dm0 / 24.0, f_inner / 48.0,
          f_inner / 48.0, f_dm0 / 24.0, f_str / 16.0};
}

std::vector<double> suppression_times(const LevelScheme& scheme, int n_max) {
  const double Om0 = scheme.Omega0();
  if (Om0 <= 0.0)
    throw std::invalid_argument("suppression_times: Omega0 must be positive");
  std::vector<double> out;
  for (int n = 1; n <= n_max; ++n) out.push_back((n - 0.5) * kPi / Om0);
  return out;
}

std::vector<DesignCandidate> design_release_time(
    const AmplitudeSet& history, ReleaseTarget target,
    std::pair<double, double> window, const LevelScheme& scheme,
    const Geometry& geom, const NuclearConstants& consts,
    const DesignOptions& opts) {
  std::vector<DesignCandidate> out;
  if (window.second <= window.first) return out;
  const RotationSpec rot = (target == ReleaseTarget::full_suppression)
                               ? beam_parallel_rotation()
                               : back_to_z_rotation();
  const double norm_ref = reference_amplitude(history, consts);
  if (norm_ref <= 0.0) return out;

  auto switched = [&](double t) {
    return apply_switch(history, SwitchingEvent{t, rot}, scheme)
        .entries(scheme, geom, consts);
  };
  auto metric = [&](double t) { return group_max_A(switched(t), target); };

  const double lo = std::max(window.first, history.valid_from + opts.scan_step);
  std::vector<double> ts, vs;
  for (double t = lo; t <= window.second; t += opts.scan_step) {
    ts.push_back(t);
    vs.push_back(metric(t));
  }
  if (ts.size() < 3) return out;

  double released_window_max = 0.0;
  if (target != ReleaseTarget::full_suppression)
    for (double t : ts)
      released_window_max =
          std::max(released_window_max, complementary_max_A(switched(t), target));

  for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
    if (!(vs[i] < vs[i - 1] && vs[i] <= vs[i + 1])) continue;
    const double t_ref =
        golden_minimize(metric, ts[i - 1], ts[i + 1], opts.refine_tol);
    DesignCandidate cand;
    cand.time = t_ref;
    cand.residual_rel = metric(t_ref) / norm_ref;
    cand.exact = cand.residual_rel < opts.exact_tol_rel;
    if (cand.residual_rel > 0.5) continue;  // shallow dip, not a design
    if (target != ReleaseTarget::full_suppression) {
      const double released = complementary_max_A(switched(t_ref), target);
      if (released < opts.floor_fraction * released_window_max)
        continue;  // both groups small: that is the full-suppression case
    }
    out.push_back(cand);
  }
  const bool any_exact =
      std::any_of(out.begin(), out.end(), [](const auto& c) { return c.exact; });
  if (any_exact)
    std::erase_if(out, [](const auto& c) { return !c.exact; });
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.time < b.time; });
  return out;
}

FourSwitchPlan four_switch_plan(Polarization final_polarization,
                                const LevelScheme& scheme, const Geometry& geom,
                                const SampleConfig& sample,
                                const NuclearConstants& consts, double t_max,
                                const DesignOptions& opts) {
  FourSwitchPlan plan;
  const auto initial = initial_amplitudes(geom, scheme, sample, consts);
  const double norm_ref = reference_amplitude(initial, consts);

  const double t1 = suppression_times(scheme, 1).front();
  auto s1 = apply_switch(initial, {t1, beam_parallel_rotation()}, scheme);
  plan.chosen[0] = {t1, s1.max_abs_A(scheme, geom, consts) / norm_ref, true};

  struct Stage {
    ReleaseTarget target;
    RotationSpec rotation;
  };
  const std::array<Stage, 3> stages{{
      {ReleaseTarget::pi_only, back_to_z_rotation()},
      {ReleaseTarget::full_suppression, beam_parallel_rotation()},
      {final_polarization == Polarization::sigma ? ReleaseTarget::sigma_only
                                                 : ReleaseTarget::pi_only,
       back_to_z_rotation()},
  }};
  AmplitudeSet state = s1;
  plan.sequence.events.push_back({t1, beam_parallel_rotation()});
  for (int k = 0; k < 3; ++k) {
    const auto cands =
        design_release_time(state, stages[k].target,
                            {state.valid_from, t_max}, scheme, geom, consts, opts);
    if (cands.empty())
      throw DesignError("four_switch_plan: no candidate switching time for "
                        "stage " + std::to_string(k + 2));
    // Suppression wants the deepest dip (earliest on near-ties); a release
    // wants the earliest candidate that is still clean, so the emitted pulse
    // beats the radioactive decay. Exact candidates are already filtered to
    // the front of the scan by design_release_time.
    std::size_t pick = 0;
    if (stages[k].target == ReleaseTarget::full_suppression) {
      double best = cands.front().residual_rel;
      for (const auto& c : cands) best = std::min(best, c.residual_rel);
      while (cands[pick].residual_rel > best * (1.0 + 5e-3)) ++pick;
    } else if (!cands.front().exact) {
      while (pick < cands.size() &&
             cands[pick].residual_rel > opts.release_residual_max)
        ++pick;
      if (pick == cands.size()) pick = 0;  // best effort: fall back to earliest
    }
    plan.chosen[k + 1] = cands[pick];
    const SwitchingEvent ev{cands[pick].time, stages[k].rotation};
    state = apply_switch(state, ev, scheme);
    plan.sequence.events.push_back(ev);
  }
  return plan;
}

}  // namespace nfs
