#include "nfs/photonics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace nfs {

void WindowSpec::validate(const TimeGrid& grid) const {
  auto check = [&](const std::pair<double, double>& w, const char* name) {
    if (!(w.second > w.first) || w.first < grid.t_start || w.second > grid.t_end)
      throw std::invalid_argument(std::string("WindowSpec: bad ") + name);
  };
  check(sigma_window, "sigma window");
  check(pi_window, "pi window");
  const bool disjoint = sigma_window.second <= pi_window.first ||
                        pi_window.second <= sigma_window.first;
  if (!disjoint)
    throw std::invalid_argument("WindowSpec: windows must be disjoint");
}

TwoModeState extract_modes(const FieldRecord& rec, const WindowSpec& windows,
                           const NuclearConstants& consts) {
  windows.validate(rec.grid);
  const double e_sigma = window_energy_sigma(rec, windows.sigma_window.first,
                                             windows.sigma_window.second);
  const double e_pi =
      window_energy_pi(rec, windows.pi_window.first, windows.pi_window.second);
  const double in_windows = e_sigma + e_pi;
  const double total_for_floor =
      window_energy_sigma(rec, rec.grid.t_start, rec.grid.t_end) +
      window_energy_pi(rec, rec.grid.t_start, rec.grid.t_end);
  if (in_windows <= 1e-20 * total_for_floor)
    throw ZeroPhotonError("extract_modes: no energy in either mode window");

  TwoModeState st;
  // relative phase fixed to 0; only phase differences are observable and they
  // are absorbed into the interferometer phase shifters
  st.alpha = std::sqrt(e_sigma / in_windows);
  st.beta = std::sqrt(e_pi / in_windows);

  const double coherent_total = total_for_floor;
  // incoherent channel proxy: internal conversion outpaces radiative decay by
  // ic_ratio, so scale the total budget accordingly
  const double total = coherent_total * (1.0 + consts.ic_ratio);
  st.loss_fraction = total > 0.0 ? 1.0 - in_windows / total : 0.0;
  return st;
}

std::pair<double, double> detector_probabilities(
    const TwoModeState& state, const InterferometerConfig& cfg) {
  const double tr = cfg.splitter_transmittance;
  if (tr < 0.0 || tr > 1.0)
    throw std::invalid_argument("splitter_transmittance outside [0, 1]");
  const double dphi = cfg.phase_sigma - cfg.phase_pi;
  const double cross = 2.0 * std::sqrt(tr * (1.0 - tr)) * std::abs(state.alpha) *
                       std::abs(state.beta);
  const double rel = std::arg(state.alpha * std::conj(state.beta));
  const double p1 = tr * std::norm(state.alpha) +
                    (1.0 - tr) * std::norm(state.beta) +
                    cross * std::cos(dphi + rel);
  return {p1, 1.0 - p1};
}

double visibility(const TwoModeState& state) {
  return 2.0 * std::abs(state.alpha) * std::abs(state.beta);
}

double correlation(const TwoModeState& state, double phi_a, double phi_b) {
  const double rel = std::arg(state.alpha * std::conj(state.beta));
  return visibility(state) * std::cos(phi_a - phi_b + rel);
}

BellResult bell_scan(const TwoModeState& state, const BellSettings& s) {
  BellResult r;
  r.E_ab = correlation(state, s.a, s.b);
  r.E_abp = correlation(state, s.a, s.b_prime);
  r.E_apb = correlation(state, s.a_prime, s.b);
  r.E_apbp = correlation(state, s.a_prime, s.b_prime);
  r.S = std::abs(r.E_ab - r.E_abp + r.E_apb + r.E_apbp);
  return r;
}

void write_bell_scan_csv(const TwoModeState& state, const BellSettings& settings,
                         int points_per_axis, std::ostream& os) {
  if (points_per_axis < 2)
    throw std::invalid_argument("write_bell_scan_csv: need >= 2 points per axis");
  os << "phi_a,phi_b,E,P_D1,P_D2\n";
  const double two_pi = 2.0 * 3.14159265358979323846;
  char buf[192];
  for (int ia = 0; ia < points_per_axis; ++ia) {
    const double pa = two_pi * ia / (points_per_axis - 1);
    for (int ib = 0; ib < points_per_axis; ++ib) {
      const double pb = two_pi * ib / (points_per_axis - 1);
      const auto [p1, p2] =
          detector_probabilities(state, {pa, pb, 0.5});
      std::snprintf(buf, sizeof buf, "%.17e,%.17e,%.17e,%.17e,%.17e\n", pa, pb,
                    correlation(state, pa, pb), p1, p2);
      os << buf;
    }
  }
  const auto r = bell_scan(state, settings);
  std::snprintf(buf, sizeof buf, "# S=%.17e classical_bound=%.17e\n", r.S,
                r.classical_bound);
  os << buf;
}

}  // namespace nfs
