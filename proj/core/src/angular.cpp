#include "nfs/angular.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

namespace nfs {

namespace {

double factorial(int n) {
  static const auto table = [] {
    std::array<double, 32> t{};
    t[0] = 1.0;
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * double(i);
    return t;
  }();
  return table.at(static_cast<std::size_t>(n));
}

// factorial of a doubled integer that must be even
double fact2(int twice) { return factorial(twice / 2); }

constexpr std::array<std::pair<int, int>, 6> kLineKeys{{
    {-1, -3}, {-1, -1}, {-1, 1}, {1, -1}, {1, 1}, {1, 3}}};

}  // namespace

double wigner_small_d(SpinHalfInt I, int two_m_to, int two_m_from, double beta) {
  if (!I.valid_projection(two_m_to) || !I.valid_projection(two_m_from))
    throw std::invalid_argument("wigner_small_d: invalid projection");
  const int tI = I.twice_value;
  // k bounds of the Wigner factorial sum, in integer (non-doubled) units
  const int kmin = std::max(0, (two_m_from - two_m_to) / 2);
  const int kmax = std::min((tI + two_m_from) / 2, (tI - two_m_to) / 2);
  const double pref = std::sqrt(fact2(tI + two_m_to) * fact2(tI - two_m_to) *
                                fact2(tI + two_m_from) * fact2(tI - two_m_from));
  const double c = std::cos(beta / 2), s = std::sin(beta / 2);
  double sum = 0.0;
  for (int k = kmin; k <= kmax; ++k) {
    const double den = fact2(tI + two_m_from - 2 * k) * factorial(k) *
                       factorial((two_m_to - two_m_from) / 2 + k) *
                       fact2(tI - two_m_to - 2 * k);
    const int cos_pow = (2 * tI + two_m_from - two_m_to) / 2 - 2 * k;
    const int sin_pow = (two_m_to - two_m_from) / 2 + 2 * k;
    sum += ((k % 2) ? -1.0 : 1.0) * std::pow(c, cos_pow) * std::pow(s, sin_pow) / den;
  }
  return pref * sum;
}

double three_j(int tj1, int tj2, int tj3, int tm1, int tm2, int tm3) {
  if (tm1 + tm2 + tm3 != 0) return 0.0;
  if (tj3 > tj1 + tj2 || tj3 < std::abs(tj1 - tj2)) return 0.0;
  if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tm3) > tj3)
    return 0.0;
  if ((tj1 + tm1) % 2 || (tj2 + tm2) % 2 || (tj3 + tm3) % 2) return 0.0;
  if ((tj1 + tj2 + tj3) % 2) return 0.0;

  const double delta =
      std::sqrt(fact2(tj1 + tj2 - tj3) * fact2(tj1 - tj2 + tj3) *
                fact2(-tj1 + tj2 + tj3) / fact2(tj1 + tj2 + tj3 + 2));
  const double pref =
      std::sqrt(fact2(tj1 + tm1) * fact2(tj1 - tm1) * fact2(tj2 + tm2) *
                fact2(tj2 - tm2) * fact2(tj3 + tm3) * fact2(tj3 - tm3));
  double sum = 0.0;
  const int tmin = std::max({0, tj2 - tj3 - tm1, tj1 - tj3 + tm2});
  const int tmax = std::min({tj1 + tj2 - tj3, tj1 - tm1, tj2 + tm2});
  for (int t = tmin; t <= tmax; t += 2) {
    const double den = fact2(t) * fact2(tj3 - tj2 + tm1 + t) *
                       fact2(tj3 - tj1 - tm2 + t) * fact2(tj1 + tj2 - tj3 - t) *
                       fact2(tj1 - tm1 - t) * fact2(tj2 + tm2 - t);
    sum += (((t / 2) % 2) ? -1.0 : 1.0) / den;
  }
  const int phase = (tj1 - tj2 - tm3) / 2;
  return ((phase % 2) ? -1.0 : 1.0) * delta * pref * sum;
}

std::complex<double> wigner_D(SpinHalfInt I, int two_m1, int two_m2,
                              double alpha, double beta, double gamma) {
  using namespace std::complex_literals;
  return std::exp(-0.5i * (two_m1 * alpha)) *
         wigner_small_d(I, two_m1, two_m2, beta) *
         std::exp(-0.5i * (two_m2 * gamma));
}

const TransitionLine& LevelScheme::line(int two_m_g, int two_m_e) const {
  for (const auto& l : lines)
    if (l.two_m_g == two_m_g && l.two_m_e == two_m_e) return l;
  throw std::invalid_argument("LevelScheme: no such line");
}

LevelScheme build_level_scheme(const HyperfineConfig& config) {
  LevelScheme scheme;
  if (!config.override_frequencies) {
    // Zeeman shifts: level energy correction -g m mu_N B, as frequencies
    const double scale = mu_N_eV_per_T * config.field_tesla / hbar_eV_s;
    for (int tmg : {-1, 1})
      scheme.ground_shift[(tmg + 1) / 2] =
          -config.g_factor_ground * 0.5 * tmg * scale;
    for (int tme : {-3, -1, 1, 3})
      scheme.excited_shift[(tme + 3) / 2] =
          -config.g_factor_excited * 0.5 * tme * scale;
  } else {
    // Least-squares reconstruction of the six sublevel shifts from the six
    // line frequencies (minimal-norm solution fixes the energy gauge).
    const auto& ov = *config.override_frequencies;
    for (const auto& key : kLineKeys) {
      bool found = false;
      for (const auto& o : ov)
        if (o.two_m_g == key.first && o.two_m_e == key.second) found = true;
      if (!found)
        throw std::invalid_argument(
            "override_frequencies must cover all six (m_g, m_e) lines");
    }
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(6, 6);  // cols: 2 ground, 4 excited
    Eigen::VectorXd w(6);
    for (int r = 0; r < 6; ++r) {
      const auto& o = ov[static_cast<std::size_t>(r)];
      M(r, (o.two_m_g + 1) / 2) = -1.0;
      M(r, 2 + (o.two_m_e + 3) / 2) = 1.0;
      w(r) = o.omega;
    }
    Eigen::VectorXd s =
        M.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(w);
    scheme.ground_shift = {s(0), s(1)};
    scheme.excited_shift = {s(2), s(3), s(4), s(5)};
  }
  int i = 0;
  for (const auto& [tmg, tme] : kLineKeys)
    scheme.lines[i++] = TransitionLine{tmg, tme, scheme.omega(tmg, tme)};
  return scheme;
}

HyperfineConfig calibrated_config() {
  HyperfineConfig cfg;
  // mu_g(57Fe) = +0.090604 mu_N (I=1/2), mu_e = -0.15532 mu_N (I=3/2)
  cfg.g_factor_ground = 0.090604 / 0.5;
  cfg.g_factor_excited = -0.15532 / 1.5;
  // field anchored so the first quantum-beat minimum pi/(2 Omega0) sits at 8 ns
  const double Omega0 = std::numbers::pi / (2.0 * 8e-9);
  const double scale = 2.0 * Omega0 / (cfg.g_factor_ground - cfg.g_factor_excited);
  cfg.field_tesla = scale * hbar_eV_s / mu_N_eV_per_T;
  return cfg;
}

}  // namespace nfs
