#include "nfs/scattering.hpp"

#include <cmath>
#include <complex>
#include <ostream>

namespace nfs {

namespace {

using cd = std::complex<double>;

struct Interval {
  double t0 = 0.0;
  double t1 = std::numeric_limits<double>::infinity();
  // per coherence pair: transverse current components (x, z) in this
  // interval's frame, beat frequency and start-of-interval amplitude
  std::array<Eigen::Vector2cd, 8> j{};
  std::array<double, 8> omega{};
  std::array<cd, 8> b{};
};

std::vector<Interval> build_intervals(const std::vector<AmplitudeSet>& history,
                                      const LevelScheme& scheme,
                                      const Geometry& geom,
                                      const NuclearConstants& consts) {
  std::vector<Interval> ivs;
  for (const auto& set : history) {
    Interval iv;
    iv.t0 = set.valid_from;
    iv.t1 = set.valid_to;
    Geometry g = geom;
    g.frame = set.frame;
    int i = 0;
    for (const auto& [tmg, tme] : coherence_pairs()) {
      iv.omega[i] = scheme.omega(tmg, tme);
      iv.b[i] = set.b(tmg, tme);
      if (std::abs(tme - tmg) <= 2) {
        TransitionLine line{tmg, tme, iv.omega[i]};
        const auto elem = current_element(line, g, consts);
        iv.j[i] = {elem.j_vec(0), elem.j_vec(2)};
      } else {
        iv.j[i].setZero();
      }
      ++i;
    }
    ivs.push_back(iv);
  }
  return ivs;
}

// first-order field on the grid, in units of its own unperturbed t->0+ value
void eval_first_order(const std::vector<Interval>& ivs, double K, double scale,
                      double decay_rate, const TimeGrid& grid,
                      Eigen::VectorXcd& Ex, Eigen::VectorXcd& Ez) {
  const int n = grid.samples();
  Ex.setZero(n);
  Ez.setZero(n);
  std::size_t k = 0;
  for (int i = 0; i < n; ++i) {
    const double t = grid.time(i);
    while (k + 1 < ivs.size() && t >= ivs[k + 1].t0) ++k;
    if (t < ivs[k].t0)
      throw std::invalid_argument("first_order_field: grid not covered by history");
    const double env = std::exp(-0.5 * decay_rate * t);
    cd ex = 0.0, ez = 0.0;
    for (int p = 0; p < 8; ++p) {
      const cd ph = std::polar(1.0, -ivs[k].omega[p] * (t - ivs[k].t0));
      const cd w = ivs[k].b[p] * ph;
      ex += ivs[k].j[p](0) * w;
      ez += ivs[k].j[p](1) * w;
    }
    Ex(i) = K * env * ex / scale;
    Ez(i) = K * env * ez / scale;
  }
}

// 8x8 transport matrix of one rotation (same combination as apply_switch)
Eigen::Matrix<cd, 8, 8> transport_matrix(const RotationSpec& rot) {
  Eigen::Matrix<cd, 8, 8> T;
  const auto& pairs = coherence_pairs();
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) {
      const auto dg = wigner_D(SpinHalfInt{1}, pairs[r].first, pairs[c].first,
                               rot.alpha, rot.beta, rot.gamma);
      const auto de = wigner_D(SpinHalfInt{3}, pairs[r].second, pairs[c].second,
                               rot.alpha, rot.beta, rot.gamma);
      T(r, c) = std::conj(dg * de);
    }
  return T;
}

}  // namespace

int TimeGrid::samples() const {
  return static_cast<int>(std::llround((t_end - t_start) / dt)) + 1;
}

void TimeGrid::validate() const {
  if (!(dt > 0.0) || !(t_end > t_start) || t_start < 0.0)
    throw std::invalid_argument("TimeGrid: need t_end > t_start >= 0, dt > 0");
}

FieldRecord first_order_field(const std::vector<AmplitudeSet>& history,
                              const TimeGrid& grid, const LevelScheme& scheme,
                              const Geometry& geom,
                              const NuclearConstants& consts) {
  grid.validate();
  if (history.empty())
    throw std::invalid_argument("first_order_field: empty history");
  const auto ivs = build_intervals(history, scheme, geom, consts);
  const double p2 = current_prefactor(consts) * current_prefactor(consts);
  const double scale = history.front().K * p2 / 3.0;

  FieldRecord rec;
  rec.grid = grid;
  eval_first_order(ivs, history.front().K, scale, consts.decay_rate(), grid,
                   rec.E_sigma, rec.E_pi);
  rec.order_sigma = {rec.E_sigma};
  rec.order_pi = {rec.E_pi};
  rec.truncation_order = 1;
  return rec;
}

FieldRecord solve_series(const SampleConfig& sample,
                         const SwitchSequence& sequence,
                         const LevelScheme& scheme, const Geometry& geom,
                         const NuclearConstants& consts, const TimeGrid& grid,
                         int max_order, double tol_rel) {
  grid.validate();
  sequence.validate();
  if (max_order < 1)
    throw std::invalid_argument("solve_series: max_order must be >= 1");
  const auto initial = initial_amplitudes(geom, scheme, sample, consts);
  const auto history = transport_history(initial, sequence, scheme);
  const auto ivs = build_intervals(history, scheme, geom, consts);
  const double K = initial.K;
  const double rate = consts.decay_rate();
  const double p2 = current_prefactor(consts) * current_prefactor(consts);
  const double scale = K * p2 / 3.0;
  const int n = grid.samples();

  std::vector<Eigen::Matrix<cd, 8, 8>> T;
  for (const auto& ev : sequence.events)
    T.push_back(transport_matrix(ev.rotation));

  FieldRecord rec;
  rec.grid = grid;
  Eigen::VectorXcd Ex, Ez;
  eval_first_order(ivs, K, scale, rate, grid, Ex, Ez);
  rec.order_sigma = {Ex};
  rec.order_pi = {Ez};
  rec.E_sigma = Ex;
  rec.E_pi = Ez;
  rec.truncation_order = 1;

  auto max_abs = [](const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    double m = 0.0;
    for (int i = 0; i < a.size(); ++i)
      m = std::max(m, std::sqrt(std::norm(a(i)) + std::norm(b(i))));
    return m;
  };

  for (int order = 1; order < max_order; ++order) {
    const auto& Cx = rec.order_sigma.back();
    const auto& Cz = rec.order_pi.back();
    Eigen::VectorXcd Nx = Eigen::VectorXcd::Zero(n);
    Eigen::VectorXcd Nz = Eigen::VectorXcd::Zero(n);

    // running memory integrals S_p(t) = int conj(j_p).E_n exp(i w_p (tau-t0))
    // exp(-G tau / 2) dtau, restarted basis at each switch
    std::array<cd, 8> S{};
    std::size_t k = 0;
    while (k + 1 < ivs.size() && grid.t_start >= ivs[k + 1].t0) ++k;

    auto integrand = [&](std::size_t iv, double tau, cd ex, cd ez,
                         std::array<cd, 8>& f) {
      const double env = std::exp(-0.5 * rate * tau);
      for (int p = 0; p < 8; ++p) {
        const cd je = std::conj(ivs[iv].j[p](0)) * ex +
                      std::conj(ivs[iv].j[p](1)) * ez;
        f[p] = je * std::polar(env, ivs[iv].omega[p] * (tau - ivs[iv].t0));
      }
    };

    std::array<cd, 8> fa{};
    integrand(k, grid.t_start, Cx(0), Cz(0), fa);
    for (int i = 0; i + 1 < n; ++i) {
      double ta = grid.time(i);
      const double tb = grid.time(i + 1);
      cd exa = Cx(i), eza = Cz(i);
      // cross any switch boundaries inside (ta, tb]
      while (k + 1 < ivs.size() && ivs[k + 1].t0 <= tb) {
        const double ts = ivs[k + 1].t0;
        const double v = (ts - grid.time(i)) / grid.dt;
        const cd exs = Cx(i) + (Cx(i + 1) - Cx(i)) * v;
        const cd ezs = Cz(i) + (Cz(i + 1) - Cz(i)) * v;
        std::array<cd, 8> fs{};
        integrand(k, ts, exs, ezs, fs);
        for (int p = 0; p < 8; ++p) S[p] += 0.5 * (fa[p] + fs[p]) * (ts - ta);
        // re-express the integrals in the post-switch basis
        Eigen::Matrix<cd, 8, 1> sv;
        for (int p = 0; p < 8; ++p)
          sv(p) = S[p] * std::polar(1.0, -ivs[k].omega[p] * (ts - ivs[k].t0));
        sv = (T[k] * sv).eval();
        for (int p = 0; p < 8; ++p) S[p] = sv(p);
        ++k;
        ta = ts;
        exa = exs;
        eza = ezs;
        integrand(k, ta, exa, eza, fa);
      }
      std::array<cd, 8> fb{};
      integrand(k, tb, Cx(i + 1), Cz(i + 1), fb);
      for (int p = 0; p < 8; ++p) S[p] += 0.5 * (fa[p] + fb[p]) * (tb - ta);
      fa = fb;

      const double env = std::exp(-0.5 * rate * tb);
      cd ex = 0.0, ez = 0.0;
      for (int p = 0; p < 8; ++p) {
        const cd w = S[p] * std::polar(1.0, -ivs[k].omega[p] * (tb - ivs[k].t0));
        ex += ivs[k].j[p](0) * w;
        ez += ivs[k].j[p](1) * w;
      }
      const double pref = -K / double(order + 1);
      Nx(i + 1) = pref * env * ex;
      Nz(i + 1) = pref * env * ez;
    }

    rec.order_sigma.push_back(Nx);
    rec.order_pi.push_back(Nz);
    rec.E_sigma += Nx;
    rec.E_pi += Nz;
    rec.truncation_order = order + 1;
    const double r = max_abs(Nx, Nz) / std::max(max_abs(rec.E_sigma, rec.E_pi),
                                                1e-300);
    rec.residual_rel = r;
    if (r < tol_rel) {
      rec.converged = true;
      return rec;
    }
  }
  rec.converged = rec.residual_rel < tol_rel || max_order == 1;
  return rec;
}

std::vector<IntensityRow> intensity_series(const FieldRecord& rec) {
  std::vector<IntensityRow> rows;
  rows.reserve(static_cast<std::size_t>(rec.grid.samples()));
  for (int i = 0; i < rec.grid.samples(); ++i) {
    IntensityRow r;
    r.t = rec.grid.time(i);
    r.I_sigma = std::norm(rec.E_sigma(i));
    r.I_pi = std::norm(rec.E_pi(i));
    r.I_total = r.I_sigma + r.I_pi;
    rows.push_back(r);
  }
  return rows;
}

void write_intensity_csv(const FieldRecord& rec, std::ostream& os) {
  os << "t_ns,I_total,I_sigma,I_pi,ReE_sigma,ImE_sigma,ReE_pi,ImE_pi\n";
  char buf[256];
  for (int i = 0; i < rec.grid.samples(); ++i) {
    const cd es = rec.E_sigma(i), ep = rec.E_pi(i);
    std::snprintf(buf, sizeof buf,
                  "%.17e,%.17e,%.17e,%.17e,%.17e,%.17e,%.17e,%.17e\n",
                  rec.grid.time(i) * 1e9, std::norm(es) + std::norm(ep),
                  std::norm(es), std::norm(ep), es.real(), es.imag(), ep.real(),
                  ep.imag());
    os << buf;
  }
}

namespace {
double window_energy(const FieldRecord& rec, double t_lo, double t_hi,
                     const Eigen::VectorXcd& E) {
  double sum = 0.0;
  for (int i = 0; i + 1 < rec.grid.samples(); ++i) {
    const double ta = rec.grid.time(i), tb = rec.grid.time(i + 1);
    if (ta < t_lo || tb > t_hi) continue;
    sum += 0.5 * (std::norm(E(i)) + std::norm(E(i + 1))) * rec.grid.dt;
  }
  return sum;
}
}  // namespace

double window_energy_sigma(const FieldRecord& rec, double t_lo, double t_hi) {
  return window_energy(rec, t_lo, t_hi, rec.E_sigma);
}

double window_energy_pi(const FieldRecord& rec, double t_lo, double t_hi) {
  return window_energy(rec, t_lo, t_hi, rec.E_pi);
}

}  // namespace nfs
