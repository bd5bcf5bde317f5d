#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "nfs/photonics.hpp"

using namespace nfs;

namespace {

constexpr double kPi = std::numbers::pi;

// analytic record: E_sigma = 1 on [0,100) ns, E_pi = 1 on [100,200] ns
FieldRecord boxcar_record(double sigma_level, double pi_level) {
  FieldRecord rec;
  rec.grid.t_start = 0.0;
  rec.grid.t_end = 200e-9;
  rec.grid.dt = 0.5e-9;
  const int n = rec.grid.samples();
  rec.E_sigma.setZero(n);
  rec.E_pi.setZero(n);
  for (int i = 0; i < n; ++i) {
    if (rec.grid.time(i) < 100e-9)
      rec.E_sigma(i) = sigma_level;
    else
      rec.E_pi(i) = pi_level;
  }
  return rec;
}

WindowSpec boxcar_windows() {
  WindowSpec w;
  w.sigma_window = {0.0, 99e-9};
  w.pi_window = {101e-9, 200e-9};
  return w;
}

TwoModeState state(double mag_alpha, double mag_beta, double rel_phase = 0.0) {
  TwoModeState st;
  st.alpha = std::polar(mag_alpha, rel_phase);
  st.beta = mag_beta;
  return st;
}

}  // namespace

TEST_CASE("window validation rejects overlap and out-of-grid spans") {
  TimeGrid grid;
  WindowSpec w;
  w.sigma_window = {10e-9, 50e-9};
  w.pi_window = {50e-9, 90e-9};
  CHECK_NOTHROW(w.validate(grid));
  w.pi_window = {40e-9, 90e-9};
  CHECK_THROWS_AS(w.validate(grid), std::invalid_argument);
  w.pi_window = {290e-9, 310e-9};
  CHECK_THROWS_AS(w.validate(grid), std::invalid_argument);
  w.pi_window = {90e-9, 90e-9};
  CHECK_THROWS_AS(w.validate(grid), std::invalid_argument);
}

TEST_CASE("equal window energies give a balanced state") {
  const auto rec = boxcar_record(1.0, 1.0);
  NuclearConstants consts;
  const auto st = extract_modes(rec, boxcar_windows(), consts);
  // window edges cut half-samples, so balance holds to the grid resolution
  CHECK(std::abs(st.alpha) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(2e-3));
  CHECK(std::abs(st.beta) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(2e-3));
  CHECK(std::norm(st.alpha) + std::norm(st.beta) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(visibility(st) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("unbalanced windows weight the modes by energy") {
  const auto rec = boxcar_record(2.0, 1.0);  // 4x the sigma intensity
  NuclearConstants consts;
  const auto st = extract_modes(rec, boxcar_windows(), consts);
  CHECK(std::norm(st.alpha) / std::norm(st.beta) ==
        doctest::Approx(4.0).epsilon(1e-2));
}

TEST_CASE("loss fraction counts out-of-window and incoherent energy") {
  const auto rec = boxcar_record(1.0, 1.0);
  NuclearConstants consts;  // ic_ratio = 8
  const auto st = extract_modes(rec, boxcar_windows(), consts);
  // windows cover 198 of 200 ns coherent energy; total budget is 9x coherent
  const double expected = 1.0 - (198.0 / 200.0) / 9.0;
  CHECK(st.loss_fraction == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("empty windows raise the zero-photon error") {
  auto rec = boxcar_record(1.0, 0.0);    // no pi light at all
  for (int i = 0; i < rec.grid.samples(); ++i)
    if (rec.grid.time(i) < 100e-9) rec.E_sigma(i) = 0.0;  // ...and no sigma
  rec.E_sigma(0) = 1.0;  // keep a scrap of energy outside both windows
  WindowSpec w;
  w.sigma_window = {10e-9, 50e-9};
  w.pi_window = {110e-9, 150e-9};
  NuclearConstants consts;
  CHECK_THROWS_AS(extract_modes(rec, w, consts), ZeroPhotonError);
}

TEST_CASE("detector probabilities: fringe and normalization") {
  const auto st = state(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
  for (double phi : {0.0, 0.3, 1.0, 2.5, kPi, 5.0}) {
    const auto [p1, p2] = detector_probabilities(st, {phi, 0.0, 0.5});
    CHECK(p1 + p2 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p1 == doctest::Approx(0.5 + 0.5 * std::cos(phi)).epsilon(1e-12));
  }
  // fringe extremes are 1/2 +- |alpha||beta|
  const auto st2 = state(0.8, 0.6);
  const auto [hi, lo_p2] = detector_probabilities(st2, {0.0, 0.0, 0.5});
  const auto [lo, hi_p2] = detector_probabilities(st2, {kPi, 0.0, 0.5});
  CHECK(hi == doctest::Approx(0.5 + 0.48).epsilon(1e-12));
  CHECK(lo == doctest::Approx(0.5 - 0.48).epsilon(1e-12));
  CHECK(hi_p2 == doctest::Approx(hi).epsilon(1e-12));
}

TEST_CASE("unbalanced splitter reduces the cross term") {
  const auto st = state(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
  const auto [p1, p2] = detector_probabilities(st, {0.0, 0.0, 0.9});
  CHECK(p1 == doctest::Approx(0.5 + std::sqrt(0.09)).epsilon(1e-12));
  CHECK(p1 + p2 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(detector_probabilities(st, {0.0, 0.0, 1.5}),
                  std::invalid_argument);
}

TEST_CASE("global phase drops out, relative phase shifts the fringe") {
  auto st = state(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
  const auto [p_ref, unused] = detector_probabilities(st, {0.4, 0.1, 0.5});
  st.alpha *= std::polar(1.0, 1.234);
  st.beta *= std::polar(1.0, 1.234);
  const auto [p_rot, unused2] = detector_probabilities(st, {0.4, 0.1, 0.5});
  CHECK(p_rot == doctest::Approx(p_ref).epsilon(1e-14));
  // a relative phase moves the fringe by exactly that angle
  const auto str = state(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.7);
  const auto [p_shift, unused3] = detector_probabilities(str, {-0.7, 0.0, 0.5});
  CHECK(p_shift == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("canonical settings give S = 2 sqrt(2) V") {
  for (double v : {1.0, 0.9917, 0.5}) {
    const double mag = std::sqrt(0.5 + 0.5 * std::sqrt(1.0 - v * v));
    const auto st = state(mag, std::sqrt(1.0 - mag * mag));
    CHECK(visibility(st) == doctest::Approx(v).epsilon(1e-12));
    const auto r = bell_scan(st, BellSettings{});
    CHECK(r.S == doctest::Approx(2.0 * std::sqrt(2.0) * v).epsilon(1e-12));
    CHECK(r.classical_bound == doctest::Approx(2.0));
  }
  // a one-mode state shows no correlations at all
  const auto r0 = bell_scan(state(1.0, 0.0), BellSettings{});
  CHECK(r0.S == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("correlation is a cosine in the analyzer phase difference") {
  const auto st = state(0.8, 0.6);
  for (double pa : {0.0, 1.0, 2.0})
    for (double pb : {0.0, 0.5, 4.0})
      CHECK(correlation(st, pa, pb) ==
            doctest::Approx(0.96 * std::cos(pa - pb)).epsilon(1e-12));
}

TEST_CASE("bell scan CSV layout") {
  const auto st = state(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
  std::ostringstream os;
  write_bell_scan_csv(st, BellSettings{}, 3, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "phi_a,phi_b,E,P_D1,P_D2");
  int rows = 0;
  std::string last;
  while (std::getline(is, line)) {
    if (line.rfind("#", 0) == 0)
      last = line;
    else
      ++rows;
  }
  CHECK(rows == 9);
  double s = 0.0, bound = 0.0;
  REQUIRE(std::sscanf(last.c_str(), "# S=%lf classical_bound=%lf", &s,
                      &bound) == 2);
  CHECK(s == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(bound == doctest::Approx(2.0));
  CHECK_THROWS_AS(write_bell_scan_csv(st, BellSettings{}, 1, os),
                  std::invalid_argument);
}
