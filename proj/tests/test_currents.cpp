#include <doctest.h>

#include <cmath>

#include "nfs/currents.hpp"

using namespace nfs;

namespace {
struct Fix {
  NuclearConstants consts;
  Geometry geom;
  LevelScheme scheme = build_level_scheme(calibrated_config());
};
}  // namespace

TEST_CASE("spherical unit vectors") {
  const auto n0 = spherical_unit_vector(0);
  CHECK(n0(0) == std::complex<double>(0.0));
  CHECK(n0(2) == std::complex<double>(1.0));
  const auto np = spherical_unit_vector(1);
  CHECK(np(0).real() == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(np(1).imag() == doctest::Approx(-1.0 / std::sqrt(2.0)));
  for (int q : {-1, 0, 1})
    CHECK(spherical_unit_vector(q).norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(spherical_unit_vector(2), std::invalid_argument);
}

TEST_CASE("current directions in the reference geometry") {
  Fix f;
  for (const auto& line : f.scheme.lines) {
    const auto elem = current_element(line, f.geom, f.consts);
    if (line.two_q() == 0) {
      // sigma: along e_x
      CHECK(std::abs(elem.j_vec(1)) < 1e-14);
      CHECK(std::abs(elem.j_vec(2)) < 1e-14);
      CHECK(std::abs(elem.j_vec(0)) > 0.0);
    } else {
      // pi: along e_z
      CHECK(std::abs(elem.j_vec(0)) < 1e-14);
      CHECK(std::abs(elem.j_vec(1)) < 1e-14);
      CHECK(std::abs(elem.j_vec(2)) > 0.0);
    }
  }
}

TEST_CASE("polarization selection: only Delta m = 0 couples to e_x") {
  Fix f;
  int nonzero = 0;
  for (const auto& line : f.scheme.lines) {
    const auto elem = current_element(line, f.geom, f.consts);
    const auto c = coupling(elem, f.geom.e0);
    if (std::abs(c) > 1e-14) {
      ++nonzero;
      CHECK(line.two_q() == 0);
    }
  }
  CHECK(nonzero == 2);
}

TEST_CASE("stretched vs inner Delta m = +-1 strength ratio is 3:1") {
  Fix f;
  const auto stretched =
      current_element(f.scheme.line(1, 3), f.geom, f.consts);
  const auto inner = current_element(f.scheme.line(1, -1), f.geom, f.consts);
  const double r = stretched.j_vec.squaredNorm() / inner.j_vec.squaredNorm();
  CHECK(r == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("line-strength sum rule") {
  Fix f;
  double sum = 0.0;
  for (const auto& line : f.scheme.lines)
    sum += std::pow(three_j(1, 2, 3, -line.two_m_g, -line.two_q(), line.two_m_e), 2);
  // 2 ground states x 1/2 strength each with the (2I_e+1) normalization
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("time dependence of the currents") {
  Fix f;
  const auto elem = current_element(f.scheme.line(1, 1), f.geom, f.consts);
  CHECK((time_current(elem, 0.0, f.consts) - elem.j_vec).norm() < 1e-15);
  const double r141 =
      time_current(elem, f.consts.tau_s, f.consts).norm() / elem.j_vec.norm();
  CHECK(r141 == doctest::Approx(std::exp(-0.5)).epsilon(1e-13));
  // modulus independent of the oscillation frequency
  for (double t : {3e-9, 80e-9}) {
    const double m = time_current(elem, t, f.consts).norm();
    CHECK(m == doctest::Approx(elem.j_vec.norm() *
                               std::exp(-0.5 * f.consts.decay_rate() * t))
                   .epsilon(1e-13));
  }
}

TEST_CASE("currents scale as sqrt(Gamma_gamma)") {
  Fix f;
  NuclearConstants doubled = f.consts;
  doubled.ic_ratio = (f.consts.ic_ratio + 1.0) / 2.0 - 1.0;  // halves 1 + ic
  const auto a = current_element(f.scheme.line(1, 1), f.geom, f.consts);
  const auto b = current_element(f.scheme.line(1, 1), f.geom, doubled);
  CHECK(b.j_vec.norm() / a.j_vec.norm() ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("coupling is linear and vanishes for longitudinal polarization") {
  Fix f;
  Geometry g = f.geom;
  g.e0 = Eigen::Vector3d(0.0, 0.0, 1.0);  // e_z, still transverse to k = e_y
  int nonzero = 0;
  for (const auto& line : f.scheme.lines) {
    const auto elem = current_element(line, g, f.consts);
    if (std::abs(coupling(elem, g.e0)) > 1e-14) ++nonzero;
  }
  // with e0 parallel to the quantization axis the Delta m = 0 currents are
  // perpendicular to e0 and the Delta m = +-1 currents are along e_z...
  CHECK(nonzero == 4);
  const auto elem = current_element(f.scheme.line(1, 1), f.geom, f.consts);
  CHECK(std::abs(coupling(elem, Eigen::Vector3d::Zero())) == 0.0);
}

TEST_CASE("Gamma0 bookkeeping") {
  NuclearConstants c;
  CHECK(c.Gamma0_eV() ==
        doctest::Approx(c.Gamma_gamma_eV() * (1.0 + c.ic_ratio)).epsilon(1e-15));
  CHECK(c.decay_rate() * c.tau_s == doctest::Approx(1.0).epsilon(1e-15));
}
