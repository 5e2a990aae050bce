#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "helpers.hpp"
#include "sbsim/phases.hpp"

using namespace sbsim;
using sbsim::testing::physical_model;
using sbsim::testing::plus_state;

namespace {

double point_i(const std::vector<PhasePoint>& pts, double f) {
  for (const PhasePoint& p : pts)
    if (p.f == f && p.regime != Regime::product) return p.i_bits;
  REQUIRE(false);
  return 0.0;
}

}  // namespace

TEST_CASE("phase diagram: plateau, full access, and product points") {
  const SphereModel m = physical_model();
  const double t = 30.0 * decoherence_time(m);
  const auto pts =
      phase_diagram(m, plus_state(), t, {0.5, 1.0}, {3});

  CHECK(point_i(pts, 0.5) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(point_i(pts, 1.0) == doctest::Approx(2.0).epsilon(1e-2));
  for (const PhasePoint& p : pts)
    if (p.regime == Regime::product) {
      CHECK(p.micro_photons == 3);
      CHECK(p.i_bits < 1e-3);
    }

  // Regime labels are structural.
  CHECK(pts[0].regime == Regime::product);
  CHECK(pts[1].regime == Regime::broadcasting);
  CHECK(pts[2].regime == Regime::full_information);
}

TEST_CASE("full access on a classical input yields exactly H_S") {
  SphereModel m = physical_model();
  const double t = 30.0 * decoherence_time(m);
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 0.3;
  d(1, 1) = 0.7;
  const auto pts =
      phase_diagram(m, make_density(std::move(d), {2}), t, {1.0}, {});
  CHECK(pts[0].i_bits == doctest::Approx(binary_entropy(0.3)).epsilon(1e-9));
}

TEST_CASE("information is ordered across the three regimes") {
  const SphereModel m = physical_model();
  const double t = 30.0 * decoherence_time(m);
  const auto pts = phase_diagram(m, plus_state(), t, {0.25, 0.5, 0.75, 1.0}, {2});
  double micro = 0.0;
  for (const PhasePoint& p : pts)
    if (p.regime == Regime::product) micro = p.i_bits;
  CHECK(micro <= point_i(pts, 0.25) + 1e-12);
  CHECK(point_i(pts, 0.25) <= point_i(pts, 1.0) + 1e-12);
  CHECK(point_i(pts, 0.5) <= point_i(pts, 1.0) + 1e-12);
}

TEST_CASE("plateau forms as decoherence progresses") {
  const SphereModel m = physical_model();
  const double tau = decoherence_time(m);
  double prev = -1.0;
  for (double u : {0.5, 2.0, 10.0}) {
    const auto pts = phase_diagram(m, plus_state(), u * tau, {0.5}, {});
    CHECK(pts[0].i_bits > prev);
    prev = pts[0].i_bits;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("plateau flatness across the interior") {
  // Interior points at long times should agree with the plateau height to
  // within 1e-3; the f = 0.1 edge sits e^{-6} / (2 ln 2) ~ 1.8e-3 away, so
  // this property is violated there and the case is expected to stay red.
  const SphereModel m = physical_model();
  const double t = 30.0 * decoherence_time(m);
  const auto pts =
      phase_diagram(m, plus_state(), t, {0.1, 0.25, 0.5, 0.75, 0.9}, {});
  for (const PhasePoint& p : pts) {
    INFO("f = " << p.f);
    CHECK(std::abs(p.i_bits - 1.0) < 1e-3);
  }
}

TEST_CASE("phase diagram input validation") {
  const SphereModel m = physical_model();
  CHECK_THROWS_AS(phase_diagram(m, plus_state(), 1.0, {0.0}, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(phase_diagram(m, plus_state(), 1.0, {1.5}, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(phase_diagram(m, plus_state(), 1.0, {}, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(phase_diagram(m, plus_state(), -1.0, {0.5}, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(phase_diagram(m, plus_state(), 1.0, {}, {-1}),
                  std::invalid_argument);

  // Too few photons for the requested micro point: information is zero.
  const auto pts = phase_diagram(m, plus_state(), 0.0, {}, {3});
  CHECK(pts[0].i_bits == 0.0);
}

TEST_CASE("overlap matrix of a measurement basis") {
  const std::array<Eigen::Vector2cd, 2> pointer = {
      Eigen::Vector2cd(1.0, 0.0), Eigen::Vector2cd(0.0, 1.0)};
  const StochasticMatrixP pid = pf_matrix(pointer);
  pid.validate();
  CHECK((pid.p - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-15);

  const double r = 1.0 / std::sqrt(2.0);
  const std::array<Eigen::Vector2cd, 2> had = {Eigen::Vector2cd(r, r),
                                               Eigen::Vector2cd(r, -r)};
  const StochasticMatrixP ph = pf_matrix(had);
  ph.validate();
  CHECK((ph.p - 0.5 * Eigen::Matrix2d::Ones()).cwiseAbs().maxCoeff() < 1e-12);

  // Random orthonormal bases always give bistochastic matrices.
  for (int rep = 0; rep < 10; ++rep) {
    const ComplexMatrix u = sbsim::testing::random_unitary(2);
    const std::array<Eigen::Vector2cd, 2> phi = {Eigen::Vector2cd(u.col(0)),
                                                 Eigen::Vector2cd(u.col(1))};
    CHECK_NOTHROW(pf_matrix(phi).validate());
  }

  const std::array<Eigen::Vector2cd, 2> skew = {
      Eigen::Vector2cd(1.0, 0.0), Eigen::Vector2cd(r, r)};
  CHECK_THROWS_AS(pf_matrix(skew), std::invalid_argument);
  const std::array<Eigen::Vector2cd, 2> unnorm = {
      Eigen::Vector2cd(2.0, 0.0), Eigen::Vector2cd(0.0, 1.0)};
  CHECK_THROWS_AS(pf_matrix(unnorm), std::invalid_argument);
}

TEST_CASE("stationary distributions of bistochastic matrices") {
  StochasticMatrixP id;
  id.p = Eigen::Matrix2d::Identity();
  const Eigen::VectorXd u2 = pf_stationary(id);
  CHECK(u2(0) == doctest::Approx(0.5).epsilon(1e-12));

  StochasticMatrixP mix;
  mix.p.resize(2, 2);
  mix.p << 0.8, 0.2, 0.2, 0.8;
  const Eigen::VectorXd s2 = pf_stationary(mix);
  CHECK(s2(0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(s2.sum() == doctest::Approx(1.0).epsilon(1e-12));

  // Bistochastic 3x3 circulant: uniform is the unique stationary vector.
  StochasticMatrixP circ;
  circ.p.resize(3, 3);
  circ.p << 0.5, 0.3, 0.2, 0.2, 0.5, 0.3, 0.3, 0.2, 0.5;
  const Eigen::VectorXd s3 = pf_stationary(circ);
  for (int i = 0; i < 3; ++i)
    CHECK(s3(i) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK((circ.p * s3 - s3).cwiseAbs().maxCoeff() < 1e-12);

  StochasticMatrixP bad;
  bad.p.resize(2, 2);
  bad.p << 0.9, 0.2, 0.1, 0.8;
  CHECK_THROWS_AS(pf_stationary(bad), std::invalid_argument);
}

TEST_CASE("spectra pass through the broadcast channel per the fixed point") {
  const SphereModel m = physical_model();
  const double t = 20.0 * decoherence_time(m);
  const std::array<Eigen::Vector2cd, 2> pointer = {
      Eigen::Vector2cd(1.0, 0.0), Eigen::Vector2cd(0.0, 1.0)};
  const double r = 1.0 / std::sqrt(2.0);
  const std::array<Eigen::Vector2cd, 2> had = {Eigen::Vector2cd(r, r),
                                               Eigen::Vector2cd(r, -r)};

  // Pointer basis: every spectrum is a fixed point.
  for (double p1 : {0.1, 0.3, 0.5, 0.8}) {
    const PfReport rep = pf_broadcast_check(m, pointer, {p1, 1.0 - p1}, 0.5,
                                            0.25, t);
    CHECK(rep.max_deviation < 1e-12);
  }

  // Rotated basis: only the stationary (uniform) spectrum is preserved.
  const PfReport fixed = pf_broadcast_check(m, had, {0.5, 0.5}, 0.5, 0.25, t);
  CHECK(fixed.max_deviation < 1e-12);
  const PfReport moved = pf_broadcast_check(m, had, {0.3, 0.7}, 0.5, 0.25, t);
  CHECK(moved.output_spectrum(0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(moved.max_deviation == doctest::Approx(0.2).epsilon(1e-9));

  // The preserved spectrum is exactly the stationary vector of the overlap
  // matrix.
  const Eigen::VectorXd stat = pf_stationary(pf_matrix(had));
  CHECK((pf_matrix(had).p * stat - stat).cwiseAbs().maxCoeff() < 1e-12);
  const PfReport at_stat =
      pf_broadcast_check(m, had, {stat(0), stat(1)}, 0.5, 0.25, t);
  CHECK(at_stat.max_deviation < 1e-9);

  CHECK_THROWS_AS(pf_broadcast_check(m, had, {0.6, 0.6}, 0.5, 0.25, t),
                  std::invalid_argument);
}
