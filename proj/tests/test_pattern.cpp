#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "isac/pattern.hpp"

using namespace isac;

TEST_CASE("grid spacing and range") {
  const rvec g4 = build_grid(4);
  const double expected[] = {-0.5, 0.0, 0.5, 1.0};
  for (int i = 0; i < 4; ++i) {
    CHECK(g4(i) == doctest::Approx(expected[i]).epsilon(1e-15));
  }

  const rvec g = build_grid(400);
  REQUIRE(g.size() == 400);
  CHECK(g(399) == 1.0);
  for (Eigen::Index i = 1; i < g.size(); ++i) {
    CHECK(g(i) - g(i - 1) == doctest::Approx(2.0 / 400).epsilon(1e-9));
  }
  for (int m : {2, 3, 17, 1000}) {
    const rvec x = build_grid(m);
    CHECK(x.minCoeff() > -1.0);
    CHECK(x.maxCoeff() <= 1.0);
  }
  CHECK_THROWS_AS(build_grid(1), std::invalid_argument);
}

TEST_CASE("objective gain for the two paper bands") {
  const double denom = std::sin(30 * M_PI / 180) - std::sin(10 * M_PI / 180) +
                       std::sin(60 * M_PI / 180) - std::sin(40 * M_PI / 180);
  CHECK(denom == doctest::Approx(0.54959).epsilon(1e-4));
  const double g = objective_gain({{10, 30}, {40, 60}}, 3, 100.0);
  CHECK(g == doctest::Approx(std::sqrt(600.0 / denom)).epsilon(1e-14));
  CHECK(g == doctest::Approx(33.04).epsilon(1e-3));

  // A band whose sine measure is the full (-1, 1] range.
  CHECK(objective_gain({{-90.0 + 1e-9, 90.0}}, 1, 1.0) == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(objective_gain({}, 3, 100.0), std::invalid_argument);
  CHECK_THROWS_AS(objective_gain({{20.0, 20.0}}, 3, 100.0), std::invalid_argument);
}

TEST_CASE("objective pattern is G on the bands and zero elsewhere") {
  Scenario s;
  const rvec grid = build_grid(400);
  const rvec b = build_objective(s, grid);
  const double g = objective_gain(s.objective_bands, 3, 100.0);
  int in = 0;
  for (Eigen::Index m = 0; m < grid.size(); ++m) {
    const double deg = std::asin(grid(m)) * 180.0 / M_PI;
    const bool inside = (deg >= 10.0 - 1e-9 && deg <= 30.0 + 1e-9) ||
                        (deg >= 40.0 - 1e-9 && deg <= 60.0 + 1e-9);
    CHECK(b(m) == (inside ? g : 0.0));
    in += inside;
    if (std::abs(grid(m)) < 1e-12) {
      CHECK(b(m) == 0.0);
    }
  }
  CHECK(in > 0);
}

TEST_CASE("band edges are closed") {
  const AngleBand band{0.0, 30.0};
  CHECK(in_band(band, 0.5));
  CHECK(in_band(band, 0.0));
  CHECK_FALSE(in_band(band, 0.5 + 1e-9));
}

TEST_CASE("objective energy approximates 2 N_RF P_T on a fine grid") {
  Scenario s;
  s.grid_size = 4000;
  const rvec grid = build_grid(s.grid_size);
  const rvec b = build_objective(s, grid);
  const double integral = b.squaredNorm() * (2.0 / s.grid_size);
  CHECK(integral == doctest::Approx(2.0 * 3 * 100.0).epsilon(0.01));
}

TEST_CASE("sampling matrix rows are the conjugated array response") {
  const rvec grid = build_grid(9);
  const cmat phi = sampling_matrix(6, grid);
  for (Eigen::Index m = 0; m < grid.size(); ++m) {
    for (int k = 0; k < 6; ++k) {
      const std::complex<double> want = std::exp(std::complex<double>(0.0, -M_PI * k * grid(m)));
      CHECK(std::abs(phi(m, k) - want) < 1e-14);
    }
    const cvec a = steering_vector(6, grid(m));
    CHECK((phi.row(m).transpose() - std::sqrt(6.0) * a.conjugate()).norm() < 1e-14);
  }
}

TEST_CASE("pattern energy over the grid is M times the beam power") {
  Rng rng(12);
  for (int n : {4, 16, 33}) {
    const int m = 2 * n + 5;
    const cmat phi = sampling_matrix(n, build_grid(m));
    cvec f(n);
    for (int k = 0; k < n; ++k) {
      f(k) = complex_normal(rng, 1.0);
    }
    CHECK(beam_pattern(phi, f).squaredNorm() == doctest::Approx(m * f.squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("pattern spec ties A to b and defaults D to identity") {
  Scenario s;
  s.n_bs = 8;
  s.grid_size = 50;
  const PatternSpec p = build_pattern_spec(s);
  CHECK(p.a_diag == p.b);
  CHECK(p.d_diag == rvec::Ones(50));
  CHECK(p.phi.rows() == 50);
  CHECK(p.phi.cols() == 8);
  s.weight_diag.assign(50, 2.0);
  CHECK(build_pattern_spec(s).d_diag == rvec::Constant(50, 2.0));
}

TEST_CASE("beam pattern") {
  const int n = 16;
  const rvec grid = build_grid(64);
  const cmat phi = sampling_matrix(n, grid);
  CHECK(beam_pattern(phi, cvec::Zero(n)).isZero());

  // A unit-power beam steered to grid point k peaks at sqrt(N) there.
  const Eigen::Index k = 40;
  const cvec f = steering_vector(n, grid(k));
  const rvec v = beam_pattern(phi, f);
  CHECK(v(k) == doctest::Approx(std::sqrt(double(n))).epsilon(1e-13));
  CHECK(v.maxCoeff() == doctest::Approx(v(k)).epsilon(1e-13));

  Rng rng(4);
  const cvec r = random_unit_modulus(n, rng);
  const cd c = std::polar(1.0, 0.77);
  CHECK((beam_pattern(phi, c * r) - beam_pattern(phi, r)).norm() < 1e-12);

  CHECK_THROWS_AS(beam_pattern(phi, cvec::Zero(n + 1)), std::invalid_argument);
}

TEST_CASE("pattern mse") {
  Scenario s;
  s.n_bs = 8;
  s.grid_size = 100;
  const PatternSpec p = build_pattern_spec(s);

  const cmat zero = cmat::Zero(8, 3);
  double direct = 0.0;
  for (Eigen::Index m = 0; m < p.b.size(); ++m) {
    direct += p.b(m) * p.b(m);
  }
  CHECK(pattern_mse(p.phi, zero, p.b, 3, 100.0) == doctest::Approx(direct / 300.0));

  Rng rng(8);
  cmat f(8, 3);
  for (int j = 0; j < 3; ++j) {
    f.col(j) = random_unit_modulus(8, rng);
  }
  const double base = pattern_mse(p.phi, f, p.b, 3, 100.0);
  CHECK(base >= 0.0);
  CHECK(pattern_mse(p.phi, f, p.b, 3, 200.0) == doctest::Approx(base / 2.0));

  // b equal to the achieved pattern.
  const rvec exact = beam_pattern(p.phi, f.rowwise().sum());
  CHECK(pattern_mse(p.phi, f, exact, 3, 100.0) == doctest::Approx(0.0));

  CHECK_THROWS_AS(pattern_mse(p.phi, cmat::Zero(7, 3), p.b, 3, 100.0), std::invalid_argument);
}
