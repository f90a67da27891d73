#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "isac/altmin.hpp"
#include "isac/factorize.hpp"

using namespace isac;

namespace {

cmat random_complex(Eigen::Index rows, Eigen::Index cols, Rng &rng) {
  cmat z(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      z(i, j) = complex_normal(rng, 1.0);
    }
  }
  return z;
}

cmat random_unit_matrix(Eigen::Index rows, Eigen::Index cols, Rng &rng) {
  cmat z(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    z.col(j) = random_unit_modulus(rows, rng);
  }
  return z;
}

double real_inner(const cmat &a, const cmat &b) { return (a.conjugate().cwiseProduct(b)).sum().real(); }

} // namespace

TEST_CASE("digital update on small explicit systems") {
  cmat f_rf(2, 1), f_hat(2, 1);
  f_rf << 1.0, 1.0;
  f_hat << 2.0, 0.0;
  const DigitalUpdate d = update_digital(f_rf, f_hat);
  CHECK(std::abs(d.f_bb(0, 0) - 1.0) < 1e-14);
  CHECK_FALSE(d.regularized);

  Rng rng(1);
  const cmat rf = random_unit_matrix(8, 3, rng);
  const cmat x = random_complex(3, 3, rng);
  CHECK((update_digital(rf, rf * x).f_bb - x).norm() < 1e-10);
}

TEST_CASE("digital update beats random alternatives") {
  Rng rng(2);
  const cmat rf = random_unit_matrix(8, 2, rng);
  const cmat target = random_complex(8, 2, rng);
  const cmat bb = update_digital(rf, target).f_bb;
  const double best = (target - rf * bb).norm();
  int worse = 0;
  for (int k = 0; k < 1000; ++k) {
    const double scale = k < 500 ? 1e-3 : 1.0;
    const cmat cand = bb + scale * random_complex(2, 2, rng);
    worse += (target - rf * cand).norm() >= best;
  }
  CHECK(worse == 1000);
}

TEST_CASE("digital update falls back to a ridge for repeated analog columns") {
  Rng rng(3);
  cmat rf = random_unit_matrix(6, 2, rng);
  rf.col(1) = rf.col(0);
  const cmat target = random_complex(6, 2, rng);
  const DigitalUpdate d = update_digital(rf, target);
  CHECK(d.regularized);
  CHECK(d.f_bb.allFinite());
  // The fit is still the projection onto the single column.
  const cvec a = rf.col(0);
  const cmat proj = a * (a.adjoint() * target) / a.squaredNorm();
  CHECK((rf * d.f_bb - proj).norm() < 1e-6);
}

TEST_CASE("retraction and cost") {
  cmat x(2, 2);
  x << cd(3.0, 4.0), 0.0, cd(-2.0, 0.0), cd(0.0, -0.5);
  const cmat r = retract(x);
  CHECK(std::abs(r(0, 0) - cd(0.6, 0.8)) < 1e-15);
  CHECK(r(0, 1) == cd(1.0, 0.0));
  CHECK(std::abs(r(1, 0) - cd(-1.0, 0.0)) < 1e-15);
  CHECK(std::abs(r(1, 1) - cd(0.0, -1.0)) < 1e-15);

  Rng rng(4);
  const cmat rf = random_unit_matrix(5, 2, rng);
  const cmat bb = random_complex(2, 2, rng);
  const cmat target = random_complex(5, 2, rng);
  CHECK(factorization_cost(rf, bb, target) ==
        doctest::Approx(0.5 * (target - rf * bb).squaredNorm()).epsilon(1e-14));
}

TEST_CASE("Riemannian gradient matches finite differences along the manifold") {
  Rng rng(5);
  const cmat rf = random_unit_matrix(16, 2, rng);
  const cmat bb = random_complex(2, 2, rng);
  const cmat target = random_complex(16, 2, rng);
  const cmat grad = riemannian_gradient(rf, bb, target);

  // Tangent vectors at x are j * r * x with r real.
  for (Eigen::Index i = 0; i < rf.size(); ++i) {
    CHECK(std::abs((std::conj(rf(i)) * grad(i)).real()) < 1e-12);
  }
  for (int trial = 0; trial < 5; ++trial) {
    cmat xi(16, 2);
    for (Eigen::Index i = 0; i < xi.size(); ++i) {
      xi(i) = cd(0.0, complex_normal(rng, 1.0).real()) * rf(i);
    }
    const double t = 1e-6;
    const double fd = (factorization_cost(retract(rf + t * xi), bb, target) -
                       factorization_cost(retract(rf - t * xi), bb, target)) /
                      (2 * t);
    CHECK(fd == doctest::Approx(real_inner(grad, xi)).epsilon(1e-5));
  }
}

TEST_CASE("analog update") {
  Rng rng(6);
  const cmat rf = random_unit_matrix(10, 3, rng);
  const cmat bb = random_complex(3, 3, rng);
  const AnalogUpdate same = update_analog(bb, rf * bb, rf);
  CHECK((same.f_rf - rf).norm() < 1e-12);
  CHECK(same.residual < 1e-12);

  cmat one(1, 1), target(1, 1);
  one << 1.0;
  target << std::polar(2.0, kPi / 3);
  const AnalogUpdate u = update_analog(one, target, one);
  double grid_best = 1e300, grid_arg = 0.0;
  for (int k = 0; k < 6284; ++k) {
    const double theta = k * 2.0 * kPi / 6284;
    const double c = std::abs(target(0, 0) - std::polar(1.0, theta));
    if (c < grid_best) {
      grid_best = c;
      grid_arg = theta;
    }
  }
  CHECK(std::abs(u.f_rf(0, 0) - std::polar(1.0, grid_arg)) < 1e-3);
  CHECK(std::abs(u.f_rf(0, 0) - std::polar(1.0, kPi / 3)) < 1e-6);
  CHECK(u.residual <= grid_best + 1e-12);

  for (int trial = 0; trial < 10; ++trial) {
    const cmat start = random_unit_matrix(12, 3, rng);
    const cmat b = random_complex(3, 3, rng);
    const cmat t = random_complex(12, 3, rng);
    const AnalogUpdate a = update_analog(b, t, start);
    CHECK(a.residual <= (t - start * b).norm() + 1e-10);
    CHECK(a.residual == doctest::Approx((t - a.f_rf * b).norm()).epsilon(1e-12));
    for (Eigen::Index i = 0; i < a.f_rf.size(); ++i) {
      CHECK(std::abs(std::abs(a.f_rf(i)) - 1.0) < 1e-12);
    }
  }
  CHECK_THROWS_AS(update_analog(bb, rf * bb, cmat::Ones(9, 3)), std::invalid_argument);
}

TEST_CASE("single-chain representable target is recovered") {
  // With one RF chain the fit maximizes |a' f_hat| over unit-modulus a, which
  // has no spurious local maxima.
  Scenario s;
  s.n_bs = 16;
  s.n_c = 1;
  s.sinr_thresholds = {10.0};
  s.user_angles_deg = {0.0};
  ManifoldSettings opt;
  opt.grad_tol = 1e-10;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    cmat target = random_unit_matrix(16, 1, rng) * complex_normal(rng, 1.0);
    target *= std::sqrt(s.p_t) / target.norm();
    const HybridFactors f = factorize(target, s, default_factorization_stop(), rng, opt);
    CAPTURE(seed);
    CHECK((f.effective - target).norm() < 1e-6);
    CHECK(f.residual_trace.back() < 1e-6);
  }
}

TEST_CASE("factorization traces, modulus and normalization") {
  Scenario s;
  s.n_bs = 16;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    const cmat target = random_complex(16, 3, rng);
    const HybridFactors f = factorize(target, s, default_factorization_stop(), rng);
    CHECK(f.f_rf.rows() == 16);
    CHECK(f.f_bb.rows() == 3);
    for (Eigen::Index i = 0; i < f.f_rf.size(); ++i) {
      CHECK(std::abs(std::abs(f.f_rf(i)) - 1.0) < 1e-9);
    }
    CHECK(f.effective.squaredNorm() == doctest::Approx(s.p_t).epsilon(1e-9));
    CHECK((f.effective - f.f_rf * f.f_bb).norm() < 1e-12);
    for (std::size_t k = 1; k < f.residual_trace.size(); ++k) {
      CHECK(f.residual_trace[k] <= f.residual_trace[k - 1] + 1e-8);
    }
    CHECK_FALSE(f.normalization_skipped);
  }
}

TEST_CASE("zero target skips the normalization") {
  Scenario s;
  s.n_bs = 8;
  Rng rng(7);
  const HybridFactors f = factorize(cmat::Zero(8, 3), s, default_factorization_stop(), rng);
  CHECK(f.normalization_skipped);
  CHECK(f.effective.isZero());
  CHECK(f.f_bb.allFinite());
}

TEST_CASE("desk-scale designs factorize with small relative error") {
  std::vector<double> errors;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Scenario s;
    s.n_bs = 32;
    s.grid_size = 100;
    s.sinr_thresholds.assign(3, db_to_linear(10.0));
    Rng rng(seed);
    const ChannelSet ch = generate_channels(s, rng);
    const PatternSpec pat = build_pattern_spec(s);
    const BeamDesign d = design_transmit_beam(s, ch, pat, StopRule{}, rng);
    REQUIRE(d.f_list.size() > 0);
    const HybridFactors f = factorize(d.f_list, s, default_factorization_stop(), rng);
    errors.push_back((d.f_list - f.effective).norm() / d.f_list.norm());
  }
  std::sort(errors.begin(), errors.end());
  const double median = 0.5 * (errors[4] + errors[5]);
  CHECK(median < 0.2);
}
