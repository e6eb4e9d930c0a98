#include "doctest.h"
#include "oracles.hpp"

#include "rpg/errors.hpp"
#include "rpg/gaussian_hinge.hpp"

#include <cmath>
#include <random>

using namespace rpg;

TEST_CASE("hinge_expect agrees with Monte-Carlo sampling") {
  std::uint64_t seed = 100;
  for (double mu : {-2.0, -0.5, 0.0, 0.7, 2.0}) {
    for (double sigma : {0.1, 1.0, 3.0}) {
      const long draws = 400000;
      const auto mc = oracle::mc_positive_part(mu, sigma, draws, seed++);
      CHECK(std::abs(hinge_expect(mu, sigma) - mc.mean) <= oracle::mc_tolerance(mc, sigma, draws));
    }
  }
}

TEST_CASE("hinge_expect known values") {
  // At mu = 0 the rectified mean is sigma / sqrt(2 pi).
  CHECK(hinge_expect(0.0, 2.0) == doctest::Approx(2.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-14));
  // Far from the kink the expectation collapses onto max(0, mu).
  CHECK(hinge_expect(30.0, 1.0) == doctest::Approx(30.0).epsilon(1e-15));
  CHECK(hinge_expect(-30.0, 1.0) == doctest::Approx(0.0));
  CHECK(hinge_expect(-40.0, 1.0) >= 0.0);
  CHECK(hinge_expect_dmu(0.0, 1.0) == doctest::Approx(0.5));
  CHECK(hinge_expect_dvar(0.0, 1.0) == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0 * M_PI))));
}

TEST_CASE("hinge_expect rejects non-positive deviations") {
  CHECK_THROWS_AS(hinge_expect(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(hinge_expect(0.0, -1.0), DomainError);
  CHECK_THROWS_AS(hinge_expect_dmu(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(hinge_expect_dvar(1.0, -0.1), DomainError);
}

TEST_CASE("hinge_expect derivatives match finite differences") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> umu(-3, 3), usig(0.05, 3);
  for (int i = 0; i < 200; ++i) {
    const double mu = umu(rng), sigma = usig(rng);
    oracle::Vec x(2);
    x << mu, sigma * sigma;
    const oracle::Vec fd = oracle::fd_gradient(
        [](const oracle::Vec& p) { return hinge_expect(p(0), std::sqrt(p(1))); }, x);
    CHECK(hinge_expect_dmu(mu, sigma) == doctest::Approx(fd(0)).epsilon(1e-7));
    CHECK(hinge_expect_dvar(mu, sigma) == doctest::Approx(fd(1)).epsilon(1e-6));
  }
}

TEST_CASE("hinge_expect properties (random sweep)") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> umu(-5, 5), usig(1e-4, 5), udelta(1e-3, 1);
  for (int i = 0; i < 2000; ++i) {
    const double mu = umu(rng), sigma = usig(rng), d = udelta(rng);
    const double h = hinge_expect(mu, sigma);
    // Jensen: E[max(0,S)] >= max(0, E[S]); and E[max(0,S)] <= max(0,mu) + sigma/sqrt(2 pi).
    CHECK(h >= std::max(0.0, mu) - 1e-12);
    CHECK(h <= std::max(0.0, mu) + sigma / std::sqrt(2.0 * M_PI) + 1e-12);
    // max(0,S) - max(0,-S) = S gives h(mu) - h(-mu) = mu.
    CHECK(h - hinge_expect(-mu, sigma) == doctest::Approx(mu).epsilon(1e-10).scale(1.0));
    // Monotone in mu and in sigma.
    CHECK(hinge_expect(mu + d, sigma) >= h);
    CHECK(hinge_expect(mu, sigma + d) >= h - 1e-15);
    const double p = hinge_expect_dmu(mu, sigma);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    CHECK(hinge_expect_dvar(mu, sigma) >= 0.0);
  }
}

TEST_CASE("hinge_expect approaches the hinge as sigma shrinks") {
  for (double mu : {-1.0, -1e-3, 0.25, 2.0}) {
    double prev = std::abs(hinge_expect(mu, 1.0) - std::max(0.0, mu));
    for (double sigma : {1e-1, 1e-2, 1e-3, 1e-4, 1e-6}) {
      const double gap = std::abs(hinge_expect(mu, sigma) - std::max(0.0, mu));
      CHECK(gap <= prev + 1e-15);
      CHECK(gap <= sigma / std::sqrt(2.0 * M_PI) + 1e-15);
      prev = gap;
    }
  }
}

namespace {

// Sample moments of s = 1 - y(w~'x + b) (learner) or t = 1 + y(w~'x + b) (attacker) with
// independent Gaussian w and x.
oracle::Moments sample_margin(Side side, double y, const LearnerParams& l, const Vec& mu_x,
                              const Vec& sigma_x, long draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  const Index k = l.k();
  oracle::Moments m;
  for (long d = 0; d < draws; ++d) {
    double f = l.mu_w(k) + l.sigma_w(k) * z(rng);
    for (Index j = 0; j < k; ++j) {
      const double w = l.mu_w(j) + l.sigma_w(j) * z(rng);
      const double x = mu_x(j) + sigma_x(j) * z(rng);
      f += w * x;
    }
    m.add(side == Side::learner ? 1.0 - y * f : 1.0 + y * f);
  }
  return m;
}

}  // namespace

TEST_CASE("margin_moments match sampled moments of the margin") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> um(-1, 1), us(0.05, 0.8);
  for (int trial = 0; trial < 4; ++trial) {
    const Index k = 1 + trial;
    Vec mw(k + 1), sw(k + 1), mx(k), sx(k);
    for (Index j = 0; j <= k; ++j) {
      mw(j) = um(rng);
      sw(j) = us(rng);
    }
    for (Index j = 0; j < k; ++j) {
      mx(j) = um(rng);
      sx(j) = us(rng);
    }
    const LearnerParams l(mw, sw);
    const Side side = trial % 2 == 0 ? Side::learner : Side::attacker;
    const double y = trial < 2 ? 1.0 : -1.0;
    const MarginMoments mm = margin_moments(side, y, l, mx, sx);
    const oracle::Moments s = sample_margin(side, y, l, mx, sx, 300000, 1000 + trial);
    const auto mean = s.mean_estimate();
    const auto var = s.variance();
    CHECK(std::abs(mm.mu - mean.mean) <= 4.0 * mean.se);
    CHECK(std::abs(mm.var - var.mean) <= 4.0 * var.se);
  }
}

TEST_CASE("margin_moments shape checks and side symmetry") {
  const LearnerParams l(Vec::Ones(3), Vec::Constant(3, 0.1));
  CHECK_THROWS_AS(margin_moments(Side::learner, 1.0, l, Vec::Zero(3), Vec::Ones(3)), ShapeError);
  CHECK_THROWS_AS(margin_moments(Side::learner, 1.0, l, Vec::Zero(2), Vec::Ones(3)), ShapeError);
  const Vec mx = Vec::Constant(2, 0.3), sx = Vec::Constant(2, 0.2);
  const auto s = margin_moments(Side::learner, 1.0, l, mx, sx);
  const auto t = margin_moments(Side::attacker, 1.0, l, mx, sx);
  CHECK(s.mu + t.mu == doctest::Approx(2.0));
  CHECK(s.var == t.var);
  CHECK(s.var > 0.0);
}

TEST_CASE("compensated dot product on long vectors") {
  const Index n = 200000;
  Vec a = Vec::Ones(n), b = Vec::Ones(n);
  a(0) = 1e16;
  a(n - 1) = -1e16;
  // Left-to-right summation absorbs every unit term into 1e16; the exact sum is n - 2.
  CHECK(detail::dot(a, b) == doctest::Approx(static_cast<double>(n - 2)));
  CHECK(detail::dot(Vec::Ones(5), Vec::Constant(5, 2.0)) == 10.0);
}
