#pragma once

#include "rpg/game_model.hpp"

namespace rpg {

/// E[max(0, S)] for S ~ Normal(mu, sigma^2). Requires sigma > 0.
double hinge_expect(double mu, double sigma);

/// d/dmu of hinge_expect, i.e. Pr[S > 0].
double hinge_expect_dmu(double mu, double sigma);

/// d/d(sigma^2) of hinge_expect.
double hinge_expect_dvar(double mu, double sigma);

/// Mean and variance of a Gaussian-approximated margin.
struct MarginMoments {
  double mu = 0.0;
  double var = 0.0;

  double sigma() const;
};

enum class Side {
  learner,   // s = 1 - y (w~'x + b)
  attacker,  // t = 1 + y (w~'x + b)
};

MarginMoments margin_moments(Side side, double y, const LearnerParams& learner,
                             const Eigen::Ref<const Vec>& mu_x,
                             const Eigen::Ref<const Vec>& sigma_x);

namespace detail {
// Dot product; switches to Neumaier-compensated summation for long vectors.
double dot(const Eigen::Ref<const Vec>& a, const Eigen::Ref<const Vec>& b);
inline constexpr Index compensated_threshold = 10000;
}  // namespace detail

}  // namespace rpg
