#pragma once

#include "rpg/game.hpp"

namespace rpg {

/// Quadratic two-player game
///   c_l = 1/2 theta_l' A_l theta_l + theta_l' B_l theta_d + a_l' theta_l
///   c_d = 1/2 theta_d' A_d theta_d + theta_d' B_d theta_l + a_d' theta_d
/// over a box. The quadratic own-block terms play the role of rho * Omega (rho = 1).
/// Used to exercise the solver and the diagnostics on games with hand-derivable equilibria.
class QuadraticGame final : public Game {
 public:
  QuadraticGame(Mat A_l, Mat B_l, Vec a_l, Mat A_d, Mat B_d, Vec a_d, ParamBox box);

  Index learner_dim() const override { return A_l_.rows(); }
  Index attacker_dim() const override { return A_d_.rows(); }
  const ParamBox& box() const override { return box_; }

  double learner_cost(const Vec& theta) const override;
  double attacker_cost(const Vec& theta) const override;
  Vec learner_gradient(const Vec& theta) const override;
  Vec attacker_gradient(const Vec& theta) const override;
  PlayerWeights weights() const override { return {}; }

  double rho_learner() const override { return 1.0; }
  double rho_attacker() const override { return 1.0; }
  Mat learner_regularizer_hessian() const override { return A_l_; }
  Mat attacker_regularizer_hessian() const override { return A_d_; }

 private:
  Mat A_l_, B_l_;
  Vec a_l_;
  Mat A_d_, B_d_;
  Vec a_d_;
  ParamBox box_;
};

/// c_l = 1/2 (theta_l - a)^2, c_d = 1/2 (theta_d - b)^2 on [lo, hi]^2 (costs up to a constant).
QuadraticGame decoupled_quadratic_game(double a, double b, double lo, double hi);

/// c_l = 1/2 theta_l^2 + theta_l theta_d, c_d = 1/2 theta_d^2 - theta_l theta_d on [lo, hi]^2.
/// Pseudo-gradient (theta_l + theta_d, theta_d - theta_l); unique equilibrium (0, 0).
QuadraticGame bilinear_game(double lo = -1.0, double hi = 1.0);

/// c_l = theta_l theta_d, c_d = -theta_l theta_d: skew operator (theta_d, -theta_l).
QuadraticGame zero_sum_bilinear_game(double lo = -1.0, double hi = 1.0);

}  // namespace rpg
