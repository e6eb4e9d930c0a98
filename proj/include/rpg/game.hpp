#pragma once

#include "rpg/game_model.hpp"

#include <cstdint>

namespace rpg {

/// Positive weights (r_l, r_d) applied to the players' own gradients in the pseudo-gradient.
struct PlayerWeights {
  double learner = 1.0;
  double attacker = 1.0;
};

/// Pseudo-gradient split by player. `g_learner` and `g_attacker` already carry the weights r.
struct PseudoGradient {
  Vec g_learner;
  Vec g_attacker;
  PlayerWeights r;

  Vec stacked() const;
};

/// A two-player game over a flattened strategy vector theta = [theta_l; theta_d] with
/// box-constrained strategy sets. This is the surface the solver and the diagnostics work on;
/// the SVM game, its kernelized variant and the toy games all implement it.
class Game {
 public:
  virtual ~Game() = default;

  virtual Index learner_dim() const = 0;
  virtual Index attacker_dim() const = 0;
  Index dim() const { return learner_dim() + attacker_dim(); }

  virtual const ParamBox& box() const = 0;

  virtual double learner_cost(const Vec& theta) const = 0;
  virtual double attacker_cost(const Vec& theta) const = 0;

  // Gradients of each player's cost with respect to its own block only.
  virtual Vec learner_gradient(const Vec& theta) const = 0;
  virtual Vec attacker_gradient(const Vec& theta) const = 0;

  virtual PlayerWeights weights() const = 0;

  // The costs decompose as c = rho * Omega(own block) + L(theta). These expose rho and the
  // (constant) Hessians of the expected regularizers Omega, used by the uniqueness diagnostics.
  virtual double rho_learner() const = 0;
  virtual double rho_attacker() const = 0;
  virtual Mat learner_regularizer_hessian() const = 0;
  virtual Mat attacker_regularizer_hessian() const = 0;

  /// Starting point for the solver: uniform inside the box.
  virtual Vec initial_point(std::uint64_t seed) const;

  auto learner_block(const Vec& theta) const { return theta.head(learner_dim()); }
  auto attacker_block(const Vec& theta) const { return theta.tail(attacker_dim()); }
};

PseudoGradient pseudo_gradient(const Game& game, const Vec& theta);

/// Uniform draw inside a box from a seeded engine.
Vec uniform_in_box(const ParamBox& box, std::uint64_t seed);

}  // namespace rpg
