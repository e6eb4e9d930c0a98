#pragma once

#include "rpg/game.hpp"
#include "rpg/game_model.hpp"

#include <cstdint>

namespace rpg {

struct LearnerGradient {
  Vec d_mu_w;
  Vec d_sigma_w;
};

struct AttackerGradient {
  Mat d_mu_x;     // n x k, row i is the gradient for sample i
  Mat d_sigma_x;  // n x k
};

/// Expected learner cost under the Gaussian margin approximation:
/// (rho_l/2)(|mu_w~|^2 + |sigma_w~|^2) + (eps/2)(mu_b^2 + sigma_b^2) + sum_i h(mu_s_i, sigma_s_i).
double learner_cost(const LearnerParams& learner, const AttackerParams& attacker,
                    const GameSpec& game);

/// Regularization part of learner_cost (no loss terms).
double learner_regularizer(const LearnerParams& learner, const GameSpec& game);

LearnerGradient learner_grad(const LearnerParams& learner, const AttackerParams& attacker,
                             const GameSpec& game);

/// Expected attacker cost: sum_i (rho_d/2)(|mu_x_i - x_i|^2 + |sigma_x_i|^2) + h(mu_t_i, sigma_t_i).
double attacker_cost(const LearnerParams& learner, const AttackerParams& attacker,
                     const GameSpec& game);

double attacker_regularizer(const AttackerParams& attacker, const GameSpec& game);

/// Gradient of attacker_cost as written (rho_d scales the regularizer only).
AttackerGradient attacker_grad(const LearnerParams& learner, const AttackerParams& attacker,
                               const GameSpec& game);

/// r = (1, rho_l / rho_d).
PlayerWeights svm_weights(const GameSpec& game);

PseudoGradient pseudo_gradient(const LearnerParams& learner, const AttackerParams& attacker,
                               const GameSpec& game);

/// The linear SVM randomized prediction game over the flattened layout of GameLayout.
class SvmGame final : public Game {
 public:
  explicit SvmGame(GameSpec spec);

  const GameSpec& spec() const noexcept { return spec_; }
  GameLayout layout() const noexcept { return spec_.layout(); }

  Index learner_dim() const override { return layout().learner_dim(); }
  Index attacker_dim() const override { return layout().attacker_dim(); }
  const ParamBox& box() const override { return box_; }

  double learner_cost(const Vec& theta) const override;
  double attacker_cost(const Vec& theta) const override;
  Vec learner_gradient(const Vec& theta) const override;
  Vec attacker_gradient(const Vec& theta) const override;
  PlayerWeights weights() const override { return svm_weights(spec_); }

  double rho_learner() const override { return spec_.rho_l; }
  double rho_attacker() const override { return spec_.rho_d; }
  Mat learner_regularizer_hessian() const override;
  Mat attacker_regularizer_hessian() const override;

  /// Uniform in the box with learner means scaled by 0.1.
  Vec initial_point(std::uint64_t seed) const override;

 private:
  GameSpec spec_;
  ParamBox box_;
};

struct BaselineSvm {
  Vec w;
  double b = 0.0;
  double objective = 0.0;
};

/// Objective (1/(2C))|w|^2 + sum_i [1 - y_i (w'x_i + b)]_+ of a deterministic linear SVM.
double svm_objective(const Dataset& data, double C, const Vec& w, double b);

struct BaselineOptions {
  int steps = 4000;
  double step_size = 1.0;
  int restarts = 5;
  std::uint64_t seed = 0;
};

/// Subgradient descent with decaying steps 1/sqrt(t) and best-iterate tracking; the best of
/// `restarts` runs is returned (run 0 starts from zero, the others from random points).
BaselineSvm train_baseline_svm(const Dataset& data, double C, const BaselineOptions& opts = {});

/// Baseline classifier as learner parameters with deviations at the learner lower bound.
LearnerParams as_learner_params(const BaselineSvm& svm);

}  // namespace rpg
