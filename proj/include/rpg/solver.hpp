#pragma once

#include "rpg/game.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rpg {

class Config;

/// How eta is chosen once the line search has produced bar = theta + t d.
enum class StepRule {
  // eta = -t g(bar)'d / |g(bar)|^2, then project: the literal update.
  linearized,
  // eta such that Pi(theta - eta g(bar)) lies on the hyperplane g(bar)'(z - bar) = 0, i.e. the
  // projection of theta onto box n hyperplane. Coincides with `linearized` when no coordinate
  // is clipped; unlike it, clipped coordinates do not shrink the step.
  hyperplane,
};

std::string to_string(StepRule rule);

struct SolverConfig {
  double sigma_ls = 0.5;  // line-search sufficient-decrease constant, in (0, 1)
  double beta = 0.5;      // line-search contraction, in (0, 1)
  double epsilon = 1e-10; // stop when |theta_k - theta_{k-1}|^2 <= epsilon
  int max_iter = 5000;
  int max_linesearch_pow = 60;
  std::uint64_t seed = 0;
  StepRule step_rule = StepRule::hyperplane;

  void validate() const;
};

SolverConfig solver_config_from(const Config& cfg, SolverConfig defaults = {});

enum class Termination { tolerance, max_iter, linesearch_fail };

std::string to_string(Termination t);

struct IterationRecord {
  double residual = 0.0;      // |Pi(theta - g(theta)) - theta|
  double step_size = 0.0;     // eta
  int linesearch_pow = 0;     // p with t = beta^p
  double squared_step = 0.0;  // |theta_{k+1} - theta_k|^2
};

struct EquilibriumResult {
  Vec theta;
  Index learner_dim = 0;
  int iterations = 0;
  std::vector<IterationRecord> trace;
  bool converged = false;
  Termination termination = Termination::max_iter;

  Vec theta_learner() const { return theta.head(learner_dim); }
  Vec theta_attacker() const { return theta.tail(theta.size() - learner_dim); }
  std::vector<double> residual_trace() const;
};

/// Extragradient (hyperplane-projection) descent on the game's pseudo-gradient:
///
///   d     = Pi(theta - g(theta)) - theta
///   t     = largest beta^p with  -g(theta + t d)' d >= sigma |d|^2
///   eta   = -t g(bar)' d / |g(bar)|^2,   bar = theta + t d
///   theta = Pi(theta - eta g(bar))
///
/// (see StepRule for the choice of eta)
/// until the squared step drops to epsilon. Without `init` the start is game.initial_point(seed).
EquilibriumResult extragradient_solve(const Game& game, const std::optional<Vec>& init,
                                      const SolverConfig& cfg = {});

/// |Pi(theta - g(theta)) - theta|; zero exactly at solutions of the variational inequality.
double vi_residual(const Game& game, const Vec& theta);

struct NashCheck {
  bool passed = false;
  double learner_improvement = 0.0;   // best cost decrease found for the learner
  double attacker_improvement = 0.0;  // and for the attacker
};

/// Holds each player's opponent fixed at theta and runs projected gradient descent on its own
/// cost from theta (trial 0) and from `trials - 1` random points in its box.
NashCheck nash_check(const Game& game, const Vec& theta, int trials, double tol,
                     std::uint64_t seed = 0);

bool nash_verify(const EquilibriumResult& result, const Game& game, int trials, double tol);

/// CSV with header iter,residual,step_size,linesearch_pow.
std::string trace_csv(const EquilibriumResult& result);

}  // namespace rpg
