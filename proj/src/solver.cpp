#include "rpg/solver.hpp"

#include "rpg/config.hpp"
#include "rpg/errors.hpp"
#include "rpg/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rpg {

void SolverConfig::validate() const {
  if (!(sigma_ls > 0.0 && sigma_ls < 1.0)) throw DomainError("sigma_ls must lie in (0, 1)");
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
  if (max_iter < 1) throw DomainError("max_iter must be >= 1");
  if (max_linesearch_pow < 1) throw DomainError("max_linesearch_pow must be >= 1");
}

SolverConfig solver_config_from(const Config& cfg, SolverConfig defaults) {
  SolverConfig out = defaults;
  out.sigma_ls = cfg.get_double("sigma_ls", out.sigma_ls);
  out.beta = cfg.get_double("beta", out.beta);
  out.epsilon = cfg.get_double("epsilon", out.epsilon);
  out.max_iter = static_cast<int>(cfg.get_int("max_iter", out.max_iter));
  out.max_linesearch_pow = static_cast<int>(cfg.get_int("max_linesearch_pow", out.max_linesearch_pow));
  out.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<long long>(out.seed)));
  if (const auto rule = cfg.find("step_rule")) {
    if (*rule == "hyperplane") {
      out.step_rule = StepRule::hyperplane;
    } else if (*rule == "linearized") {
      out.step_rule = StepRule::linearized;
    } else {
      throw DomainError("step_rule must be 'hyperplane' or 'linearized', got '" + *rule + "'");
    }
  }
  out.validate();
  return out;
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::tolerance:
      return "tolerance";
    case Termination::max_iter:
      return "max_iter";
    case Termination::linesearch_fail:
      return "linesearch_fail";
  }
  return "unknown";
}

std::string to_string(StepRule rule) {
  return rule == StepRule::hyperplane ? "hyperplane" : "linearized";
}

std::vector<double> EquilibriumResult::residual_trace() const {
  std::vector<double> out;
  out.reserve(trace.size());
  for (const auto& rec : trace) out.push_back(rec.residual);
  return out;
}

namespace {

Vec stacked_pseudo_gradient(const Game& game, const Vec& theta) {
  return pseudo_gradient(game, theta).stacked();
}

// Largest lambda >= 0 with phi(lambda) = g'(Pi(theta - lambda g) - bar) >= 0. phi is continuous,
// piecewise linear and nonincreasing, with phi(0) = g'(theta - bar) > 0; breakpoints are where a
// coordinate hits its bound.
double hyperplane_step(const Vec& theta, const Vec& g, const Vec& bar, const ParamBox& box) {
  const Index d = theta.size();
  std::vector<std::pair<double, Index>> breaks;
  breaks.reserve(static_cast<std::size_t>(d));
  double phi = 0.0;    // phi at the current lambda
  double slope = 0.0;  // d phi / d lambda on the current segment
  for (Index j = 0; j < d; ++j) {
    phi += g(j) * (theta(j) - bar(j));
    if (g(j) > 0.0) {
      breaks.emplace_back((theta(j) - box.lower(j)) / g(j), j);
    } else if (g(j) < 0.0) {
      breaks.emplace_back((theta(j) - box.upper(j)) / g(j), j);
    } else {
      continue;
    }
    slope -= g(j) * g(j);
  }
  std::sort(breaks.begin(), breaks.end());
  double lambda = 0.0;
  for (const auto& [at, j] : breaks) {
    if (slope < 0.0 && phi + slope * (at - lambda) <= 0.0) return lambda - phi / slope;
    phi += slope * (at - lambda);
    lambda = at;
    slope += g(j) * g(j);  // coordinate j is clipped from here on
  }
  // Every coordinate is clipped and phi stays positive: any larger lambda gives the same point.
  return lambda;
}

}  // namespace

double vi_residual(const Game& game, const Vec& theta) {
  const Vec g = stacked_pseudo_gradient(game, theta);
  return (project_box(theta - g, game.box()) - theta).norm();
}

EquilibriumResult extragradient_solve(const Game& game, const std::optional<Vec>& init,
                                      const SolverConfig& cfg) {
  cfg.validate();
  const ParamBox& box = game.box();
  Vec theta;
  if (init) {
    if (init->size() != game.dim()) throw ShapeError("initial point does not match the game");
    if (!box.contains(*init)) throw DomainError("initial point lies outside the feasible box");
    theta = *init;
  } else {
    theta = game.initial_point(cfg.seed);
  }

  EquilibriumResult result;
  result.learner_dim = game.learner_dim();
  result.trace.reserve(static_cast<std::size_t>(std::min(cfg.max_iter, 100000)));

  Vec best = theta;
  double best_residual = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    const Vec g = stacked_pseudo_gradient(game, theta);
    const Vec d = project_box(theta - g, box) - theta;
    IterationRecord rec;
    rec.residual = d.norm();
    if (rec.residual < best_residual) {
      best_residual = rec.residual;
      best = theta;
    }
    if (rec.residual == 0.0) {
      // theta is already a fixed point of the projected map.
      result.trace.push_back(rec);
      result.termination = Termination::tolerance;
      result.converged = true;
      break;
    }

    const double d2 = d.squaredNorm();
    double t = 1.0;
    int pow = 0;
    Vec bar, g_bar;
    bool accepted = false;
    for (; pow <= cfg.max_linesearch_pow; ++pow) {
      bar = theta + t * d;
      g_bar = stacked_pseudo_gradient(game, bar);
      if (-g_bar.dot(d) >= cfg.sigma_ls * d2) {
        accepted = true;
        break;
      }
      t *= cfg.beta;
    }
    if (!accepted) {
      result.termination = Termination::linesearch_fail;
      theta = best;
      break;
    }

    Vec next;
    const double gb2 = g_bar.squaredNorm();
    if (gb2 == 0.0) {
      next = bar;
    } else {
      rec.step_size = cfg.step_rule == StepRule::hyperplane
                          ? hyperplane_step(theta, g_bar, bar, box)
                          : -t * g_bar.dot(d) / gb2;
      next = project_box(theta - rec.step_size * g_bar, box);
    }
    rec.linesearch_pow = pow;
    rec.squared_step = (next - theta).squaredNorm();
    theta = std::move(next);
    result.trace.push_back(rec);
    if (!theta.allFinite()) throw NumericError("extragradient iterate became non-finite");
    if (rec.squared_step <= cfg.epsilon) {
      result.termination = Termination::tolerance;
      result.converged = true;
      break;
    }
  }

  result.theta = std::move(theta);
  result.iterations = static_cast<int>(result.trace.size());
  return result;
}

namespace {

enum class Player { learner, attacker };

// Projected gradient descent on one player's cost with the other block frozen. Returns the
// lowest cost seen.
double minimize_own_block(const Game& game, Vec theta, Player who, int max_iter) {
  const Index off = who == Player::learner ? 0 : game.learner_dim();
  const Index len = who == Player::learner ? game.learner_dim() : game.attacker_dim();
  const ParamBox& box = game.box();
  const ParamBox own(box.lower.segment(off, len), box.upper.segment(off, len));

  auto cost = [&](const Vec& th) {
    return who == Player::learner ? game.learner_cost(th) : game.attacker_cost(th);
  };
  auto grad = [&](const Vec& th) {
    return who == Player::learner ? game.learner_gradient(th) : game.attacker_gradient(th);
  };

  double f = cost(theta);
  double step = 1.0;
  for (int it = 0; it < max_iter; ++it) {
    const Vec x = theta.segment(off, len);
    const Vec g = grad(theta);
    bool moved = false;
    while (step > 1e-18) {
      const Vec x_new = project_box(x - step * g, own);
      const Vec dx = x_new - x;
      if (dx.squaredNorm() == 0.0) break;
      Vec trial = theta;
      trial.segment(off, len) = x_new;
      const double f_new = cost(trial);
      const double model = f + g.dot(dx) + 0.5 / step * dx.squaredNorm();
      if (f_new <= model + 1e-15 * std::abs(f)) {
        const bool tiny = dx.norm() <= 1e-13 * (1.0 + x.norm());
        theta = std::move(trial);
        f = f_new;
        moved = !tiny;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return f;
}

}  // namespace

NashCheck nash_check(const Game& game, const Vec& theta, int trials, double tol,
                     std::uint64_t seed) {
  if (theta.size() != game.dim()) throw ShapeError("theta does not match the game");
  if (trials < 1) throw DomainError("nash_check needs at least one trial");
  constexpr int kMaxIter = 3000;
  NashCheck out;
  const double cl = game.learner_cost(theta);
  const double cd = game.attacker_cost(theta);
  for (int trial = 0; trial < trials; ++trial) {
    Vec start_l = theta;
    Vec start_d = theta;
    if (trial > 0) {
      const Vec random = uniform_in_box(game.box(), seed + static_cast<std::uint64_t>(trial));
      start_l.head(game.learner_dim()) = random.head(game.learner_dim());
      start_d.tail(game.attacker_dim()) = random.tail(game.attacker_dim());
    }
    out.learner_improvement =
        std::max(out.learner_improvement, cl - minimize_own_block(game, start_l, Player::learner, kMaxIter));
    out.attacker_improvement =
        std::max(out.attacker_improvement, cd - minimize_own_block(game, start_d, Player::attacker, kMaxIter));
  }
  out.passed = out.learner_improvement <= tol && out.attacker_improvement <= tol;
  return out;
}

bool nash_verify(const EquilibriumResult& result, const Game& game, int trials, double tol) {
  return nash_check(game, result.theta, trials, tol).passed;
}

std::string trace_csv(const EquilibriumResult& result) {
  std::string out = "iter,residual,step_size,linesearch_pow\n";
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    const auto& rec = result.trace[i];
    out += std::to_string(i) + "," + format_double(rec.residual) + "," +
           format_double(rec.step_size) + "," + std::to_string(rec.linesearch_pow) + "\n";
  }
  return out;
}

}  // namespace rpg
