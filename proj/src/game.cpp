#include "rpg/game.hpp"

#include "rpg/errors.hpp"

#include <random>

namespace rpg {

Vec PseudoGradient::stacked() const {
  Vec out(g_learner.size() + g_attacker.size());
  out << g_learner, g_attacker;
  return out;
}

Vec uniform_in_box(const ParamBox& box, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec v(box.dim());
  for (Index i = 0; i < v.size(); ++i) {
    v(i) = box.lower(i) + unit(rng) * (box.upper(i) - box.lower(i));
  }
  return v;
}

Vec Game::initial_point(std::uint64_t seed) const { return uniform_in_box(box(), seed); }

PseudoGradient pseudo_gradient(const Game& game, const Vec& theta) {
  if (theta.size() != game.dim()) throw ShapeError("theta does not match the game dimension");
  const PlayerWeights r = game.weights();
  PseudoGradient g{r.learner * game.learner_gradient(theta),
                   r.attacker * game.attacker_gradient(theta), r};
  if (!g.g_learner.allFinite() || !g.g_attacker.allFinite()) {
    throw NumericError("pseudo-gradient is not finite");
  }
  return g;
}

}  // namespace rpg
