#include "rpg/costs.hpp"

#include "rpg/errors.hpp"
#include "rpg/gaussian_hinge.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace rpg {

namespace {

void check_shapes(const LearnerParams& learner, const AttackerParams& attacker,
                  const GameSpec& game) {
  const GameLayout lay = game.layout();
  if (learner.k() != lay.k || attacker.k() != lay.k || attacker.n() != lay.n) {
    throw ShapeError("strategy shapes (k=" + std::to_string(learner.k()) + ", n=" +
                     std::to_string(attacker.n()) + ") do not match the game (k=" +
                     std::to_string(lay.k) + ", n=" + std::to_string(lay.n) + ")");
  }
}

}  // namespace

double learner_regularizer(const LearnerParams& learner, const GameSpec& game) {
  const double mb = learner.mu_bias();
  const double sb = learner.sigma_bias();
  return 0.5 * game.rho_l *
             (learner.mu_weights().squaredNorm() + learner.sigma_weights().squaredNorm()) +
         0.5 * game.bias_eps * (mb * mb + sb * sb);
}

double learner_cost(const LearnerParams& learner, const AttackerParams& attacker,
                    const GameSpec& game) {
  check_shapes(learner, attacker, game);
  double loss = 0.0;
  for (Index i = 0; i < attacker.n(); ++i) {
    const MarginMoments m = margin_moments(Side::learner, game.dataset.y(i), learner,
                                           attacker.mu_x.row(i).transpose(),
                                           attacker.sigma_x.row(i).transpose());
    loss += hinge_expect(m.mu, m.sigma());
  }
  return learner_regularizer(learner, game) + loss;
}

LearnerGradient learner_grad(const LearnerParams& learner, const AttackerParams& attacker,
                             const GameSpec& game) {
  check_shapes(learner, attacker, game);
  const Index k = learner.k();
  LearnerGradient g{Vec::Zero(k + 1), Vec::Zero(k + 1)};
  g.d_mu_w.head(k) = game.rho_l * learner.mu_weights();
  g.d_mu_w(k) = game.bias_eps * learner.mu_bias();
  g.d_sigma_w.head(k) = game.rho_l * learner.sigma_weights();
  g.d_sigma_w(k) = game.bias_eps * learner.sigma_bias();

  const Vec mu_w = learner.mu_weights();
  for (Index i = 0; i < attacker.n(); ++i) {
    const double y = game.dataset.y(i);
    const Vec mx = attacker.mu_x.row(i).transpose();
    const Vec sx2 = attacker.sigma_x.row(i).transpose().array().square();
    const MarginMoments m = margin_moments(Side::learner, y, learner, mx, attacker.sigma_x.row(i).transpose());
    const double s = m.sigma();
    const double dmu = hinge_expect_dmu(m.mu, s);
    const double dvar = hinge_expect_dvar(m.mu, s);

    // d mu_s / d mu_w = -y [mu_x; 1];  d var / d mu_w = [2 sigma_x^2 o mu_w~; 0]
    g.d_mu_w.head(k) += -dmu * y * mx + dvar * 2.0 * sx2.cwiseProduct(mu_w);
    g.d_mu_w(k) += -dmu * y;
    // d var / d sigma_w = 2 sigma_w o [sigma_x^2 + mu_x^2; 1]
    g.d_sigma_w.head(k) +=
        dvar * 2.0 * learner.sigma_weights().cwiseProduct(sx2 + mx.array().square().matrix());
    g.d_sigma_w(k) += dvar * 2.0 * learner.sigma_bias();
  }
  return g;
}

double attacker_regularizer(const AttackerParams& attacker, const GameSpec& game) {
  const Mat& xh = game.dataset.features();
  double total = 0.0;
  for (Index i = 0; i < attacker.n(); ++i) {
    total += 0.5 * game.rho_d *
             ((attacker.mu_x.row(i) - xh.row(i)).squaredNorm() + attacker.sigma_x.row(i).squaredNorm());
  }
  return total;
}

double attacker_cost(const LearnerParams& learner, const AttackerParams& attacker,
                     const GameSpec& game) {
  check_shapes(learner, attacker, game);
  const Mat& xh = game.dataset.features();
  double total = 0.0;
  for (Index i = 0; i < attacker.n(); ++i) {
    const MarginMoments m = margin_moments(Side::attacker, game.dataset.y(i), learner,
                                           attacker.mu_x.row(i).transpose(),
                                           attacker.sigma_x.row(i).transpose());
    total += 0.5 * game.rho_d *
                 ((attacker.mu_x.row(i) - xh.row(i)).squaredNorm() +
                  attacker.sigma_x.row(i).squaredNorm()) +
             hinge_expect(m.mu, m.sigma());
  }
  return total;
}

AttackerGradient attacker_grad(const LearnerParams& learner, const AttackerParams& attacker,
                               const GameSpec& game) {
  check_shapes(learner, attacker, game);
  const Index n = attacker.n();
  const Index k = attacker.k();
  const Mat& xh = game.dataset.features();
  AttackerGradient g{Mat(n, k), Mat(n, k)};

  const Vec mu_w = learner.mu_weights();
  const Vec sw2 = learner.sigma_weights().array().square();
  const Vec w_second = sw2 + mu_w.cwiseProduct(mu_w);
  for (Index i = 0; i < n; ++i) {
    const double y = game.dataset.y(i);
    const Vec mx = attacker.mu_x.row(i).transpose();
    const Vec sx = attacker.sigma_x.row(i).transpose();
    const MarginMoments m = margin_moments(Side::attacker, y, learner, mx, sx);
    const double s = m.sigma();
    const double dmu = hinge_expect_dmu(m.mu, s);
    const double dvar = hinge_expect_dvar(m.mu, s);

    g.d_mu_x.row(i) = (game.rho_d * (mx - xh.row(i).transpose()) + dmu * y * mu_w +
                       dvar * 2.0 * sw2.cwiseProduct(mx))
                          .transpose();
    g.d_sigma_x.row(i) = (game.rho_d * sx + dvar * 2.0 * sx.cwiseProduct(w_second)).transpose();
  }
  return g;
}

PlayerWeights svm_weights(const GameSpec& game) { return {1.0, game.rho_l / game.rho_d}; }

PseudoGradient pseudo_gradient(const LearnerParams& learner, const AttackerParams& attacker,
                               const GameSpec& game) {
  const PlayerWeights r = svm_weights(game);
  const LearnerGradient gl = learner_grad(learner, attacker, game);
  const AttackerGradient gd = attacker_grad(learner, attacker, game);
  Vec gl_flat(2 * gl.d_mu_w.size());
  gl_flat << gl.d_mu_w, gl.d_sigma_w;
  const Vec gd_flat = flatten_sample_blocks(gd.d_mu_x, gd.d_sigma_x);
  return {r.learner * gl_flat, r.attacker * gd_flat, r};
}

SvmGame::SvmGame(GameSpec spec) : spec_(std::move(spec)), box_(spec_.joint_box()) {}

double SvmGame::learner_cost(const Vec& theta) const {
  const auto [l, d] = unflatten(theta, layout());
  return rpg::learner_cost(l, d, spec_);
}

double SvmGame::attacker_cost(const Vec& theta) const {
  const auto [l, d] = unflatten(theta, layout());
  return rpg::attacker_cost(l, d, spec_);
}

Vec SvmGame::learner_gradient(const Vec& theta) const {
  const auto [l, d] = unflatten(theta, layout());
  const LearnerGradient g = learner_grad(l, d, spec_);
  Vec out(learner_dim());
  out << g.d_mu_w, g.d_sigma_w;
  return out;
}

Vec SvmGame::attacker_gradient(const Vec& theta) const {
  const auto [l, d] = unflatten(theta, layout());
  const AttackerGradient g = attacker_grad(l, d, spec_);
  return flatten_sample_blocks(g.d_mu_x, g.d_sigma_x);
}

Mat SvmGame::learner_regularizer_hessian() const {
  // Omega_l = (1/2)(|mu_w~|^2 + |sigma_w~|^2) + (eps / (2 rho_l))(mu_b^2 + sigma_b^2)
  const Index k = layout().k;
  Vec diag = Vec::Ones(learner_dim());
  diag(k) = spec_.bias_eps / spec_.rho_l;
  diag(2 * k + 1) = spec_.bias_eps / spec_.rho_l;
  return diag.asDiagonal();
}

Mat SvmGame::attacker_regularizer_hessian() const {
  return Mat::Identity(attacker_dim(), attacker_dim());
}

Vec SvmGame::initial_point(std::uint64_t seed) const {
  Vec theta = uniform_in_box(box_, seed);
  const Index m = layout().k + 1;
  theta.head(m) *= 0.1;
  return project_box(theta, box_);
}

double svm_objective(const Dataset& data, double C, const Vec& w, double b) {
  if (w.size() != data.k()) throw ShapeError("weight vector does not match the dataset");
  const Vec margins = (1.0 - (data.labels().array() * ((data.features() * w).array() + b)))
                          .cwiseMax(0.0);
  double hinge = 0.0;
  for (Index i = 0; i < margins.size(); ++i) hinge += margins(i);
  return 0.5 / C * w.squaredNorm() + hinge;
}

BaselineSvm train_baseline_svm(const Dataset& data, double C, const BaselineOptions& opts) {
  if (!(C > 0.0)) throw DomainError("C must be > 0");
  if (!data.features().allFinite()) throw NumericError("non-finite training data");
  const Index n = data.n();
  const Index k = data.k();
  const Mat& X = data.features();
  const Vec& y = data.labels();
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  BaselineSvm best;
  best.objective = std::numeric_limits<double>::infinity();
  for (int run = 0; run < std::max(1, opts.restarts); ++run) {
    Vec w = Vec::Zero(k);
    double b = 0.0;
    if (run > 0) {
      for (Index j = 0; j < k; ++j) w(j) = unit(rng);
      b = unit(rng);
    }
    for (int t = 0; t <= opts.steps; ++t) {
      const double obj = svm_objective(data, C, w, b);
      if (obj < best.objective) best = {w, b, obj};
      if (t == opts.steps) break;
      // Subgradient of objective / n; a margin of exactly 1 contributes 0.
      const Vec margins = 1.0 - (y.array() * ((X * w).array() + b));
      Vec gw = w / (C * static_cast<double>(n));
      double gb = 0.0;
      for (Index i = 0; i < n; ++i) {
        if (margins(i) > 0.0) {
          gw -= (y(i) / static_cast<double>(n)) * X.row(i).transpose();
          gb -= y(i) / static_cast<double>(n);
        }
      }
      const double eta = opts.step_size / std::sqrt(static_cast<double>(t) + 1.0);
      w -= eta * gw;
      b -= eta * gb;
    }
  }
  return best;
}

LearnerParams as_learner_params(const BaselineSvm& svm) {
  const Index k = svm.w.size();
  Vec mu(k + 1);
  mu << svm.w, svm.b;
  return LearnerParams(std::move(mu), Vec::Constant(k + 1, bounds::learner_sigma_lower));
}

}  // namespace rpg
