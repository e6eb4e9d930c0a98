#include "rpg/diagnostics.hpp"

#include "rpg/errors.hpp"
#include "rpg/serialization.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace rpg {

double fd_step(double theta_j, double base) { return base * (1.0 + std::abs(theta_j)); }

namespace {

void check_block(Block b, Index dim, const char* what) {
  if (b.offset < 0 || b.size < 1 || b.offset + b.size > dim) {
    throw ShapeError(std::string(what) + " block [" + std::to_string(b.offset) + ", " +
                     std::to_string(b.offset + b.size) + ") outside a vector of length " +
                     std::to_string(dim));
  }
}

void check_stencil(const Vec& theta, Block b, double h_base, const ParamBox* box) {
  if (!box) return;
  for (Index j = b.offset; j < b.offset + b.size; ++j) {
    const double reach = 2.0 * fd_step(theta(j), h_base);
    if (theta(j) - reach < box->lower(j) || theta(j) + reach > box->upper(j)) {
      throw BoundaryError("coordinate " + std::to_string(j) + " = " + format_double(theta(j)) +
                          " is within 2h of the box [" + format_double(box->lower(j)) + ", " +
                          format_double(box->upper(j)) + "]");
    }
  }
}

Mat symmetric_part(const Mat& J) { return 0.5 * (J + J.transpose()); }

double min_eig_symmetric(const Mat& S) {
  Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("eigenvalue computation failed");
  return es.eigenvalues()(0);
}

double max_eig_symmetric(const Mat& S) {
  Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("eigenvalue computation failed");
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

Vec stacked_own_gradients(const Game& game, const Vec& theta) {
  Vec g(game.dim());
  g << game.learner_gradient(theta), game.attacker_gradient(theta);
  return g;
}

// Unweighted pseudo-Jacobian (r = (1, 1)).
Mat raw_jacobian(const Game& game, const Vec& theta, JacobianMethod method, double h_base) {
  const Index dim = game.dim();
  if (theta.size() != dim) throw ShapeError("theta does not match the game");
  const Index ld = game.learner_dim();
  const Index ad = game.attacker_dim();
  const ParamBox& box = game.box();
  Mat J(dim, dim);
  if (method == JacobianMethod::gradient_differences) {
    check_stencil(theta, {0, dim}, h_base, &box);
    Vec plus = theta, minus = theta;
    for (Index j = 0; j < dim; ++j) {
      const double h = fd_step(theta(j), h_base);
      plus(j) = theta(j) + h;
      minus(j) = theta(j) - h;
      J.col(j) = (stacked_own_gradients(game, plus) - stacked_own_gradients(game, minus)) / (2.0 * h);
      plus(j) = theta(j);
      minus(j) = theta(j);
    }
    return J;
  }
  auto cl = [&](const Vec& t) { return game.learner_cost(t); };
  auto cd = [&](const Vec& t) { return game.attacker_cost(t); };
  const Block L{0, ld}, D{ld, ad};
  J.topLeftCorner(ld, ld) = fd_hessian_block(cl, theta, L, L, h_base, &box);
  J.topRightCorner(ld, ad) = fd_hessian_block(cl, theta, L, D, h_base, &box);
  J.bottomLeftCorner(ad, ld) = fd_hessian_block(cd, theta, D, L, h_base, &box);
  J.bottomRightCorner(ad, ad) = fd_hessian_block(cd, theta, D, D, h_base, &box);
  return J;
}

Mat apply_weights(Mat J, Index ld, PlayerWeights r) {
  J.topRows(ld) *= r.learner;
  J.bottomRows(J.rows() - ld) *= r.attacker;
  return J;
}

}  // namespace

Mat fd_hessian_block(const std::function<double(const Vec&)>& f, const Vec& theta, Block rows,
                     Block cols, double h_base, const ParamBox* box) {
  check_block(rows, theta.size(), "row");
  check_block(cols, theta.size(), "column");
  if (!(h_base > 0.0)) throw DomainError("finite-difference step must be > 0");
  if (box && box->dim() != theta.size()) throw ShapeError("box does not match theta");
  check_stencil(theta, rows, h_base, box);
  check_stencil(theta, cols, h_base, box);

  Mat H(rows.size, cols.size);
  Vec t = theta;
  for (Index a = 0; a < rows.size; ++a) {
    const Index i = rows.offset + a;
    const double hi = fd_step(theta(i), h_base);
    for (Index b = 0; b < cols.size; ++b) {
      const Index j = cols.offset + b;
      const double hj = fd_step(theta(j), h_base);
      auto eval = [&](double si, double sj) {
        t(i) += si * hi;
        t(j) += sj * hj;
        const double v = f(t);
        t(i) = theta(i);
        t(j) = theta(j);
        return v;
      };
      H(a, b) = (eval(1, 1) - eval(1, -1) - eval(-1, 1) + eval(-1, -1)) / (4.0 * hi * hj);
    }
  }
  return H;
}

Mat pseudo_jacobian(const Game& game, const Vec& theta, PlayerWeights r, JacobianMethod method,
                    double h_base) {
  return apply_weights(raw_jacobian(game, theta, method, h_base), game.learner_dim(), r);
}

double symmetric_min_eig(const Mat& J) {
  if (J.rows() != J.cols()) throw ShapeError("matrix is not square");
  return min_eig_symmetric(symmetric_part(J));
}

double pseudo_jacobian_min_eig(const Game& game, const Vec& theta, PlayerWeights r,
                               JacobianMethod method, double h_base) {
  return symmetric_min_eig(pseudo_jacobian(game, theta, r, method, h_base));
}

Vec sample_interior(const ParamBox& box, std::uint64_t seed, double h_base) {
  Vec lo(box.dim()), hi(box.dim());
  for (Index j = 0; j < box.dim(); ++j) {
    const double mag = std::max(std::abs(box.lower(j)), std::abs(box.upper(j)));
    const double margin = 2.02 * fd_step(mag, h_base);
    lo(j) = box.lower(j) + margin;
    hi(j) = box.upper(j) - margin;
    if (lo(j) > hi(j)) {
      throw BoundaryError("box coordinate " + std::to_string(j) +
                          " is too narrow for finite-difference stencils");
    }
  }
  return uniform_in_box(ParamBox(lo, hi), seed);
}

MonotonicityCount monotonicity_sample(const Game& game, int n_pairs, std::uint64_t seed) {
  if (n_pairs < 1) throw DomainError("n_pairs must be >= 1");
  MonotonicityCount out;
  std::mt19937_64 rng(seed);
  const ParamBox& box = game.box();
  auto draw = [&] {
    Vec v(box.dim());
    for (Index j = 0; j < v.size(); ++j) {
      v(j) = std::uniform_real_distribution<double>(box.lower(j), box.upper(j))(rng);
    }
    return v;
  };
  for (int p = 0; p < n_pairs; ++p) {
    const Vec a = draw();
    const Vec b = draw();
    const Vec dg = pseudo_gradient(game, a).stacked() - pseudo_gradient(game, b).stacked();
    const Vec dt = a - b;
    const double v = dg.dot(dt);
    const double tol = 1e-12 * dg.norm() * dt.norm();
    if (std::abs(v) <= tol) {
      ++out.equality_cases;
    } else if (v < 0.0) {
      ++out.strict_violations;
    }
    ++out.pairs;
  }
  return out;
}

double DiagnosticsReport::worst_jacobian_eig() const {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& p : min_jacobian_eig) worst = std::min(worst, p.min_eig);
  return worst;
}

bool DiagnosticsReport::certified() const {
  return uniqueness_margin > 0.0 && lambda_omega_l > 0.0 && lambda_omega_d > 0.0 &&
         !min_jacobian_eig.empty() && worst_jacobian_eig() > 0.0 && monotone_violations == 0;
}

DiagnosticsReport uniqueness_margin(const Game& game, int n_profiles, std::uint64_t seed,
                                    const DiagnosticsOptions& opts) {
  if (n_profiles < 1) throw DomainError("n_profiles must be >= 1");
  const Index ld = game.learner_dim();
  const Index ad = game.attacker_dim();
  DiagnosticsReport rep;
  rep.rho_l = game.rho_learner();
  rep.rho_d = game.rho_attacker();
  const Mat Hl = game.learner_regularizer_hessian();
  const Mat Hd = game.attacker_regularizer_hessian();
  rep.lambda_omega_l = min_eig_symmetric(symmetric_part(Hl));
  rep.lambda_omega_d = min_eig_symmetric(symmetric_part(Hd));
  rep.lambda_L_l = std::numeric_limits<double>::infinity();
  rep.lambda_L_d = std::numeric_limits<double>::infinity();
  rep.tau_estimate = 0.0;

  const PlayerWeights r = game.weights();
  for (int p = 0; p < n_profiles; ++p) {
    const std::uint64_t profile_seed = seed + static_cast<std::uint64_t>(p);
    const Vec theta = sample_interior(game.box(), profile_seed, opts.h_base);
    const Mat J = raw_jacobian(game, theta, opts.method, opts.h_base);
    // Loss Hessians: remove the constant rho * Omega curvature from the own blocks.
    const Mat Ll = J.topLeftCorner(ld, ld) - rep.rho_l * Hl;
    const Mat Ld = J.bottomRightCorner(ad, ad) - rep.rho_d * Hd;
    rep.lambda_L_l = std::min(rep.lambda_L_l, min_eig_symmetric(symmetric_part(Ll)));
    rep.lambda_L_d = std::min(rep.lambda_L_d, min_eig_symmetric(symmetric_part(Ld)));
    // R = (1/2)(d2L_l/dl dd ' + d2L_d/dd dl); the regularizers have no cross terms.
    const Mat R = 0.5 * (J.topRightCorner(ld, ad).transpose() + J.bottomLeftCorner(ad, ld));
    // lambda_max(R R') = lambda_max(R' R); the latter is only ld x ld.
    rep.tau_estimate = std::max(rep.tau_estimate, max_eig_symmetric(R.transpose() * R));
    rep.min_jacobian_eig.push_back({profile_seed, symmetric_min_eig(apply_weights(J, ld, r))});
  }
  rep.uniqueness_margin = (rep.rho_l * rep.lambda_omega_l + rep.lambda_L_l) *
                              (rep.rho_d * rep.lambda_omega_d + rep.lambda_L_d) -
                          rep.tau_estimate;
  const MonotonicityCount mono = monotonicity_sample(game, opts.n_pairs, seed);
  rep.monotone_violations = mono.strict_violations;
  rep.monotone_equalities = mono.equality_cases;
  rep.monotone_pairs = mono.pairs;
  return rep;
}

std::string report_text(const DiagnosticsReport& r) {
  std::string out;
  auto kv = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  kv("rho_l", format_double(r.rho_l));
  kv("rho_d", format_double(r.rho_d));
  kv("lambda_omega_l", format_double(r.lambda_omega_l));
  kv("lambda_omega_d", format_double(r.lambda_omega_d));
  kv("lambda_L_l_sampled", format_double(r.lambda_L_l));
  kv("lambda_L_d_sampled", format_double(r.lambda_L_d));
  kv("tau_sampled", format_double(r.tau_estimate));
  kv("uniqueness_margin", format_double(r.uniqueness_margin));
  kv("profiles", std::to_string(r.min_jacobian_eig.size()));
  kv("min_jacobian_eig_sampled", format_double(r.worst_jacobian_eig()));
  kv("monotone_pairs", std::to_string(r.monotone_pairs));
  kv("monotone_violations", std::to_string(r.monotone_violations));
  kv("monotone_equalities", std::to_string(r.monotone_equalities));
  kv("certified_on_sample", r.certified() ? "true" : "false");
  return out;
}

std::string report_csv(const DiagnosticsReport& r) {
  std::string out = "profile_seed,min_eig\n";
  for (const auto& p : r.min_jacobian_eig) {
    out += std::to_string(p.seed) + "," + format_double(p.min_eig) + "\n";
  }
  return out;
}

}  // namespace rpg
