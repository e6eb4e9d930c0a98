#pragma once

#include "rpg/game.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace rpg {

/// Contiguous coordinate range [offset, offset + size) of the flattened vector.
struct Block {
  Index offset = 0;
  Index size = 0;
};

/// Per-coordinate finite-difference step h_j = base * (1 + |theta_j|).
double fd_step(double theta_j, double base = 1e-4);

/// Central-difference block of second derivatives d^2 f / (d theta_rows d theta_cols):
///   H_ij = [f(+i,+j) - f(+i,-j) - f(-i,+j) + f(-i,-j)] / (4 h_i h_j).
/// With a box, every perturbed coordinate must stay at least 2 h inside it (BoundaryError).
Mat fd_hessian_block(const std::function<double(const Vec&)>& f, const Vec& theta, Block rows,
                     Block cols, double h_base = 1e-4, const ParamBox* box = nullptr);

enum class JacobianMethod {
  // Central differences of the analytic own-block gradients: 2 * dim gradient evaluations.
  gradient_differences,
  // Second differences of the costs through fd_hessian_block: 4 cost evaluations per entry.
  cost_differences,
};

/// Pseudo-Jacobian J_r = [[r_l d2c_l/dl dl, r_l d2c_l/dl dd], [r_d d2c_d/dd dl, r_d d2c_d/dd dd]].
Mat pseudo_jacobian(const Game& game, const Vec& theta, PlayerWeights r,
                    JacobianMethod method = JacobianMethod::gradient_differences,
                    double h_base = 1e-4);

/// Smallest eigenvalue of the symmetric part (J + J') / 2.
double symmetric_min_eig(const Mat& J);

double pseudo_jacobian_min_eig(const Game& game, const Vec& theta, PlayerWeights r,
                               JacobianMethod method = JacobianMethod::gradient_differences,
                               double h_base = 1e-4);

/// Uniform draw from the box shrunk by 2 h (+1%) per coordinate, so finite-difference stencils
/// around the draw stay feasible.
Vec sample_interior(const ParamBox& box, std::uint64_t seed, double h_base = 1e-4);

struct MonotonicityCount {
  int strict_violations = 0;  // [g(a) - g(b)]'(a - b) < 0 beyond rounding
  int equality_cases = 0;     // zero up to rounding
  int pairs = 0;
};

/// Checks [g_r(a) - g_r(b)]'(a - b) > 0 on uniform pairs from the box.
MonotonicityCount monotonicity_sample(const Game& game, int n_pairs, std::uint64_t seed);

struct ProfileEig {
  std::uint64_t seed = 0;
  double min_eig = 0.0;
};

/// Lemma-type uniqueness diagnostics. The lambda_L and tau entries are sampled extrema over
/// the profiles, not global bounds.
struct DiagnosticsReport {
  double rho_l = 0.0;
  double rho_d = 0.0;
  double lambda_omega_l = 0.0;  // min eig of the learner's expected-regularizer Hessian
  double lambda_omega_d = 0.0;
  double lambda_L_l = 0.0;  // sampled inf of min eig of d2 L_l / d theta_l^2
  double lambda_L_d = 0.0;
  double tau_estimate = 0.0;  // sampled sup of lambda_max(R R')
  double uniqueness_margin = 0.0;
  std::vector<ProfileEig> min_jacobian_eig;  // per profile, with the game's weights r
  int monotone_violations = 0;
  int monotone_equalities = 0;
  int monotone_pairs = 0;

  double worst_jacobian_eig() const;
  /// margin > 0 with strongly convex regularizers, a positive definite pseudo-Jacobian at every
  /// profile and no monotonicity violation. Holds on the sample only.
  bool certified() const;
};

struct DiagnosticsOptions {
  int n_pairs = 200;
  double h_base = 1e-4;
  JacobianMethod method = JacobianMethod::gradient_differences;
};

/// Estimates the quantities of the uniqueness condition
///   (rho_l lambda^Omega_l + lambda^L_l)(rho_d lambda^Omega_d + lambda^L_d) > tau,
/// with R = (1/2)(d2L_l/dl dd' + d2L_d/dd dl) and r = (1, 1), over `n_profiles` interior draws
/// seeded seed, seed + 1, ...
DiagnosticsReport uniqueness_margin(const Game& game, int n_profiles, std::uint64_t seed,
                                    const DiagnosticsOptions& opts = {});

/// key = value lines.
std::string report_text(const DiagnosticsReport& report);
/// profile_seed,min_eig rows.
std::string report_csv(const DiagnosticsReport& report);

}  // namespace rpg
