#pragma once

#include "rpg/game.hpp"
#include "rpg/gaussian_hinge.hpp"

#include <string>

namespace rpg {

class Config;

struct Kernel {
  enum class Kind { linear, rbf };
  Kind kind = Kind::linear;
  double gamma = 1.0;  // rbf only: k(x, x') = exp(-gamma |x - x'|^2)

  static Kernel linear() { return {Kind::linear, 1.0}; }
  static Kernel rbf(double gamma);
  double operator()(const Eigen::Ref<const Vec>& a, const Eigen::Ref<const Vec>& b) const;
};

std::string to_string(const Kernel& kernel);

/// Reads `kernel = linear|rbf` and `gamma` (defaults: linear, gamma 1).
Kernel kernel_from_config(const Config& cfg);

/// Kernel matrix between the rows of `a` and the rows of `b`.
Mat kernel_matrix(const Mat& a, const Mat& b, const Kernel& kernel);

/// Gram matrix K_jk = k(x_j, x_k) of the training samples.
Mat gram(const Dataset& data, const Kernel& kernel);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Mat& symmetric);

std::string gram_csv(const Mat& K);
void save_gram(const std::string& path, const Mat& K);

/// Dual strategies. The learner expands w = sum_j alpha_j phi(x_j) plus an explicit bias; the
/// attacker moves sample i to sum_j xi_ij phi(x_j). All coefficients are independent Gaussians.
struct DualParams {
  Vec mu_alpha;
  Vec sigma_alpha;
  double mu_b = 0.0;
  double sigma_b = 1.0;
  Mat mu_xi;     // row i: coefficients of the attacked sample i
  Mat sigma_xi;

  DualParams(Vec mu_alpha, Vec sigma_alpha, double mu_b, double sigma_b, Mat mu_xi, Mat sigma_xi);
  Index n() const noexcept { return mu_alpha.size(); }
};

/// Layout of the dual game in the flattened vector: the learner block is
/// [mu_alpha; mu_b; sigma_alpha; sigma_b] and sample i contributes [mu_xi_i; sigma_xi_i], i.e. the
/// primal layout with k = n.
GameLayout dual_layout(Index n);
Vec flatten(const DualParams& p);
DualParams unflatten_dual(const Vec& v, Index n);

/// Moments of s = 1 - y(alpha' K xi + b) (learner side) or t = 1 + y(...) (attacker side):
///   mean = 1 -+ y (mu_alpha' K mu_xi + mu_b)
///   var  = sum_j s_a,j^2 (K mu_xi)_j^2 + sum_k s_xi,k^2 (K' mu_alpha)_k^2
///          + sum_jk s_a,j^2 K_jk^2 s_xi,k^2 + sigma_b^2
MarginMoments dual_margin_moments(Side side, double y, const Eigen::Ref<const Vec>& mu_alpha,
                                  const Eigen::Ref<const Vec>& sigma_alpha, double mu_b,
                                  double sigma_b, const Eigen::Ref<const Vec>& mu_xi,
                                  const Eigen::Ref<const Vec>& sigma_xi, const Mat& K);

/// Default dual boxes: alpha means in [-W, W] and deviations as for the primal learner; xi means in
/// [-1, 2] and xi deviations in [1e-3, 0.5].
std::pair<ParamBox, ParamBox> dual_default_boxes(Index n, double W);

namespace dual_bounds {
inline constexpr double xi_mean_lower = -1.0;
inline constexpr double xi_mean_upper = 2.0;
}  // namespace dual_bounds

struct DualCosts {
  double learner = 0.0;
  double attacker = 0.0;
  Vec learner_gradient;   // learner block of the dual layout
  Vec attacker_gradient;  // attacker block of the dual layout
};

/// The kernelized game. Expected regularizers are E[alpha' K alpha] and
/// E[(xi_i - e_i)' K (xi_i - e_i)] (each halved and scaled by rho), the bias carries the optional
/// (eps/2)(mu_b^2 + sigma_b^2) penalty, and the losses are h of dual_margin_moments.
class KernelGame final : public Game {
 public:
  KernelGame(Dataset data, const Kernel& kernel, double rho_l, double rho_d, double W,
             double bias_eps = 0.0);
  /// Explicit Gram matrix; throws DomainError when K is not (numerically) PSD.
  KernelGame(Dataset data, Mat K, double rho_l, double rho_d, double W, double bias_eps = 0.0);

  const Dataset& dataset() const noexcept { return data_; }
  const Mat& gram_matrix() const noexcept { return K_; }
  Index n() const noexcept { return data_.n(); }
  double bias_eps() const noexcept { return bias_eps_; }

  Index learner_dim() const override { return 2 * (n() + 1); }
  Index attacker_dim() const override { return 2 * n() * n(); }
  const ParamBox& box() const override { return box_; }
  double learner_cost(const Vec& theta) const override;
  double attacker_cost(const Vec& theta) const override;
  Vec learner_gradient(const Vec& theta) const override;
  Vec attacker_gradient(const Vec& theta) const override;
  PlayerWeights weights() const override { return {1.0, rho_l_ / rho_d_}; }
  double rho_learner() const override { return rho_l_; }
  double rho_attacker() const override { return rho_d_; }
  Mat learner_regularizer_hessian() const override;
  Mat attacker_regularizer_hessian() const override;
  /// Learner as for the primal game; every attacker starts at its own sample (xi_i = e_i).
  Vec initial_point(std::uint64_t seed) const override;

  /// Costs and both own-block gradients in one pass.
  DualCosts evaluate(const DualParams& p) const;

  /// Score f(x) = sum_j mu_alpha_j k(x_j, x) + mu_b of the expected classifier on new rows.
  Vec expected_scores(const Vec& theta_learner, const Mat& rows, const Kernel& kernel) const;

 private:
  Dataset data_;
  Mat K_;
  double rho_l_;
  double rho_d_;
  double bias_eps_;
  ParamBox box_;
};

}  // namespace rpg
