#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace rpg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

enum class FeatureKind {
  continuous_unit_interval,
  binary,
  // Raw values as read from disk, before normalize_unit_interval.
  unbounded,
};

std::string to_string(FeatureKind kind);

/// Labelled training/test samples. Rows of `features` are samples, labels are +1 (malicious)
/// or -1 (legitimate).
class Dataset {
 public:
  Dataset(Mat features, Vec labels, FeatureKind kind);

  Index n() const noexcept { return features_.rows(); }
  Index k() const noexcept { return features_.cols(); }
  const Mat& features() const noexcept { return features_; }
  const Vec& labels() const noexcept { return labels_; }
  FeatureKind kind() const noexcept { return kind_; }

  auto x(Index i) const { return features_.row(i).transpose(); }
  double y(Index i) const { return labels_(i); }

  Index count_label(double label) const;

  /// Rows selected by `indices`, in the given order.
  Dataset subset(const std::vector<Index>& indices) const;

 private:
  Mat features_;
  Vec labels_;
  FeatureKind kind_;
};

/// Learner strategy: axis-aligned Gaussian over w = [w~; b]. Both vectors have length k + 1
/// with the bias in the last coordinate; sigma holds standard deviations.
struct LearnerParams {
  Vec mu_w;
  Vec sigma_w;

  LearnerParams(Vec mu, Vec sigma);

  Index k() const noexcept { return mu_w.size() - 1; }
  auto mu_weights() const { return mu_w.head(k()); }
  auto sigma_weights() const { return sigma_w.head(k()); }
  double mu_bias() const { return mu_w(k()); }
  double sigma_bias() const { return sigma_w(k()); }
};

/// Attacker strategy: one axis-aligned Gaussian per training sample. Row i of `mu_x` and
/// `sigma_x` parametrizes sample i.
struct AttackerParams {
  Mat mu_x;
  Mat sigma_x;

  AttackerParams(Mat mu, Mat sigma);

  Index n() const noexcept { return mu_x.rows(); }
  Index k() const noexcept { return mu_x.cols(); }
};

/// Axis-aligned box over a flattened parameter vector.
struct ParamBox {
  Vec lower;
  Vec upper;

  ParamBox(Vec lo, Vec hi);

  Index dim() const noexcept { return lower.size(); }
  bool contains(const Vec& v, double tol = 0.0) const;
};

/// Flattened layout: [mu_w; sigma_w; mu_x_1; sigma_x_1; ...; mu_x_n; sigma_x_n].
struct GameLayout {
  Index k = 0;
  Index n = 0;

  Index learner_dim() const noexcept { return 2 * (k + 1); }
  Index attacker_dim() const noexcept { return 2 * n * k; }
  Index dim() const noexcept { return learner_dim() + attacker_dim(); }
  Index sample_offset(Index i) const noexcept { return learner_dim() + 2 * k * i; }
};

Vec flatten(const LearnerParams& learner, const AttackerParams& attacker);
Vec flatten_learner(const LearnerParams& learner);
Vec flatten_attacker(const AttackerParams& attacker);
// Interleaves rows as [a_1; b_1; a_2; b_2; ...]; no validation (used for gradients too).
Vec flatten_sample_blocks(const Mat& a, const Mat& b);
LearnerParams unflatten_learner(const Vec& v, Index k);
AttackerParams unflatten_attacker(const Vec& v, Index k, Index n);
std::pair<LearnerParams, AttackerParams> unflatten(const Vec& v, const GameLayout& layout);

/// Euclidean projection onto the box (coordinate-wise clamp).
Vec project_box(const Vec& v, const ParamBox& box);

namespace bounds {
inline constexpr double learner_sigma_lower = 1e-6;
inline constexpr double learner_sigma_upper = 1e-3;
inline constexpr double attacker_mean_lower = 0.0;
inline constexpr double attacker_mean_upper = 1.0;
inline constexpr double attacker_sigma_lower = 1e-3;
inline constexpr double attacker_sigma_upper = 0.5;
}  // namespace bounds

/// Boxes used in the experiments: learner means in [-W, W], learner deviations in
/// [1e-6, 1e-3]; attacker means in [0, 1], attacker deviations in [1e-3, 0.5].
std::pair<ParamBox, ParamBox> default_boxes(Index k, Index n, double W);

/// Overrides the attacker box of one sample.
void set_sample_box(ParamBox& attacker_box, Index k, Index sample, double mean_lo,
                    double mean_hi, double sigma_lo, double sigma_hi);

/// A full game instance.
struct GameSpec {
  Dataset dataset;
  double rho_l;
  double rho_d;
  ParamBox learner_box;
  ParamBox attacker_box;
  // Optional (eps/2) b^2 penalty on the learner bias; 0 keeps the plain C-SVM objective.
  double bias_eps = 0.0;

  GameSpec(Dataset data, double rho_l, double rho_d, ParamBox learner_box,
           ParamBox attacker_box, double bias_eps = 0.0);

  GameLayout layout() const noexcept { return {dataset.k(), dataset.n()}; }
  ParamBox joint_box() const;
};

GameSpec make_game(Dataset data, double rho_l, double rho_d, double W, double bias_eps = 0.0);

}  // namespace rpg
