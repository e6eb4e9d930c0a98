#pragma once

#include "rpg/game_model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rpg {

enum class AttackMode { l2_closed_form, l2_box_pgd, binary_flip };

std::string to_string(AttackMode mode);
AttackMode attack_mode_from_string(std::string_view name);

struct AttackSpec {
  double d_max = 0.0;
  AttackMode mode = AttackMode::l2_box_pgd;
  // Features may only grow (x >= x_hat), e.g. content can be added to a document but not removed.
  bool monotone_increase_only = false;
  // Missing bounds mean an unbounded feature space.
  std::optional<Vec> box_lower;
  std::optional<Vec> box_upper;

  /// Throws DomainError on a negative or non-integer (flip mode) budget or a malformed box.
  void validate(Index k) const;
};

/// The feature box of a dataset: [0, 1] for unit-interval and binary data, none otherwise.
AttackSpec with_dataset_box(AttackSpec spec, const Dataset& data);

struct ClosedFormAttack {
  Vec x;
  bool zero_weight = false;  // w = 0: nothing to gain, x_hat returned unchanged
};

/// x* = x_hat - y d_max w / |w|, the minimizer of y f(x) on the d_max-sphere around x_hat.
ClosedFormAttack attack_l2_closed(const Vec& w, const Vec& x_hat, double y, double d_max);

/// Euclidean projection onto {x in [lo, hi] : |x - center| <= radius}. Requires the center in
/// the box. Uses x(lambda) = clamp(center + (z - center) / (1 + lambda)) with lambda found by
/// bisection, which is exact because the Lagrangian separates over coordinates.
Vec project_box_ball(const Vec& z, const Vec& center, double radius, const Vec& lo, const Vec& hi);

/// argmin of direction' x over the box intersected with the ball: x(mu) = clamp(center - mu
/// direction) for the largest feasible mu, found by bisection.
Vec linear_min_box_ball(const Vec& direction, const Vec& center, double radius, const Vec& lo,
                        const Vec& hi);

/// Projected gradient descent on y f(x) over the ball, the box and optionally x >= x_hat:
/// 200 steps of length d_max / 50 along the normalized gradient. Returns the best of the
/// iterates and the exact minimizer from linear_min_box_ball.
Vec attack_l2_box(const Vec& w, double b, const Vec& x_hat, double y, double d_max,
                  const AttackSpec& spec);

/// Flips at most d_max binary features in order of decreasing |w_k| (ties by index), skipping
/// flips that would not decrease y f.
Vec attack_flip_binary(const Vec& w, const Vec& x_hat, double y, int d_max);

/// Attacks one sample against the expected decision function of `classifier`.
Vec attack_sample(const LearnerParams& classifier, const Vec& x_hat, double y,
                  const AttackSpec& spec);

/// Copy of `data` with every malicious (+1) sample attacked; legitimate samples are unchanged.
Dataset attack_dataset(const LearnerParams& classifier, const Dataset& data, const AttackSpec& spec);

/// mu_w~' x + mu_b for every row of `x`.
Vec expected_scores(const LearnerParams& classifier, const Mat& x);

struct Prediction {
  double score = 0.0;
  double positive_fraction = 0.0;  // share of draws with score > 0 (expected mode: 0 or 1)
  double score_se = 0.0;
};

Prediction predict_expected(const LearnerParams& classifier, const Vec& x);

/// Draws n_draws weight vectors from N(mu_w, diag(sigma_w^2)), bias included.
Prediction predict_sampled(const LearnerParams& classifier, const Vec& x, int n_draws,
                           std::uint64_t seed);

struct TpAtFp {
  double threshold = 0.0;
  double tp_rate = 0.0;
  double fp_rate = 0.0;
};

/// Detection rule score >= threshold. Candidates are -inf and the successors (nextafter) of the
/// distinct legitimate scores; the smallest candidate with FP <= fp_target is returned. It is
/// the smallest threshold meeting the FP bound and so maximizes TP.
TpAtFp tp_at_fp(const std::vector<double>& legit, const std::vector<double>& malicious,
                double fp_target);

struct CurvePoint {
  double d_max = 0.0;
  double tp_mean = 0.0;
  double tp_std = 0.0;
};

struct SecurityCurve {
  std::vector<CurvePoint> points;
  double fp_target = 0.01;
  int repetitions = 1;
  std::uint64_t seed = 0;

  /// Trapezoid rule over d_max.
  double auc() const;
};

/// For each repetition the test set is dealt, class by class after a seeded shuffle, into
/// `repetitions` disjoint folds; TP at fp_target is measured per fold and d_max.
SecurityCurve security_curve(const LearnerParams& classifier, const Dataset& test,
                             const AttackSpec& attack, const std::vector<double>& d_max_list,
                             int repetitions, std::uint64_t seed, double fp_target = 0.01);

/// Columns d_max,tp_mean,tp_std,fp_target,repetitions,seed.
std::string curve_csv(const SecurityCurve& curve);
SecurityCurve parse_curve_csv(std::string_view text);

}  // namespace rpg
