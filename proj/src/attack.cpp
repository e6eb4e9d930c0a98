#include "rpg/attack.hpp"

#include "rpg/errors.hpp"
#include "rpg/serialization.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace rpg {

namespace {

constexpr int kPgdSteps = 200;
constexpr double kPgdStepFraction = 1.0 / 50.0;

void check_dims(const Vec& w, const Vec& x, const char* what) {
  if (w.size() != x.size())
    throw ShapeError(std::string(what) + ": weight length " + std::to_string(w.size()) +
                     " vs sample length " + std::to_string(x.size()));
}

void check_label(double y) {
  if (y != 1.0 && y != -1.0) throw DomainError("label must be +1 or -1");
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample standard deviation; 0 for a single value.
double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

template <class T>
bool parse_integer(std::string_view token, T& out) {
  token = trim(token);
  const auto res = std::from_chars(token.data(), token.data() + token.size(), out);
  return !token.empty() && res.ec == std::errc() && res.ptr == token.data() + token.size();
}

}  // namespace

std::string to_string(AttackMode mode) {
  switch (mode) {
    case AttackMode::l2_closed_form: return "l2_closed_form";
    case AttackMode::l2_box_pgd: return "l2_box_pgd";
    case AttackMode::binary_flip: return "binary_flip";
  }
  return "unknown";
}

AttackMode attack_mode_from_string(std::string_view name) {
  if (name == "l2_closed_form" || name == "closed") return AttackMode::l2_closed_form;
  if (name == "l2_box_pgd" || name == "box") return AttackMode::l2_box_pgd;
  if (name == "binary_flip" || name == "flip") return AttackMode::binary_flip;
  throw DomainError("unknown attack mode '" + std::string(name) + "'");
}

void AttackSpec::validate(Index k) const {
  if (!(d_max >= 0.0) || !std::isfinite(d_max)) throw DomainError("d_max must be finite and >= 0");
  if (mode == AttackMode::binary_flip && d_max != std::floor(d_max))
    throw DomainError("binary_flip needs an integer d_max");
  if (box_lower.has_value() != box_upper.has_value())
    throw DomainError("attack box needs both bounds");
  if (box_lower) {
    if (box_lower->size() != k || box_upper->size() != k)
      throw ShapeError("attack box dimension mismatch");
    if (((*box_upper).array() < (*box_lower).array()).any())
      throw DomainError("attack box has lower > upper");
  }
}

AttackSpec with_dataset_box(AttackSpec spec, const Dataset& data) {
  if (data.kind() != FeatureKind::unbounded) {
    spec.box_lower = Vec::Zero(data.k());
    spec.box_upper = Vec::Ones(data.k());
  }
  return spec;
}

ClosedFormAttack attack_l2_closed(const Vec& w, const Vec& x_hat, double y, double d_max) {
  check_dims(w, x_hat, "attack_l2_closed");
  check_label(y);
  if (!(d_max >= 0.0)) throw DomainError("d_max must be >= 0");
  const double norm = w.norm();
  if (norm == 0.0) return {x_hat, true};
  return {x_hat - (y * d_max / norm) * w, false};
}

Vec project_box_ball(const Vec& z, const Vec& center, double radius, const Vec& lo, const Vec& hi) {
  if ((center.array() < lo.array()).any() || (center.array() > hi.array()).any())
    throw DomainError("ball center outside the box");
  auto at = [&](double lambda) -> Vec {
    return (center + (z - center) / (1.0 + lambda)).cwiseMax(lo).cwiseMin(hi);
  };
  Vec x = at(0.0);
  if ((x - center).norm() <= radius) return x;
  if (radius == 0.0) return center;
  // Plain ball projection, exact when it needs no clipping.
  const Vec radial = center + (radius / (z - center).norm()) * (z - center);
  if ((radial.array() >= lo.array()).all() && (radial.array() <= hi.array()).all()) return radial;
  double a = 0.0, b = 1.0;
  while ((at(b) - center).norm() > radius) {
    a = b;
    b *= 2.0;
  }
  for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + b); ++it) {
    const double m = 0.5 * (a + b);
    if ((at(m) - center).norm() > radius)
      a = m;
    else
      b = m;
  }
  return at(b);
}

Vec linear_min_box_ball(const Vec& direction, const Vec& center, double radius, const Vec& lo,
                        const Vec& hi) {
  auto at = [&](double mu) -> Vec { return (center - mu * direction).cwiseMax(lo).cwiseMin(hi); };
  // Coordinates with a nonzero direction saturate at a finite mu.
  double saturate = 0.0;
  for (Index j = 0; j < direction.size(); ++j) {
    if (direction(j) == 0.0) continue;
    const double face = direction(j) > 0 ? center(j) - lo(j) : hi(j) - center(j);
    if (std::isfinite(face)) saturate = std::max(saturate, face / std::abs(direction(j)));
    else saturate = std::numeric_limits<double>::infinity();
  }
  if (std::isfinite(saturate) && (at(saturate) - center).norm() <= radius) return at(saturate);
  double a = 0.0, b = radius / direction.norm();  // |x(b) - center| >= radius here
  while ((at(b) - center).norm() < radius) {
    a = b;
    b *= 2.0;
  }
  for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
    const double m = 0.5 * (a + b);
    if ((at(m) - center).norm() <= radius)
      a = m;
    else
      b = m;
  }
  return at(a);
}

Vec attack_l2_box(const Vec& w, double b, const Vec& x_hat, double y, double d_max,
                  const AttackSpec& spec) {
  check_dims(w, x_hat, "attack_l2_box");
  check_label(y);
  AttackSpec s = spec;
  s.d_max = d_max;
  s.mode = AttackMode::l2_box_pgd;
  s.validate(x_hat.size());
  const double inf = std::numeric_limits<double>::infinity();
  Vec lo = s.box_lower ? *s.box_lower : Vec::Constant(x_hat.size(), -inf);
  const Vec hi = s.box_upper ? *s.box_upper : Vec::Constant(x_hat.size(), inf);
  if ((x_hat.array() < lo.array()).any() || (x_hat.array() > hi.array()).any())
    throw DomainError("sample outside the attack box");
  if (s.monotone_increase_only) lo = lo.cwiseMax(x_hat);

  const double norm = w.norm();
  if (norm == 0.0 || d_max == 0.0) return x_hat;
  const Vec direction = (y / norm) * w;  // normalized gradient of y f
  const double step = d_max * kPgdStepFraction;
  auto objective = [&](const Vec& x) { return y * (w.dot(x) + b); };

  Vec x = x_hat, best = x_hat;
  double best_value = objective(x_hat);
  for (int t = 0; t < kPgdSteps; ++t) {
    const Vec next = project_box_ball(x - step * direction, x_hat, d_max, lo, hi);
    // A fixed point of the projected step minimizes the linear objective.
    const bool fixed = (next - x).norm() <= 1e-15 * d_max;
    x = next;
    const double v = objective(x);
    if (v < best_value) {
      best_value = v;
      best = x;
    }
    if (fixed) break;
  }
  // Fixed-length steps crawl along coordinates with small gradient entries; the exact minimizer
  // of the linear objective is kept when it does better.
  const Vec exact = linear_min_box_ball(direction, x_hat, d_max, lo, hi);
  if (objective(exact) < best_value) best = exact;
  return best;
}

Vec attack_flip_binary(const Vec& w, const Vec& x_hat, double y, int d_max) {
  check_dims(w, x_hat, "attack_flip_binary");
  check_label(y);
  if (d_max < 0) throw DomainError("d_max must be >= 0");
  for (Index j = 0; j < x_hat.size(); ++j)
    if (x_hat(j) != 0.0 && x_hat(j) != 1.0) throw DomainError("attack_flip_binary needs 0/1 features");

  std::vector<Index> order(static_cast<std::size_t>(x_hat.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(w(a)) > std::abs(w(b)); });
  Vec x = x_hat;
  int flips = 0;
  for (Index j : order) {
    if (flips >= d_max) break;
    const double yw = y * w(j);
    if (x_hat(j) == 1.0 && yw > 0.0) {
      x(j) = 0.0;
      ++flips;
    } else if (x_hat(j) == 0.0 && yw < 0.0) {
      x(j) = 1.0;
      ++flips;
    }
  }
  return x;
}

Vec attack_sample(const LearnerParams& classifier, const Vec& x_hat, double y,
                  const AttackSpec& spec) {
  spec.validate(x_hat.size());
  const Vec w = classifier.mu_weights();
  switch (spec.mode) {
    case AttackMode::l2_closed_form: return attack_l2_closed(w, x_hat, y, spec.d_max).x;
    case AttackMode::l2_box_pgd:
      return attack_l2_box(w, classifier.mu_bias(), x_hat, y, spec.d_max, spec);
    case AttackMode::binary_flip:
      return attack_flip_binary(w, x_hat, y, static_cast<int>(spec.d_max));
  }
  throw DomainError("unknown attack mode");
}

Dataset attack_dataset(const LearnerParams& classifier, const Dataset& data, const AttackSpec& spec) {
  if (classifier.k() != data.k())
    throw ShapeError("classifier has " + std::to_string(classifier.k()) + " features, data " +
                     std::to_string(data.k()));
  Mat x = data.features();
  for (Index i = 0; i < data.n(); ++i)
    if (data.y(i) > 0) x.row(i) = attack_sample(classifier, data.x(i), 1.0, spec).transpose();
  // The closed form ignores any box and may leave the unit interval; l2 attacks on binary data
  // produce fractional values.
  FeatureKind kind = data.kind();
  if (spec.mode == AttackMode::l2_closed_form)
    kind = FeatureKind::unbounded;
  else if (spec.mode == AttackMode::l2_box_pgd && kind == FeatureKind::binary)
    kind = spec.box_lower ? FeatureKind::continuous_unit_interval : FeatureKind::unbounded;
  return Dataset(std::move(x), data.labels(), kind);
}

Vec expected_scores(const LearnerParams& classifier, const Mat& x) {
  if (x.cols() != classifier.k())
    throw ShapeError("expected_scores: " + std::to_string(x.cols()) + " features, classifier has " +
                     std::to_string(classifier.k()));
  return (x * classifier.mu_weights()).array() + classifier.mu_bias();
}

Prediction predict_expected(const LearnerParams& classifier, const Vec& x) {
  if (x.size() != classifier.k()) throw ShapeError("predict: feature length mismatch");
  const double s = classifier.mu_weights().dot(x) + classifier.mu_bias();
  return {s, s > 0.0 ? 1.0 : 0.0, 0.0};
}

Prediction predict_sampled(const LearnerParams& classifier, const Vec& x, int n_draws,
                           std::uint64_t seed) {
  if (x.size() != classifier.k()) throw ShapeError("predict: feature length mismatch");
  if (n_draws < 1) throw DomainError("n_draws must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  const Index k = classifier.k();
  double sum = 0.0, sum2 = 0.0;
  int positive = 0;
  for (int d = 0; d < n_draws; ++d) {
    double s = classifier.mu_bias() + classifier.sigma_bias() * z(rng);
    for (Index j = 0; j < k; ++j) s += (classifier.mu_w(j) + classifier.sigma_w(j) * z(rng)) * x(j);
    sum += s;
    sum2 += s * s;
    positive += s > 0.0;
  }
  const double n = n_draws;
  const double m = sum / n;
  const double var = n > 1 ? std::max(0.0, (sum2 - n * m * m) / (n - 1)) : 0.0;
  return {m, positive / n, std::sqrt(var / n)};
}

TpAtFp tp_at_fp(const std::vector<double>& legit, const std::vector<double>& malicious,
                double fp_target) {
  if (legit.empty() || malicious.empty()) throw DomainError("tp_at_fp needs both score sets");
  if (!(fp_target > 0.0 && fp_target < 1.0)) throw DomainError("fp_target must lie in (0, 1)");
  std::vector<double> l = legit, m = malicious;
  std::sort(l.begin(), l.end());
  std::sort(m.begin(), m.end());
  auto share_at_or_above = [](const std::vector<double>& sorted, double t) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
    return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
  };

  std::vector<double> candidates{-std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < l.size(); ++i)
    if (i + 1 == l.size() || l[i] < l[i + 1])
      candidates.push_back(std::nextafter(l[i], std::numeric_limits<double>::infinity()));

  for (double t : candidates) {
    const double fp = share_at_or_above(l, t);
    if (fp <= fp_target) return {t, share_at_or_above(m, t), fp};
  }
  // Unreachable: the last candidate admits no legitimate score.
  throw NumericError("tp_at_fp: no admissible threshold");
}

double SecurityCurve::auc() const {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i)
    area += 0.5 * (points[i].tp_mean + points[i - 1].tp_mean) *
            (points[i].d_max - points[i - 1].d_max);
  return area;
}

SecurityCurve security_curve(const LearnerParams& classifier, const Dataset& test,
                             const AttackSpec& attack, const std::vector<double>& d_max_list,
                             int repetitions, std::uint64_t seed, double fp_target) {
  if (d_max_list.empty()) throw DomainError("d_max list is empty");
  for (std::size_t i = 1; i < d_max_list.size(); ++i)
    if (!(d_max_list[i] > d_max_list[i - 1])) throw DomainError("d_max list must increase strictly");
  if (repetitions < 1) throw DomainError("repetitions must be >= 1");
  if (classifier.k() != test.k()) throw ShapeError("classifier/test feature mismatch");

  std::vector<Index> legit, malicious;
  for (Index i = 0; i < test.n(); ++i) (test.y(i) > 0 ? malicious : legit).push_back(i);
  const auto reps = static_cast<std::size_t>(repetitions);
  if (legit.size() < reps || malicious.size() < reps)
    throw DomainError("each fold needs a legitimate and a malicious sample");
  std::mt19937_64 rng(seed);
  std::shuffle(legit.begin(), legit.end(), rng);
  std::shuffle(malicious.begin(), malicious.end(), rng);

  const Vec base_scores = expected_scores(classifier, test.features());
  std::vector<std::vector<double>> legit_scores(reps), tp(d_max_list.size());
  for (std::size_t j = 0; j < legit.size(); ++j) legit_scores[j % reps].push_back(base_scores(legit[j]));

  for (std::size_t d = 0; d < d_max_list.size(); ++d) {
    AttackSpec spec = attack;
    spec.d_max = d_max_list[d];
    std::vector<std::vector<double>> mal_scores(reps);
    for (std::size_t j = 0; j < malicious.size(); ++j) {
      const Vec x = attack_sample(classifier, test.x(malicious[j]), 1.0, spec);
      mal_scores[j % reps].push_back(predict_expected(classifier, x).score);
    }
    for (std::size_t r = 0; r < reps; ++r)
      tp[d].push_back(tp_at_fp(legit_scores[r], mal_scores[r], fp_target).tp_rate);
  }

  SecurityCurve curve;
  curve.fp_target = fp_target;
  curve.repetitions = repetitions;
  curve.seed = seed;
  for (std::size_t d = 0; d < d_max_list.size(); ++d)
    curve.points.push_back({d_max_list[d], mean(tp[d]), stddev(tp[d])});
  return curve;
}

std::string curve_csv(const SecurityCurve& curve) {
  std::ostringstream out;
  out << "d_max,tp_mean,tp_std,fp_target,repetitions,seed\n";
  for (const CurvePoint& p : curve.points)
    out << format_double(p.d_max) << ',' << format_double(p.tp_mean) << ','
        << format_double(p.tp_std) << ',' << format_double(curve.fp_target) << ','
        << curve.repetitions << ',' << curve.seed << '\n';
  return out.str();
}

SecurityCurve parse_curve_csv(std::string_view text) {
  SecurityCurve curve;
  std::size_t line_no = 0;
  bool header = true;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (header) {
      if (line != "d_max,tp_mean,tp_std,fp_target,repetitions,seed")
        throw ParseError("unexpected curve header", line_no);
      header = false;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 6) throw ParseError("expected 6 columns", line_no);
    double v[4];
    for (int c = 0; c < 4; ++c)
      if (!parse_double(cells[c], v[c])) throw ParseError("bad number", line_no);
    if (!parse_integer(cells[4], curve.repetitions) || !parse_integer(cells[5], curve.seed))
      throw ParseError("bad integer", line_no);
    curve.points.push_back({v[0], v[1], v[2]});
    curve.fp_target = v[3];
  }
  if (header) throw ParseError("empty curve file", line_no);
  return curve;
}

}  // namespace rpg
