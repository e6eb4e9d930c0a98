#include "rpg/gaussian_hinge.hpp"

#include "rpg/errors.hpp"

#include <cmath>
#include <numbers>

namespace rpg {

namespace {

constexpr double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;

void require_positive(double sigma) {
  if (!(sigma > 0.0)) throw DomainError("hinge expectation needs sigma > 0");
}

}  // namespace

double hinge_expect(double mu, double sigma) {
  require_positive(sigma);
  const double z = mu / sigma;
  // 1 - erf(-x) == erfc(-x); erfc keeps precision in the lower tail.
  return sigma * inv_sqrt_2pi * std::exp(-0.5 * z * z) +
         0.5 * mu * std::erfc(-z / std::numbers::sqrt2);
}

double hinge_expect_dmu(double mu, double sigma) {
  require_positive(sigma);
  return 0.5 * std::erfc(-mu / (std::numbers::sqrt2 * sigma));
}

double hinge_expect_dvar(double mu, double sigma) {
  require_positive(sigma);
  const double z = mu / sigma;
  return 0.5 * inv_sqrt_2pi / sigma * std::exp(-0.5 * z * z);
}

double MarginMoments::sigma() const { return std::sqrt(var); }

namespace detail {

double dot(const Eigen::Ref<const Vec>& a, const Eigen::Ref<const Vec>& b) {
  if (a.size() <= compensated_threshold) return a.dot(b);
  double sum = 0.0;
  double comp = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    const double term = a(i) * b(i);
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term)) {
      comp += (sum - t) + term;
    } else {
      comp += (term - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

}  // namespace detail

MarginMoments margin_moments(Side side, double y, const LearnerParams& learner,
                             const Eigen::Ref<const Vec>& mu_x,
                             const Eigen::Ref<const Vec>& sigma_x) {
  const Index k = learner.k();
  if (mu_x.size() != k || sigma_x.size() != k) {
    throw ShapeError("sample moments have length " + std::to_string(mu_x.size()) +
                     ", learner expects k=" + std::to_string(k));
  }
  const Vec mu_w = learner.mu_weights();
  const Vec sw2 = learner.sigma_weights().array().square();
  const Vec sx2 = sigma_x.array().square();
  const Vec mx2 = mu_x.array().square();
  const Vec mw2 = mu_w.array().square();

  const double score = detail::dot(mu_w, mu_x) + learner.mu_bias();
  MarginMoments m;
  m.mu = side == Side::learner ? 1.0 - y * score : 1.0 + y * score;
  m.var = detail::dot(sw2, sx2 + mx2) + detail::dot(mw2, sx2) +
          learner.sigma_bias() * learner.sigma_bias();
  return m;
}

}  // namespace rpg
