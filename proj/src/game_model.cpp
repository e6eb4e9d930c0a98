#include "rpg/game_model.hpp"

#include "rpg/errors.hpp"

#include <cmath>

namespace rpg {

std::string to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::continuous_unit_interval:
      return "continuous";
    case FeatureKind::binary:
      return "binary";
    case FeatureKind::unbounded:
      return "unbounded";
  }
  return "unknown";
}

Dataset::Dataset(Mat features, Vec labels, FeatureKind kind)
    : features_(std::move(features)), labels_(std::move(labels)), kind_(kind) {
  if (features_.rows() < 1 || features_.cols() < 1) {
    throw ShapeError("dataset needs n >= 1 samples and k >= 1 features");
  }
  if (labels_.size() != features_.rows()) {
    throw ShapeError("label count " + std::to_string(labels_.size()) +
                     " does not match sample count " + std::to_string(features_.rows()));
  }
  if (!features_.allFinite()) throw NumericError("dataset contains non-finite features");
  for (Index i = 0; i < labels_.size(); ++i) {
    if (labels_(i) != 1.0 && labels_(i) != -1.0) {
      throw DomainError("labels must be +1 or -1");
    }
  }
  switch (kind_) {
    case FeatureKind::continuous_unit_interval:
      if (features_.minCoeff() < 0.0 || features_.maxCoeff() > 1.0) {
        throw DomainError("continuous features must lie in [0, 1]");
      }
      break;
    case FeatureKind::binary:
      if (!features_.unaryExpr([](double v) { return v == 0.0 || v == 1.0 ? 0.0 : 1.0; })
               .isZero()) {
        throw DomainError("binary features must be 0 or 1");
      }
      break;
    case FeatureKind::unbounded:
      break;
  }
}

Index Dataset::count_label(double label) const {
  return static_cast<Index>((labels_.array() == label).count());
}

Dataset Dataset::subset(const std::vector<Index>& indices) const {
  Mat f(static_cast<Index>(indices.size()), k());
  Vec l(static_cast<Index>(indices.size()));
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const Index i = indices[r];
    if (i < 0 || i >= n()) throw ShapeError("subset index out of range");
    f.row(static_cast<Index>(r)) = features_.row(i);
    l(static_cast<Index>(r)) = labels_(i);
  }
  return Dataset(std::move(f), std::move(l), kind_);
}

LearnerParams::LearnerParams(Vec mu, Vec sigma) : mu_w(std::move(mu)), sigma_w(std::move(sigma)) {
  if (mu_w.size() < 2 || mu_w.size() != sigma_w.size()) {
    throw ShapeError("learner mean/deviation vectors must both have length k + 1 >= 2");
  }
  if ((sigma_w.array() <= 0.0).any()) throw DomainError("learner deviations must be > 0");
}

AttackerParams::AttackerParams(Mat mu, Mat sigma) : mu_x(std::move(mu)), sigma_x(std::move(sigma)) {
  if (mu_x.rows() < 1 || mu_x.cols() < 1) {
    throw ShapeError("attacker parameters need n >= 1 samples and k >= 1 features");
  }
  if (mu_x.rows() != sigma_x.rows() || mu_x.cols() != sigma_x.cols()) {
    throw ShapeError("attacker mean/deviation shapes differ");
  }
  if ((sigma_x.array() <= 0.0).any()) throw DomainError("attacker deviations must be > 0");
}

ParamBox::ParamBox(Vec lo, Vec hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size()) throw ShapeError("box bounds differ in length");
  if ((lower.array() > upper.array()).any()) throw DomainError("box lower bound exceeds upper");
}

bool ParamBox::contains(const Vec& v, double tol) const {
  if (v.size() != dim()) return false;
  return ((v.array() >= lower.array() - tol) && (v.array() <= upper.array() + tol)).all();
}

Vec flatten_learner(const LearnerParams& learner) {
  Vec out(2 * learner.mu_w.size());
  out << learner.mu_w, learner.sigma_w;
  return out;
}

Vec flatten_sample_blocks(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("sample block shapes differ");
  const Index k = a.cols();
  Vec out(2 * a.rows() * k);
  for (Index i = 0; i < a.rows(); ++i) {
    out.segment(2 * k * i, k) = a.row(i).transpose();
    out.segment(2 * k * i + k, k) = b.row(i).transpose();
  }
  return out;
}

Vec flatten_attacker(const AttackerParams& attacker) {
  return flatten_sample_blocks(attacker.mu_x, attacker.sigma_x);
}

Vec flatten(const LearnerParams& learner, const AttackerParams& attacker) {
  if (learner.k() != attacker.k()) {
    throw ShapeError("learner has k=" + std::to_string(learner.k()) + " but attacker has k=" +
                     std::to_string(attacker.k()));
  }
  Vec out(2 * (learner.k() + 1) + 2 * attacker.n() * attacker.k());
  out << flatten_learner(learner), flatten_attacker(attacker);
  return out;
}

LearnerParams unflatten_learner(const Vec& v, Index k) {
  if (v.size() != 2 * (k + 1)) throw ShapeError("learner vector has wrong length");
  return LearnerParams(v.head(k + 1), v.segment(k + 1, k + 1));
}

AttackerParams unflatten_attacker(const Vec& v, Index k, Index n) {
  if (k < 1 || n < 1 || v.size() != 2 * n * k) throw ShapeError("attacker vector has wrong length");
  Mat mu(n, k);
  Mat sigma(n, k);
  for (Index i = 0; i < n; ++i) {
    mu.row(i) = v.segment(2 * k * i, k).transpose();
    sigma.row(i) = v.segment(2 * k * i + k, k).transpose();
  }
  return AttackerParams(std::move(mu), std::move(sigma));
}

std::pair<LearnerParams, AttackerParams> unflatten(const Vec& v, const GameLayout& layout) {
  if (v.size() != layout.dim()) {
    throw ShapeError("parameter vector has length " + std::to_string(v.size()) + ", expected " +
                     std::to_string(layout.dim()));
  }
  return {unflatten_learner(v.head(layout.learner_dim()), layout.k),
          unflatten_attacker(v.tail(layout.attacker_dim()), layout.k, layout.n)};
}

Vec project_box(const Vec& v, const ParamBox& box) {
  if (v.size() != box.dim()) {
    throw ShapeError("cannot project a vector of length " + std::to_string(v.size()) +
                     " onto a box of dimension " + std::to_string(box.dim()));
  }
  return v.cwiseMax(box.lower).cwiseMin(box.upper);
}

std::pair<ParamBox, ParamBox> default_boxes(Index k, Index n, double W) {
  if (!(W > 0.0) || !std::isfinite(W)) throw DomainError("W must be a positive finite value");
  if (k < 1 || n < 1) throw ShapeError("default boxes need k >= 1 and n >= 1");
  const Index m = k + 1;
  Vec l_lo(2 * m), l_hi(2 * m);
  l_lo << Vec::Constant(m, -W), Vec::Constant(m, bounds::learner_sigma_lower);
  l_hi << Vec::Constant(m, W), Vec::Constant(m, bounds::learner_sigma_upper);

  Vec d_lo(2 * n * k), d_hi(2 * n * k);
  for (Index i = 0; i < n; ++i) {
    d_lo.segment(2 * k * i, k).setConstant(bounds::attacker_mean_lower);
    d_hi.segment(2 * k * i, k).setConstant(bounds::attacker_mean_upper);
    d_lo.segment(2 * k * i + k, k).setConstant(bounds::attacker_sigma_lower);
    d_hi.segment(2 * k * i + k, k).setConstant(bounds::attacker_sigma_upper);
  }
  return {ParamBox(std::move(l_lo), std::move(l_hi)), ParamBox(std::move(d_lo), std::move(d_hi))};
}

void set_sample_box(ParamBox& attacker_box, Index k, Index sample, double mean_lo, double mean_hi,
                    double sigma_lo, double sigma_hi) {
  const Index off = 2 * k * sample;
  if (sample < 0 || off + 2 * k > attacker_box.dim()) throw ShapeError("sample index out of range");
  if (mean_lo > mean_hi || sigma_lo > sigma_hi) throw DomainError("inverted sample box");
  if (!(sigma_lo > 0.0)) throw DomainError("deviation lower bound must be > 0");
  attacker_box.lower.segment(off, k).setConstant(mean_lo);
  attacker_box.upper.segment(off, k).setConstant(mean_hi);
  attacker_box.lower.segment(off + k, k).setConstant(sigma_lo);
  attacker_box.upper.segment(off + k, k).setConstant(sigma_hi);
}

GameSpec::GameSpec(Dataset data, double rl, double rd, ParamBox lbox, ParamBox dbox, double eps)
    : dataset(std::move(data)),
      rho_l(rl),
      rho_d(rd),
      learner_box(std::move(lbox)),
      attacker_box(std::move(dbox)),
      bias_eps(eps) {
  if (!(rho_l > 0.0) || !(rho_d > 0.0)) throw DomainError("rho_l and rho_d must be > 0");
  if (!(bias_eps >= 0.0)) throw DomainError("bias_eps must be >= 0");
  const GameLayout lay = layout();
  if (learner_box.dim() != lay.learner_dim()) throw ShapeError("learner box dimension mismatch");
  if (attacker_box.dim() != lay.attacker_dim()) throw ShapeError("attacker box dimension mismatch");
  const Index m = lay.k + 1;
  if ((learner_box.lower.tail(m).array() <= 0.0).any()) {
    throw DomainError("learner deviation lower bounds must be > 0");
  }
  for (Index i = 0; i < lay.n; ++i) {
    if ((attacker_box.lower.segment(2 * lay.k * i + lay.k, lay.k).array() <= 0.0).any()) {
      throw DomainError("attacker deviation lower bounds must be > 0");
    }
  }
}

ParamBox GameSpec::joint_box() const {
  Vec lo(learner_box.dim() + attacker_box.dim());
  Vec hi(lo.size());
  lo << learner_box.lower, attacker_box.lower;
  hi << learner_box.upper, attacker_box.upper;
  return ParamBox(std::move(lo), std::move(hi));
}

GameSpec make_game(Dataset data, double rho_l, double rho_d, double W, double bias_eps) {
  auto [lbox, dbox] = default_boxes(data.k(), data.n(), W);
  return GameSpec(std::move(data), rho_l, rho_d, std::move(lbox), std::move(dbox), bias_eps);
}

}  // namespace rpg
