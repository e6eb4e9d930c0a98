#include "rpg/kernel_game.hpp"

#include "rpg/config.hpp"
#include "rpg/errors.hpp"
#include "rpg/serialization.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

namespace rpg {

Kernel Kernel::rbf(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("rbf gamma must be > 0");
  return {Kind::rbf, gamma};
}

double Kernel::operator()(const Eigen::Ref<const Vec>& a, const Eigen::Ref<const Vec>& b) const {
  if (a.size() != b.size()) throw ShapeError("kernel arguments differ in length");
  if (kind == Kind::linear) return a.dot(b);
  return std::exp(-gamma * (a - b).squaredNorm());
}

std::string to_string(const Kernel& kernel) {
  return kernel.kind == Kernel::Kind::linear ? "linear" : "rbf(gamma=" + format_double(kernel.gamma) + ")";
}

Kernel kernel_from_config(const Config& cfg) {
  const std::string kind = cfg.get_string("kernel", "linear");
  if (kind == "linear") return Kernel::linear();
  if (kind == "rbf") return Kernel::rbf(cfg.get_double("gamma", 1.0));
  throw DomainError("kernel must be 'linear' or 'rbf', got '" + kind + "'");
}

Mat kernel_matrix(const Mat& a, const Mat& b, const Kernel& kernel) {
  if (a.cols() != b.cols()) throw ShapeError("kernel_matrix: feature counts differ");
  Mat K;
  if (kernel.kind == Kernel::Kind::linear) {
    K = a * b.transpose();
  } else {
    if (!(kernel.gamma > 0.0)) throw DomainError("rbf gamma must be > 0");
    K.resize(a.rows(), b.rows());
    for (Index j = 0; j < b.rows(); ++j) {
      for (Index i = 0; i < a.rows(); ++i) {
        // Direct difference keeps the diagonal of a Gram matrix exactly 1.
        K(i, j) = std::exp(-kernel.gamma * (a.row(i) - b.row(j)).squaredNorm());
      }
    }
  }
  if (!K.allFinite()) throw NumericError("kernel matrix has non-finite entries");
  return K;
}

Mat gram(const Dataset& data, const Kernel& kernel) {
  Mat K = kernel_matrix(data.features(), data.features(), kernel);
  // Symmetrize exactly; the linear product can differ in the last bit.
  K = 0.5 * (K + K.transpose()).eval();
  return K;
}

double min_eigenvalue(const Mat& symmetric) {
  if (symmetric.rows() != symmetric.cols()) throw ShapeError("matrix is not square");
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetric, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("eigenvalue computation failed");
  return es.eigenvalues()(0);
}

std::string gram_csv(const Mat& K) {
  std::string out;
  for (Index i = 0; i < K.rows(); ++i) {
    for (Index j = 0; j < K.cols(); ++j) {
      if (j) out += ',';
      out += format_double(K(i, j));
    }
    out += '\n';
  }
  return out;
}

void save_gram(const std::string& path, const Mat& K) { write_file_atomic(path, gram_csv(K)); }

DualParams::DualParams(Vec ma, Vec sa, double mb, double sb, Mat mx, Mat sx)
    : mu_alpha(std::move(ma)),
      sigma_alpha(std::move(sa)),
      mu_b(mb),
      sigma_b(sb),
      mu_xi(std::move(mx)),
      sigma_xi(std::move(sx)) {
  const Index n = mu_alpha.size();
  if (n < 1 || sigma_alpha.size() != n || mu_xi.rows() != n || mu_xi.cols() != n ||
      sigma_xi.rows() != n || sigma_xi.cols() != n) {
    throw ShapeError("dual parameters must all have length n = " + std::to_string(n));
  }
  if ((sigma_alpha.array() <= 0.0).any() || !(sigma_b > 0.0) || (sigma_xi.array() <= 0.0).any()) {
    throw DomainError("dual deviations must be > 0");
  }
}

GameLayout dual_layout(Index n) { return {n, n}; }

Vec flatten(const DualParams& p) {
  const Index n = p.n();
  Vec mu(n + 1), sigma(n + 1);
  mu << p.mu_alpha, p.mu_b;
  sigma << p.sigma_alpha, p.sigma_b;
  return flatten(LearnerParams(mu, sigma), AttackerParams(p.mu_xi, p.sigma_xi));
}

DualParams unflatten_dual(const Vec& v, Index n) {
  const auto [l, a] = unflatten(v, dual_layout(n));
  return DualParams(l.mu_w.head(n), l.sigma_w.head(n), l.mu_w(n), l.sigma_w(n), a.mu_x, a.sigma_x);
}

MarginMoments dual_margin_moments(Side side, double y, const Eigen::Ref<const Vec>& mu_alpha,
                                  const Eigen::Ref<const Vec>& sigma_alpha, double mu_b,
                                  double sigma_b, const Eigen::Ref<const Vec>& mu_xi,
                                  const Eigen::Ref<const Vec>& sigma_xi, const Mat& K) {
  const Index n = K.rows();
  if (K.cols() != n || mu_alpha.size() != n || sigma_alpha.size() != n || mu_xi.size() != n ||
      sigma_xi.size() != n) {
    throw ShapeError("dual moments: all vectors must match the " + std::to_string(n) +
                     "x" + std::to_string(n) + " kernel matrix");
  }
  const Vec a = K * mu_xi;
  const Vec c = K.transpose() * mu_alpha;
  const Vec sa2 = sigma_alpha.array().square();
  const Vec sx2 = sigma_xi.array().square();
  const double score = mu_alpha.dot(a) + mu_b;
  MarginMoments m;
  m.mu = side == Side::learner ? 1.0 - y * score : 1.0 + y * score;
  m.var = sa2.dot(a.cwiseProduct(a)) + sx2.dot(c.cwiseProduct(c)) +
          sa2.dot(K.array().square().matrix() * sx2) + sigma_b * sigma_b;
  return m;
}

std::pair<ParamBox, ParamBox> dual_default_boxes(Index n, double W) {
  auto [lbox, dbox] = default_boxes(n, n, W);
  for (Index i = 0; i < n; ++i) {
    set_sample_box(dbox, n, i, dual_bounds::xi_mean_lower, dual_bounds::xi_mean_upper,
                   bounds::attacker_sigma_lower, bounds::attacker_sigma_upper);
  }
  return {std::move(lbox), std::move(dbox)};
}

namespace {

Mat checked_gram(Mat K, Index n) {
  if (K.rows() != n || K.cols() != n) throw ShapeError("Gram matrix does not match the dataset");
  if (!K.allFinite()) throw NumericError("Gram matrix has non-finite entries");
  if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + K.cwiseAbs().maxCoeff())) {
    throw DomainError("Gram matrix is not symmetric");
  }
  const double lo = min_eigenvalue(K);
  const double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
  if (lo < -1e-10 * scale) {
    throw DomainError("Gram matrix is not positive semidefinite (min eigenvalue " +
                      format_double(lo) + ")");
  }
  return K;
}

ParamBox joint_dual_box(Index n, double W) {
  const auto [lbox, dbox] = dual_default_boxes(n, W);
  Vec lo(lbox.dim() + dbox.dim()), hi(lbox.dim() + dbox.dim());
  lo << lbox.lower, dbox.lower;
  hi << lbox.upper, dbox.upper;
  return ParamBox(lo, hi);
}

}  // namespace

KernelGame::KernelGame(Dataset data, const Kernel& kernel, double rho_l, double rho_d, double W,
                       double bias_eps)
    : KernelGame(data, gram(data, kernel), rho_l, rho_d, W, bias_eps) {}

KernelGame::KernelGame(Dataset data, Mat K, double rho_l, double rho_d, double W, double bias_eps)
    : data_(std::move(data)),
      K_(checked_gram(std::move(K), data_.n())),
      rho_l_(rho_l),
      rho_d_(rho_d),
      bias_eps_(bias_eps),
      box_(joint_dual_box(data_.n(), W)) {
  if (!(rho_l > 0.0) || !(rho_d > 0.0)) throw DomainError("rho_l and rho_d must be > 0");
  if (!(bias_eps >= 0.0)) throw DomainError("bias_eps must be >= 0");
}

DualCosts KernelGame::evaluate(const DualParams& p) const {
  const Index n = this->n();
  if (p.n() != n) throw ShapeError("dual parameters do not match the game");
  const Mat& K = K_;
  const Vec diagK = K.diagonal();
  const Mat K2 = K.array().square();
  const Vec c = K * p.mu_alpha;
  const Vec c2 = c.cwiseProduct(c);
  const Vec sa2 = p.sigma_alpha.array().square();
  const Vec q = K2 * sa2;  // (K o K) sigma_alpha^2

  DualCosts out;
  out.learner = 0.5 * rho_l_ * (p.mu_alpha.dot(c) + diagK.dot(sa2)) +
                0.5 * bias_eps_ * (p.mu_b * p.mu_b + p.sigma_b * p.sigma_b);
  Vec g_mu_a = rho_l_ * c;
  Vec g_sig_a = rho_l_ * diagK.cwiseProduct(p.sigma_alpha);
  double g_mu_b = bias_eps_ * p.mu_b;
  double g_sig_b = bias_eps_ * p.sigma_b;
  Mat g_mu_xi(n, n), g_sig_xi(n, n);

  for (Index i = 0; i < n; ++i) {
    const double y = data_.y(i);
    const Vec mx = p.mu_xi.row(i).transpose();
    const Vec sx = p.sigma_xi.row(i).transpose();
    const Vec sx2 = sx.array().square();
    const Vec a = K * mx;
    const double score = p.mu_alpha.dot(a) + p.mu_b;
    const double var = sa2.dot(a.cwiseProduct(a)) + sx2.dot(c2) + sx2.dot(q) + p.sigma_b * p.sigma_b;
    const double sd = std::sqrt(var);

    // Learner side, s = 1 - y f.
    const double mu_s = 1.0 - y * score;
    out.learner += hinge_expect(mu_s, sd);
    const double ds = hinge_expect_dmu(mu_s, sd);
    const double vs = hinge_expect_dvar(mu_s, sd);
    g_mu_a += -ds * y * a + vs * 2.0 * (K * sx2.cwiseProduct(c));
    g_mu_b += -ds * y;
    g_sig_a += vs * 2.0 * p.sigma_alpha.cwiseProduct(a.cwiseProduct(a) + K2 * sx2);
    g_sig_b += vs * 2.0 * p.sigma_b;

    // Attacker side, t = 1 + y f, with the shifted regularizer E[(xi - e_i)' K (xi - e_i)].
    const double mu_t = 1.0 + y * score;
    Vec shift = mx;
    shift(i) -= 1.0;
    const Vec Kshift = K * shift;
    out.attacker += 0.5 * rho_d_ * (shift.dot(Kshift) + diagK.dot(sx2)) + hinge_expect(mu_t, sd);
    const double dt = hinge_expect_dmu(mu_t, sd);
    const double vt = hinge_expect_dvar(mu_t, sd);
    g_mu_xi.row(i) =
        (rho_d_ * Kshift + dt * y * c + vt * 2.0 * (K * sa2.cwiseProduct(a))).transpose();
    g_sig_xi.row(i) =
        (rho_d_ * diagK.cwiseProduct(sx) + vt * 2.0 * sx.cwiseProduct(c2 + q)).transpose();
  }

  out.learner_gradient.resize(2 * (n + 1));
  out.learner_gradient << g_mu_a, g_mu_b, g_sig_a, g_sig_b;
  out.attacker_gradient = flatten_sample_blocks(g_mu_xi, g_sig_xi);
  return out;
}

double KernelGame::learner_cost(const Vec& theta) const {
  return evaluate(unflatten_dual(theta, n())).learner;
}

double KernelGame::attacker_cost(const Vec& theta) const {
  return evaluate(unflatten_dual(theta, n())).attacker;
}

Vec KernelGame::learner_gradient(const Vec& theta) const {
  return evaluate(unflatten_dual(theta, n())).learner_gradient;
}

Vec KernelGame::attacker_gradient(const Vec& theta) const {
  return evaluate(unflatten_dual(theta, n())).attacker_gradient;
}

Mat KernelGame::learner_regularizer_hessian() const {
  // Omega_l = (1/2)(mu_a' K mu_a + sum_j K_jj s_a,j^2) + (eps / (2 rho_l))(mu_b^2 + sigma_b^2)
  const Index n = this->n();
  Mat H = Mat::Zero(learner_dim(), learner_dim());
  H.topLeftCorner(n, n) = K_;
  H(n, n) = bias_eps_ / rho_l_;
  H.block(n + 1, n + 1, n, n) = K_.diagonal().asDiagonal();
  H(2 * n + 1, 2 * n + 1) = bias_eps_ / rho_l_;
  return H;
}

Mat KernelGame::attacker_regularizer_hessian() const {
  const Index n = this->n();
  Mat H = Mat::Zero(attacker_dim(), attacker_dim());
  for (Index i = 0; i < n; ++i) {
    const Index off = 2 * n * i;
    H.block(off, off, n, n) = K_;
    H.block(off + n, off + n, n, n) = K_.diagonal().asDiagonal();
  }
  return H;
}

Vec KernelGame::initial_point(std::uint64_t seed) const {
  Vec theta = uniform_in_box(box_, seed);
  const Index n = this->n();
  theta.head(n + 1) *= 0.1;
  const GameLayout lay = dual_layout(n);
  for (Index i = 0; i < n; ++i) {
    auto mean = theta.segment(lay.sample_offset(i), n);
    mean.setZero();
    mean(i) = 1.0;
  }
  return project_box(theta, box_);
}

Vec KernelGame::expected_scores(const Vec& theta_learner, const Mat& rows,
                                const Kernel& kernel) const {
  const Index n = this->n();
  if (theta_learner.size() != learner_dim()) throw ShapeError("learner block has wrong length");
  const Mat Kx = kernel_matrix(rows, data_.features(), kernel);
  return (Kx * theta_learner.head(n)).array() + theta_learner(n);
}

}  // namespace rpg
