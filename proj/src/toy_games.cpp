#include "rpg/toy_games.hpp"

#include "rpg/errors.hpp"

namespace rpg {

QuadraticGame::QuadraticGame(Mat A_l, Mat B_l, Vec a_l, Mat A_d, Mat B_d, Vec a_d, ParamBox box)
    : A_l_(std::move(A_l)),
      B_l_(std::move(B_l)),
      a_l_(std::move(a_l)),
      A_d_(std::move(A_d)),
      B_d_(std::move(B_d)),
      a_d_(std::move(a_d)),
      box_(std::move(box)) {
  const Index dl = A_l_.rows();
  const Index dd = A_d_.rows();
  if (A_l_.cols() != dl || A_d_.cols() != dd || B_l_.rows() != dl || B_l_.cols() != dd ||
      B_d_.rows() != dd || B_d_.cols() != dl || a_l_.size() != dl || a_d_.size() != dd ||
      box_.dim() != dl + dd) {
    throw ShapeError("inconsistent quadratic game blocks");
  }
}

double QuadraticGame::learner_cost(const Vec& theta) const {
  const Vec tl = learner_block(theta);
  const Vec td = attacker_block(theta);
  return 0.5 * tl.dot(A_l_ * tl) + tl.dot(B_l_ * td) + a_l_.dot(tl);
}

double QuadraticGame::attacker_cost(const Vec& theta) const {
  const Vec tl = learner_block(theta);
  const Vec td = attacker_block(theta);
  return 0.5 * td.dot(A_d_ * td) + td.dot(B_d_ * tl) + a_d_.dot(td);
}

Vec QuadraticGame::learner_gradient(const Vec& theta) const {
  const Vec tl = learner_block(theta);
  const Vec td = attacker_block(theta);
  return 0.5 * (A_l_ + A_l_.transpose()) * tl + B_l_ * td + a_l_;
}

Vec QuadraticGame::attacker_gradient(const Vec& theta) const {
  const Vec tl = learner_block(theta);
  const Vec td = attacker_block(theta);
  return 0.5 * (A_d_ + A_d_.transpose()) * td + B_d_ * tl + a_d_;
}

namespace {

ParamBox square_box(double lo, double hi) {
  return ParamBox(Vec::Constant(2, lo), Vec::Constant(2, hi));
}

Mat scalar(double v) { return Mat::Constant(1, 1, v); }

}  // namespace

QuadraticGame decoupled_quadratic_game(double a, double b, double lo, double hi) {
  return QuadraticGame(scalar(1), scalar(0), Vec::Constant(1, -a), scalar(1), scalar(0),
                       Vec::Constant(1, -b), square_box(lo, hi));
}

QuadraticGame bilinear_game(double lo, double hi) {
  return QuadraticGame(scalar(1), scalar(1), Vec::Zero(1), scalar(1), scalar(-1), Vec::Zero(1),
                       square_box(lo, hi));
}

QuadraticGame zero_sum_bilinear_game(double lo, double hi) {
  return QuadraticGame(scalar(0), scalar(1), Vec::Zero(1), scalar(0), scalar(-1), Vec::Zero(1),
                       square_box(lo, hi));
}

}  // namespace rpg
