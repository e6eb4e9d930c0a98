#include "doctest.h"

#include "rpg/config.hpp"
#include "rpg/errors.hpp"
#include "rpg/game_model.hpp"
#include "rpg/serialization.hpp"

#include <filesystem>
#include <random>

using namespace rpg;

namespace {

Mat random_mat(Index r, Index c, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Mat m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = u(rng);
  return m;
}

Dataset tiny_dataset() {
  Mat x(3, 2);
  x << 0.1, 0.2, 0.5, 0.5, 0.9, 0.0;
  Vec y(3);
  y << 1, -1, 1;
  return Dataset(x, y, FeatureKind::continuous_unit_interval);
}

}  // namespace

TEST_CASE("dataset validates shapes, labels and feature ranges") {
  Mat x(2, 2);
  x << 0.1, 0.2, 0.3, 0.4;
  Vec y(2);
  y << 1, -1;
  CHECK_NOTHROW(Dataset(x, y, FeatureKind::continuous_unit_interval));
  CHECK_THROWS_AS(Dataset(x, Vec::Ones(3), FeatureKind::continuous_unit_interval), ShapeError);
  Vec bad = y;
  bad(0) = 0.0;
  CHECK_THROWS_AS(Dataset(x, bad, FeatureKind::continuous_unit_interval), DomainError);
  CHECK_THROWS_AS(Dataset(x, y, FeatureKind::binary), DomainError);
  Mat big = x;
  big(1, 1) = 1.5;
  CHECK_THROWS_AS(Dataset(big, y, FeatureKind::continuous_unit_interval), DomainError);
  CHECK_NOTHROW(Dataset(big, y, FeatureKind::unbounded));
  Mat nan = x;
  nan(0, 0) = std::nan("");
  CHECK_THROWS_AS(Dataset(nan, y, FeatureKind::unbounded), NumericError);
  CHECK_THROWS_AS(Dataset(Mat(0, 2), Vec(0), FeatureKind::unbounded), ShapeError);
}

TEST_CASE("dataset subset keeps order and counts labels") {
  const Dataset d = tiny_dataset();
  CHECK(d.count_label(1.0) == 2);
  CHECK(d.count_label(-1.0) == 1);
  const Dataset s = d.subset({2, 0});
  CHECK(s.n() == 2);
  CHECK(s.features()(0, 0) == doctest::Approx(0.9));
  CHECK(s.y(1) == 1.0);
  CHECK_THROWS_AS(d.subset({3}), ShapeError);
}

TEST_CASE("parameter structs reject bad shapes and non-positive deviations") {
  CHECK_THROWS_AS(LearnerParams(Vec::Zero(1), Vec::Ones(1)), ShapeError);
  CHECK_THROWS_AS(LearnerParams(Vec::Zero(3), Vec::Ones(2)), ShapeError);
  Vec s = Vec::Ones(3);
  s(1) = 0.0;
  CHECK_THROWS_AS(LearnerParams(Vec::Zero(3), s), DomainError);
  CHECK_THROWS_AS(AttackerParams(Mat::Zero(2, 3), Mat::Ones(3, 2)), ShapeError);
  Mat sx = Mat::Ones(2, 3);
  sx(1, 2) = -1.0;
  CHECK_THROWS_AS(AttackerParams(Mat::Zero(2, 3), sx), DomainError);
}

TEST_CASE("flatten and unflatten are inverse (property, random shapes)") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<Index> dim(1, 8);
  for (int trial = 0; trial < 200; ++trial) {
    const Index k = dim(rng);
    const Index n = dim(rng);
    const LearnerParams l(random_mat(k + 1, 1, rng, -1, 1).col(0),
                          random_mat(k + 1, 1, rng, 0.01, 1).col(0));
    const AttackerParams a(random_mat(n, k, rng, 0, 1), random_mat(n, k, rng, 0.01, 1));
    const GameLayout lay{k, n};
    const Vec v = flatten(l, a);
    REQUIRE(v.size() == lay.dim());
    const auto [l2, a2] = unflatten(v, lay);
    CHECK(l2.mu_w == l.mu_w);
    CHECK(l2.sigma_w == l.sigma_w);
    CHECK(a2.mu_x == a.mu_x);
    CHECK(a2.sigma_x == a.sigma_x);
    // Layout offsets point at each sample's mean block.
    const Index i = n - 1;
    CHECK(v.segment(lay.sample_offset(i), k) == a.mu_x.row(i).transpose());
    CHECK(v.segment(lay.sample_offset(i) + k, k) == a.sigma_x.row(i).transpose());
  }
  CHECK_THROWS_AS(unflatten(Vec::Zero(5), GameLayout{1, 1}), ShapeError);
}

TEST_CASE("project_box lands in the box, is idempotent and is the nearest point") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Index d = 1 + trial % 9;
    const Vec lo = random_mat(d, 1, rng, -1, 0).col(0);
    const Vec hi = lo + random_mat(d, 1, rng, 0, 2).col(0);
    const ParamBox box(lo, hi);
    const Vec v = random_mat(d, 1, rng, -4, 4).col(0);
    const Vec p = project_box(v, box);
    CHECK(box.contains(p));
    CHECK(project_box(p, box) == p);
    // Brute-force check: no random box point is closer to v.
    for (int s = 0; s < 50; ++s) {
      Vec q(d);
      for (Index j = 0; j < d; ++j) q(j) = std::uniform_real_distribution<double>(lo(j), hi(j))(rng);
      CHECK((v - p).norm() <= (v - q).norm() + 1e-15);
    }
  }
  CHECK_THROWS_AS(ParamBox(Vec::Ones(2), Vec::Zero(2)), DomainError);
}

TEST_CASE("default boxes") {
  const auto [lbox, dbox] = default_boxes(2, 3, 0.1);
  CHECK(lbox.dim() == 6);
  CHECK(dbox.dim() == 12);
  CHECK(lbox.lower(0) == -0.1);
  CHECK(lbox.upper(2) == 0.1);
  CHECK(lbox.lower(3) == bounds::learner_sigma_lower);
  CHECK(lbox.upper(5) == bounds::learner_sigma_upper);
  CHECK(dbox.lower(0) == 0.0);
  CHECK(dbox.upper(1) == 1.0);
  CHECK(dbox.lower(2) == bounds::attacker_sigma_lower);
  CHECK(dbox.upper(11) == bounds::attacker_sigma_upper);
  CHECK_THROWS_AS(default_boxes(2, 3, 0.0), DomainError);
}

TEST_CASE("game spec validation") {
  CHECK_THROWS_AS(make_game(tiny_dataset(), 0.0, 1.0, 0.1), DomainError);
  CHECK_THROWS_AS(make_game(tiny_dataset(), 1.0, -1.0, 0.1), DomainError);
  CHECK_THROWS_AS(make_game(tiny_dataset(), 1.0, 1.0, 0.1, -1.0), DomainError);
  const GameSpec g = make_game(tiny_dataset(), 2.0, 3.0, 0.5);
  CHECK(g.joint_box().dim() == g.layout().dim());
}

TEST_CASE("config parsing and game config round trip") {
  const Config cfg = Config::parse("# comment\nrho_l = 10\n\nrho_d=2.5\nW = 0.2\nlist = 1, 2,3\n");
  CHECK(cfg.get_double("rho_l", 0) == 10.0);
  CHECK(cfg.get_double("rho_d", 0) == 2.5);
  CHECK(cfg.get_double("missing", 4.0) == 4.0);
  CHECK(cfg.get_double_list("list", {}) == std::vector<double>{1, 2, 3});
  CHECK_THROWS_AS(Config::parse("novalue\n"), ParseError);
  try {
    Config::parse("a = 1\nb = x\n").get_double("b", 0);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(Config::parse("n = 1.5").get_int("n", 0), ParseError);

  const GameSpec g = game_spec_from_config(cfg, tiny_dataset());
  CHECK(g.rho_l == 10.0);
  CHECK(g.learner_box.upper(0) == 0.2);
  const GameSpec g2 = game_spec_from_config(game_config(g), tiny_dataset());
  CHECK(g2.rho_d == g.rho_d);
  CHECK(g2.learner_box.lower == g.learner_box.lower);
  CHECK(g2.attacker_box.upper == g.attacker_box.upper);
}

TEST_CASE("number formatting round-trips exactly") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(i % 40) - 20);
    double back = 0;
    REQUIRE(parse_double(format_double(v), back));
    CHECK(back == v);
  }
  double tmp = 0;
  CHECK_FALSE(parse_double("1.0x", tmp));
  CHECK_FALSE(parse_double("", tmp));
  CHECK(parse_double(" +2.5 ", tmp));
  CHECK(tmp == 2.5);
}

TEST_CASE("parameter files round-trip and reject malformed input") {
  std::mt19937_64 rng(5);
  const GameLayout lay{3, 4};
  const Vec theta = random_mat(lay.dim(), 1, rng, 0.01, 1).col(0);
  const ParamsFile pf = parse_params_csv(params_csv(theta, lay));
  CHECK(pf.theta == theta);
  CHECK(pf.layout.k == 3);
  CHECK(pf.layout.n == 4);
  CHECK(pf.learner().mu_w == theta.head(4));

  CHECK_THROWS_AS(parse_params_csv("1,2,3\n"), ParseError);
  CHECK_THROWS_AS(parse_params_csv("# rpg-params k=1 n=0\n1,2,3\n"), ParseError);
  CHECK_THROWS_AS(parse_params_csv("# rpg-params k=1 n=0\n1,a,3,4\n"), ParseError);

  const auto dir = std::filesystem::temp_directory_path() / "rpg_test_params";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "p.csv").string();
  save_params(path, theta, lay);
  CHECK(load_params(path).theta == theta);
  CHECK_THROWS_AS(load_params((dir / "missing.csv").string()), IoError);
  std::filesystem::remove_all(dir);
}
