#include "doctest.h"

#include "rpg/config.hpp"
#include "rpg/costs.hpp"
#include "rpg/data_io.hpp"
#include "rpg/errors.hpp"
#include "rpg/pipeline.hpp"

#include <filesystem>
#include <random>
#include <set>

using namespace rpg;

namespace {

Dataset random_dataset(std::mt19937_64& rng, FeatureKind kind) {
  std::uniform_int_distribution<int> size(1, 12);
  const Index n = size(rng), k = size(rng);
  std::uniform_real_distribution<double> u(0, 1);
  std::normal_distribution<double> z(0, 100);
  std::bernoulli_distribution coin(0.3);
  Mat x(n, k);
  Vec y(n);
  for (Index i = 0; i < n; ++i) {
    y(i) = coin(rng) ? 1.0 : -1.0;
    for (Index j = 0; j < k; ++j) {
      switch (kind) {
        case FeatureKind::binary: x(i, j) = coin(rng); break;
        case FeatureKind::continuous_unit_interval: x(i, j) = coin(rng) ? 0.0 : u(rng); break;
        case FeatureKind::unbounded: x(i, j) = z(rng); break;
      }
    }
  }
  return Dataset(x, y, kind);
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("rpg_test_" + name)).string();
}

}  // namespace

TEST_CASE("dense CSV format") {
  const Dataset d = parse_dense_csv("+1,0.5,0.25\n");
  CHECK(d.n() == 1);
  CHECK(d.k() == 2);
  CHECK(d.y(0) == 1.0);
  CHECK(d.features()(0, 1) == 0.25);
  CHECK(d.kind() == FeatureKind::continuous_unit_interval);

  const Dataset c = parse_dense_csv("# comment\n\n-1, 3, 4\n1,-2,0\n");
  CHECK(c.n() == 2);
  CHECK(c.kind() == FeatureKind::unbounded);
  CHECK(parse_dense_csv("-1,0,1\n").kind() == FeatureKind::binary);
  CHECK(parse_dense_csv("-1,0,1\n", FeatureKind::continuous_unit_interval).kind() ==
        FeatureKind::continuous_unit_interval);
}

TEST_CASE("dense CSV errors carry line numbers") {
  auto line_of = [](const char* text) -> std::size_t {
    try {
      parse_dense_csv(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("1,0.5\n2,0.5\n") == 2);
  CHECK(line_of("1,0.5\n\n0,0.5\n") == 3);
  CHECK(line_of("1,0.5\n-1,abc\n") == 2);
  CHECK(line_of("1,0.5\n-1,0.5,0.5\n") == 2);
  CHECK(line_of("1\n") == 1);
  CHECK(line_of("+1,nan\n") == 1);
  CHECK_THROWS_AS(parse_dense_csv(""), ParseError);
}

TEST_CASE("sparse format") {
  const Dataset d = parse_sparse("-1 3:1 7:1\n", Index{10});
  CHECK(d.k() == 10);
  CHECK(d.kind() == FeatureKind::binary);
  for (Index j = 0; j < 10; ++j) CHECK(d.features()(0, j) == (j == 2 || j == 6 ? 1.0 : 0.0));

  const Dataset inferred = parse_sparse("+1 2:0.5\n-1 5:0.25\n-1\n");
  CHECK(inferred.k() == 5);
  CHECK(inferred.n() == 3);
  CHECK(inferred.features().row(2).isZero());
  CHECK(parse_sparse("# k=8\n+1 2:1\n").k() == 8);
  CHECK(parse_sparse("# k=8\n+1 2:1\n", Index{3}).k() == 3);

  auto line_of = [](const char* text, std::optional<Index> k = std::nullopt) -> std::size_t {
    try {
      parse_sparse(text, k);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("+1 1:1\n0 2:1\n") == 2);
  CHECK(line_of("+1 0:1\n") == 1);
  CHECK(line_of("+1 3:1 2:1\n") == 1);
  CHECK(line_of("+1 1:1\n-1 1:x\n") == 2);
  CHECK(line_of("+1 1:1\n-1 11:1\n", Index{10}) == 2);
  CHECK(line_of("+1 1-1\n") == 1);
}

TEST_CASE("format detection") {
  CHECK(looks_sparse("-1 3:1\n"));
  CHECK(looks_sparse("-1\n+1 2:1\n"));
  CHECK(looks_sparse("# k=3\n-1\n"));
  CHECK_FALSE(looks_sparse("-1,0.5\n"));
  CHECK(parse_dataset("-1 2:1\n").k() == 2);
  CHECK(parse_dataset("-1,0.2,0.3,0.4\n").k() == 3);
}

TEST_CASE("save then load is the identity") {
  std::mt19937_64 rng(301);
  const std::string dense = temp_path("dense.csv"), sparse = temp_path("sparse.txt");
  for (int t = 0; t < 20; ++t) {
    const FeatureKind kind = t % 3 == 0   ? FeatureKind::binary
                             : t % 3 == 1 ? FeatureKind::continuous_unit_interval
                                          : FeatureKind::unbounded;
    const Dataset d = random_dataset(rng, kind);
    save_dense_csv(dense, d);
    const Dataset a = load_dense_csv(dense, kind);
    CHECK(a.features() == d.features());
    CHECK(a.labels() == d.labels());
    save_sparse(sparse, d);
    const Dataset b = load_sparse(sparse, std::nullopt, kind);
    CHECK(b.features() == d.features());
    CHECK(b.labels() == d.labels());
    CHECK(load_dataset(sparse).features() == d.features());
    CHECK(load_dataset(dense).features() == d.features());
  }
  std::filesystem::remove(dense);
  std::filesystem::remove(sparse);
  CHECK_THROWS_AS(load_dense_csv(temp_path("missing.csv")), IoError);
}

TEST_CASE("normalization to the unit interval") {
  Mat x(3, 2);
  x << 0, 5, 127.5, 5, 255, 5;
  Vec y(3);
  y << 1, -1, 1;
  const Normalized norm = normalize_unit_interval(Dataset(x, y, FeatureKind::unbounded));
  CHECK(norm.data.features()(0, 0) == 0.0);
  CHECK(norm.data.features()(1, 0) == 0.5);
  CHECK(norm.data.features()(2, 0) == 1.0);
  CHECK(norm.data.features().col(1).isZero());
  CHECK(norm.data.kind() == FeatureKind::continuous_unit_interval);

  // Test data outside the training range is clamped.
  Mat t(2, 2);
  t << -10, 7, 300, 5;
  Vec ty(2);
  ty << 1, -1;
  const Dataset scaled = norm.scaling.apply(Dataset(t, ty, FeatureKind::unbounded));
  CHECK(scaled.features()(0, 0) == 0.0);
  CHECK(scaled.features()(1, 0) == 1.0);
  CHECK(scaled.features().col(1).isZero());
  CHECK_THROWS_AS(norm.scaling.apply(Dataset(Mat::Zero(1, 3), Vec::Ones(1), FeatureKind::unbounded)),
                  ShapeError);
}

TEST_CASE("synthetic 2-D generator") {
  const Dataset d = synth_2d(30, 0.4, 7);
  CHECK(d.n() == 60);
  CHECK(d.k() == 2);
  CHECK(d.count_label(1.0) == 30);
  CHECK(d.count_label(-1.0) == 30);
  CHECK(d.features().minCoeff() >= 0.0);
  CHECK(d.features().maxCoeff() <= 1.0);
  CHECK(synth_2d(30, 0.4, 7).features() == d.features());
  CHECK(synth_2d(30, 0.4, 8).features() != d.features());
  // Class means near their centers.
  const Vec legit = d.features().topRows(30).colwise().mean().transpose();
  const Vec mal = d.features().bottomRows(30).colwise().mean().transpose();
  CHECK((legit.array() - 0.3).abs().maxCoeff() < 0.05);
  CHECK((mal.array() - 0.7).abs().maxCoeff() < 0.05);
  CHECK_THROWS_AS(synth_2d(0, 0.4, 1), DomainError);
}

TEST_CASE("baseline SVM separates synthetic data with separation 0.4") {
  const BaselineSvm svm = train_baseline_svm(synth_2d(100, 0.4, 11), 1.0);
  const Dataset test = synth_2d(1000, 0.4, 12);
  int correct = 0;
  for (Index i = 0; i < test.n(); ++i)
    correct += (svm.w.dot(test.x(i)) + svm.b > 0 ? 1.0 : -1.0) == test.y(i);
  CHECK(correct > 0.95 * static_cast<double>(test.n()));
}

TEST_CASE("splits") {
  Mat x(20, 1);
  Vec y(20);
  for (Index i = 0; i < 20; ++i) {
    x(i, 0) = static_cast<double>(i);
    y(i) = i % 2 ? 1.0 : -1.0;
  }
  const Dataset d(x, y, FeatureKind::unbounded);
  SplitSpec spec{8, 5, 4, 3, false};
  const Split s = split_dataset(d, spec);
  REQUIRE(s.val);
  REQUIRE(s.test);
  std::set<double> seen;
  for (const Dataset* part : {&s.train, &*s.val, &*s.test})
    for (Index i = 0; i < part->n(); ++i) seen.insert(part->features()(i, 0));
  CHECK(seen.size() == 17);
  CHECK(s.train.n() == 8);
  CHECK(split_dataset(d, spec).train.features() == s.train.features());

  spec.chronological = true;
  const Split c = split_dataset(d, spec);
  for (Index i = 0; i < 8; ++i) CHECK(c.train.features()(i, 0) == static_cast<double>(i));
  CHECK(c.val->features()(0, 0) == 8.0);
  CHECK(c.test->features()(0, 0) == 13.0);

  CHECK_FALSE(split_dataset(d, SplitSpec{20, 0, 0, 0, false}).val);
  CHECK_THROWS_AS(split_dataset(d, SplitSpec{10, 10, 1, 0, false}), DomainError);
  CHECK_THROWS_AS(split_dataset(d, SplitSpec{0, 10, 1, 0, false}), DomainError);
}

TEST_CASE("grid selection and configuration") {
  std::vector<GridCell> cells(3);
  cells[0].auc = 0.2;
  cells[1].auc = 0.5;
  cells[2].auc = 0.5;
  CHECK(select_best(cells) == 1);
  const std::string csv = grid_csv(cells);
  CHECK(csv.rfind("rho_l,rho_d,W,auc,iterations,converged,selected\n", 0) == 0);
  CHECK(csv.find("0.5,0,0,1\n") != std::string::npos);
  CHECK_THROWS_AS(select_best({}), DomainError);

  const GridSpec defaults;
  CHECK(defaults.rho_l_grid == std::vector<double>{0.01, 0.1, 1, 10, 100});
  CHECK(defaults.rho_d_grid == std::vector<double>{0.01, 0.05, 0.1, 1, 10});
  CHECK(defaults.W_grid == std::vector<double>{0.01, 0.05, 0.1, 1});
  const GridSpec g = grid_spec_from_config(Config::parse("rho_l_grid = 1, 2\nW_grid = 0.5\n"));
  CHECK(g.rho_l_grid == std::vector<double>{1, 2});
  CHECK(g.W_grid == std::vector<double>{0.5});
  CHECK_THROWS_AS(grid_spec_from_config(Config::parse("W_grid = -1\n")), DomainError);

  const EvalSpec e = eval_spec_from_config(
      Config::parse("attack = binary_flip\nmonotone = 1\nd_max_list = 0,1,2\nreps = 3\nfp = 0.05\n"));
  CHECK(e.attack.mode == AttackMode::binary_flip);
  CHECK(e.attack.monotone_increase_only);
  CHECK(e.d_max_list == std::vector<double>{0, 1, 2});
  CHECK(e.repetitions == 3);
  CHECK(e.fp_target == 0.05);
}

TEST_CASE("grid search picks the best AUC cell and is deterministic") {
  const Dataset train = synth_2d(20, 0.4, 21), val = synth_2d(100, 0.4, 22);
  GridSpec grid;
  grid.rho_l_grid = {1, 10};
  grid.rho_d_grid = {1};
  grid.W_grid = {0.1, 1};
  EvalSpec eval;
  eval.d_max_list = {0.0, 0.25, 0.5};
  const auto cells = grid_search(train, val, grid, 0.0, SolverConfig{}, eval);
  REQUIRE(cells.size() == 4);
  CHECK(cells[1].rho_l == 1);
  CHECK(cells[1].W == 1);
  CHECK(cells[2].rho_l == 10);
  for (const GridCell& c : cells) {
    CHECK(c.converged);
    CHECK(c.auc == c.curve.auc());
    CHECK(c.auc <= cells[select_best(cells)].auc);
  }
  CHECK(grid_csv(grid_search(train, val, grid, 0.0, SolverConfig{}, eval)) == grid_csv(cells));
}

TEST_CASE("train_game returns the learner block of the equilibrium") {
  const GameSpec spec = make_game(synth_2d(15, 0.4, 31), 10, 10, 0.5);
  const TrainedGame t = train_game(spec);
  CHECK(t.result.converged);
  CHECK(t.classifier.k() == 2);
  CHECK(t.classifier.mu_w == t.result.theta.head(3));
  CHECK(t.classifier.sigma_w == t.result.theta.segment(3, 3));
}
