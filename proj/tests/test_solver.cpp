#include "doctest.h"

#include "rpg/config.hpp"
#include "rpg/costs.hpp"
#include "rpg/errors.hpp"
#include "rpg/solver.hpp"
#include "rpg/toy_games.hpp"

#include <random>

using namespace rpg;

TEST_CASE("bilinear toy game converges to the origin") {
  const QuadraticGame game = bilinear_game();
  Vec init(2);
  init << 0.8, -0.6;
  // The default squared-step tolerance (1e-10) stops at |theta| ~ 1e-5; tighten it.
  SolverConfig cfg;
  cfg.epsilon = 1e-16;
  const EquilibriumResult res = extragradient_solve(game, init, cfg);
  CHECK(res.converged);
  CHECK(res.termination == Termination::tolerance);
  CHECK(res.iterations <= 500);
  CHECK(res.theta.norm() <= 1e-6);
  CHECK(vi_residual(game, res.theta) <= 1e-6);
  CHECK(nash_verify(res, game, 5, 1e-6));
  CHECK(res.theta_learner().size() == 1);
  CHECK(res.residual_trace().size() == res.trace.size());
}

TEST_CASE("projected 1-D case converges to the box face") {
  // Learner wants 2 on [-1, 1] -> face at 1; attacker wants -0.5 (interior).
  const QuadraticGame game = decoupled_quadratic_game(2.0, -0.5, -1.0, 1.0);
  const EquilibriumResult res = extragradient_solve(game, std::nullopt);
  CHECK(res.converged);
  CHECK(res.theta(0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(res.theta(1) == doctest::Approx(-0.5).epsilon(1e-5));
  CHECK(vi_residual(game, res.theta) <= 1e-5);
}

TEST_CASE("linearized step rule: both players pushed onto faces") {
  const QuadraticGame game = decoupled_quadratic_game(2.0, -3.0, -1.0, 1.0);
  SolverConfig cfg;
  cfg.step_rule = StepRule::linearized;
  cfg.epsilon = 1e-20;
  const EquilibriumResult res = extragradient_solve(game, std::nullopt, cfg);
  CHECK(res.converged);
  CHECK(res.theta(0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(res.theta(1) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("both step rules agree on an interior equilibrium") {
  const QuadraticGame game = bilinear_game(-5.0, 5.0);
  Vec init(2);
  init << 0.4, 0.3;
  SolverConfig lin;
  lin.step_rule = StepRule::linearized;
  lin.epsilon = 1e-16;
  SolverConfig hyp = lin;
  hyp.step_rule = StepRule::hyperplane;
  const EquilibriumResult a = extragradient_solve(game, init, lin);
  const EquilibriumResult b = extragradient_solve(game, init, hyp);
  CHECK(a.theta.norm() <= 1e-6);
  CHECK(b.theta.norm() <= 1e-6);
  // Nothing clips, so the first step lengths coincide. (Later iterates can part ways by
  // rounding: on this game the line-search test holds with equality at t = 1.)
  CHECK(a.trace[0].step_size == doctest::Approx(b.trace[0].step_size).epsilon(1e-12));
}

TEST_CASE("zero-sum bilinear game (monotone, not strictly) still reaches the saddle") {
  const QuadraticGame game = zero_sum_bilinear_game();
  Vec init(2);
  init << 0.5, 0.5;
  SolverConfig cfg;
  cfg.max_iter = 20000;
  cfg.epsilon = 1e-16;
  const EquilibriumResult res = extragradient_solve(game, init, cfg);
  CHECK(res.theta.norm() <= 1e-4);
}

TEST_CASE("strongly monotone random quadratic games match the linear-system solution") {
  std::mt19937_64 rng(51);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Index dl = 1 + trial % 3, dd = 1 + (trial / 3) % 3;
    auto rnd = [&](Index r, Index c) {
      Mat m(r, c);
      for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < c; ++j) m(i, j) = z(rng);
      return m;
    };
    const Mat Ql = rnd(dl, dl), Qd = rnd(dd, dd);
    const Mat Al = Ql * Ql.transpose() + Mat::Identity(dl, dl);
    const Mat Ad = Qd * Qd.transpose() + Mat::Identity(dd, dd);
    const Mat Bl = 0.3 * rnd(dl, dd);
    const Mat Bd = -Bl.transpose() + 0.1 * rnd(dd, dl);
    const Vec al = rnd(dl, 1).col(0), ad = rnd(dd, 1).col(0);
    // Generous box so the equilibrium is interior.
    const Index d = dl + dd;
    const QuadraticGame game(Al, Bl, al, Ad, Bd, ad,
                             ParamBox(Vec::Constant(d, -100.0), Vec::Constant(d, 100.0)));
    Mat J(d, d);
    J << Al, Bl, Bd, Ad;
    Vec rhs(d);
    rhs << -al, -ad;
    const Vec exact = J.fullPivLu().solve(rhs);
    if (exact.cwiseAbs().maxCoeff() > 50.0) continue;
    SolverConfig cfg;
    cfg.max_iter = 50000;
    cfg.epsilon = 1e-24;
    const EquilibriumResult res = extragradient_solve(game, Vec::Zero(d), cfg);
    CHECK((res.theta - exact).norm() <= 1e-6 * (1.0 + exact.norm()));
  }
}

TEST_CASE("solver input validation") {
  const QuadraticGame game = bilinear_game();
  CHECK_THROWS_AS(extragradient_solve(game, Vec::Constant(2, 3.0)), DomainError);
  CHECK_THROWS_AS(extragradient_solve(game, Vec::Zero(3)), ShapeError);
  SolverConfig bad;
  bad.beta = 1.0;
  CHECK_THROWS_AS(extragradient_solve(game, std::nullopt, bad), DomainError);
  bad = {};
  bad.max_iter = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("solver reports max_iter when the budget runs out") {
  const QuadraticGame game = zero_sum_bilinear_game();
  SolverConfig cfg;
  cfg.max_iter = 3;
  cfg.epsilon = 1e-30;
  Vec init(2);
  init << 0.5, 0.5;
  const EquilibriumResult res = extragradient_solve(game, init, cfg);
  CHECK_FALSE(res.converged);
  CHECK(res.termination == Termination::max_iter);
  CHECK(res.iterations == 3);
  CHECK(to_string(res.termination) == "max_iter");
}

TEST_CASE("an already-optimal start terminates immediately") {
  const QuadraticGame game = bilinear_game();
  const EquilibriumResult res = extragradient_solve(game, Vec::Zero(2));
  CHECK(res.converged);
  CHECK(res.iterations == 1);
  CHECK(res.theta.norm() == 0.0);
}

TEST_CASE("solver config from config file keys") {
  const Config cfg = Config::parse("sigma_ls = 0.25\nbeta = 0.7\nmax_iter = 17\nseed = 9\n");
  const SolverConfig sc = solver_config_from(cfg);
  CHECK(sc.sigma_ls == 0.25);
  CHECK(sc.beta == 0.7);
  CHECK(sc.max_iter == 17);
  CHECK(sc.seed == 9);
  CHECK(sc.epsilon == 1e-10);
  CHECK(sc.step_rule == StepRule::hyperplane);
  CHECK(solver_config_from(Config::parse("step_rule = linearized")).step_rule ==
        StepRule::linearized);
  CHECK_THROWS_AS(solver_config_from(Config::parse("step_rule = other")), DomainError);
  CHECK_THROWS_AS(solver_config_from(Config::parse("sigma_ls = 2\n")), DomainError);
}

TEST_CASE("nash_check detects a non-equilibrium profile") {
  const QuadraticGame game = decoupled_quadratic_game(0.3, -0.2, -1.0, 1.0);
  Vec off(2);
  off << -0.9, 0.9;
  const NashCheck nc = nash_check(game, off, 3, 1e-6);
  CHECK_FALSE(nc.passed);
  // Closed-form improvements: (1/2)(a - x)^2 for each player.
  CHECK(nc.learner_improvement == doctest::Approx(0.5 * 1.2 * 1.2).epsilon(1e-6));
  CHECK(nc.attacker_improvement == doctest::Approx(0.5 * 1.1 * 1.1).epsilon(1e-6));
  Vec eq(2);
  eq << 0.3, -0.2;
  CHECK(nash_check(game, eq, 3, 1e-9).passed);
}

TEST_CASE("trace CSV layout") {
  const QuadraticGame game = bilinear_game();
  Vec init(2);
  init << 0.5, 0.5;
  const EquilibriumResult res = extragradient_solve(game, init);
  const std::string csv = trace_csv(res);
  CHECK(csv.rfind("iter,residual,step_size,linesearch_pow\n", 0) == 0);
  CHECK(static_cast<int>(std::count(csv.begin(), csv.end(), '\n')) == res.iterations + 1);
}

TEST_CASE("the SVM game equilibrium on a small dataset is a Nash point") {
  std::mt19937_64 rng(52);
  std::normal_distribution<double> z(0.0, 0.08);
  const Index n = 12;
  Mat x(n, 2);
  Vec y(n);
  for (Index i = 0; i < n; ++i) {
    y(i) = i < n / 2 ? -1.0 : 1.0;
    const double c = y(i) < 0 ? 0.3 : 0.7;
    x(i, 0) = std::clamp(c + z(rng), 0.0, 1.0);
    x(i, 1) = std::clamp(c + z(rng), 0.0, 1.0);
  }
  const SvmGame game(make_game(Dataset(x, y, FeatureKind::continuous_unit_interval), 10, 10, 0.1));
  const EquilibriumResult res = extragradient_solve(game, std::nullopt);
  CHECK(res.converged);
  CHECK(game.box().contains(res.theta));
  CHECK(res.iterations < 200);
  CHECK(vi_residual(game, res.theta) <= 1e-3);
  CHECK(nash_verify(res, game, 3, 1e-4));
}
