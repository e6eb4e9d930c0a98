#include "rpg/pipeline.hpp"

#include "rpg/config.hpp"
#include "rpg/costs.hpp"
#include "rpg/errors.hpp"
#include "rpg/serialization.hpp"

#include <sstream>

namespace rpg {

TrainedGame train_game(const GameSpec& spec, const SolverConfig& solver) {
  const SvmGame game(spec);
  EquilibriumResult result = extragradient_solve(game, std::nullopt, solver);
  LearnerParams learner = unflatten_learner(result.theta_learner(), spec.dataset.k());
  return {std::move(result), std::move(learner)};
}

EvalSpec eval_spec_from_config(const Config& cfg, EvalSpec defaults) {
  EvalSpec out = std::move(defaults);
  if (const auto mode = cfg.find("attack")) out.attack.mode = attack_mode_from_string(*mode);
  out.attack.monotone_increase_only = cfg.get_int("monotone", out.attack.monotone_increase_only) != 0;
  out.d_max_list = cfg.get_double_list("d_max_list", out.d_max_list);
  out.repetitions = static_cast<int>(cfg.get_int("reps", out.repetitions));
  out.seed = static_cast<std::uint64_t>(cfg.get_int("eval_seed", static_cast<long long>(out.seed)));
  out.fp_target = cfg.get_double("fp", out.fp_target);
  return out;
}

void GridSpec::validate() const {
  for (const auto* g : {&rho_l_grid, &rho_d_grid, &W_grid}) {
    if (g->empty()) throw DomainError("parameter grids must be non-empty");
    for (double v : *g)
      if (!(v > 0.0)) throw DomainError("grid values must be positive");
  }
}

GridSpec grid_spec_from_config(const Config& cfg) {
  GridSpec g;
  g.rho_l_grid = cfg.get_double_list("rho_l_grid", g.rho_l_grid);
  g.rho_d_grid = cfg.get_double_list("rho_d_grid", g.rho_d_grid);
  g.W_grid = cfg.get_double_list("W_grid", g.W_grid);
  g.validate();
  return g;
}

std::vector<GridCell> grid_search(const Dataset& train, const Dataset& val, const GridSpec& grid,
                                  double bias_eps, const SolverConfig& solver,
                                  const EvalSpec& eval) {
  grid.validate();
  const AttackSpec attack = with_dataset_box(eval.attack, val);
  std::vector<GridCell> cells;
  for (double rho_l : grid.rho_l_grid)
    for (double rho_d : grid.rho_d_grid)
      for (double W : grid.W_grid) {
        const TrainedGame t = train_game(make_game(train, rho_l, rho_d, W, bias_eps), solver);
        GridCell cell;
        cell.rho_l = rho_l;
        cell.rho_d = rho_d;
        cell.W = W;
        cell.iterations = t.result.iterations;
        cell.converged = t.result.converged;
        cell.curve = security_curve(t.classifier, val, attack, eval.d_max_list, eval.repetitions,
                                    eval.seed, eval.fp_target);
        cell.auc = cell.curve.auc();
        cells.push_back(std::move(cell));
      }
  return cells;
}

std::size_t select_best(const std::vector<GridCell>& cells) {
  if (cells.empty()) throw DomainError("no grid cells");
  std::size_t best = 0;
  for (std::size_t i = 1; i < cells.size(); ++i)
    if (cells[i].auc > cells[best].auc) best = i;
  return best;
}

std::string grid_csv(const std::vector<GridCell>& cells) {
  const std::size_t best = select_best(cells);
  std::ostringstream out;
  out << "rho_l,rho_d,W,auc,iterations,converged,selected\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const GridCell& c = cells[i];
    out << format_double(c.rho_l) << ',' << format_double(c.rho_d) << ',' << format_double(c.W)
        << ',' << format_double(c.auc) << ',' << c.iterations << ',' << (c.converged ? 1 : 0) << ','
        << (i == best ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace rpg
