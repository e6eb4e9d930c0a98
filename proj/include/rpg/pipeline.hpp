#pragma once

#include "rpg/attack.hpp"
#include "rpg/game_model.hpp"
#include "rpg/solver.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rpg {

class Config;

struct TrainedGame {
  EquilibriumResult result;
  LearnerParams classifier;
};

/// Solves the SVM game from its default initial point and extracts the learner's strategy.
TrainedGame train_game(const GameSpec& spec, const SolverConfig& solver = {});

/// How classifiers are scored: security curve of the attack over d_max_list.
struct EvalSpec {
  AttackSpec attack;  // d_max is overwritten per curve point
  std::vector<double> d_max_list{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  int repetitions = 1;
  std::uint64_t seed = 0;
  double fp_target = 0.01;
};

/// Keys attack (mode name), monotone (0/1), d_max_list, reps, eval_seed, fp.
EvalSpec eval_spec_from_config(const Config& cfg, EvalSpec defaults = {});

struct GridSpec {
  std::vector<double> rho_l_grid{0.01, 0.1, 1, 10, 100};
  std::vector<double> rho_d_grid{0.01, 0.05, 0.1, 1, 10};
  std::vector<double> W_grid{0.01, 0.05, 0.1, 1};

  void validate() const;
};

/// Keys rho_l_grid, rho_d_grid, W_grid (comma-separated).
GridSpec grid_spec_from_config(const Config& cfg);

struct GridCell {
  double rho_l = 0.0;
  double rho_d = 0.0;
  double W = 0.0;
  double auc = 0.0;
  int iterations = 0;
  bool converged = false;
  SecurityCurve curve;
};

/// Trains one game per grid cell (rho_l outermost, W innermost) on `train` and evaluates the
/// expected classifier on `val`.
std::vector<GridCell> grid_search(const Dataset& train, const Dataset& val, const GridSpec& grid,
                                  double bias_eps, const SolverConfig& solver,
                                  const EvalSpec& eval);

/// Index of the largest AUC; ties go to the earliest cell.
std::size_t select_best(const std::vector<GridCell>& cells);

/// Columns rho_l,rho_d,W,auc,iterations,converged,selected.
std::string grid_csv(const std::vector<GridCell>& cells);

}  // namespace rpg
