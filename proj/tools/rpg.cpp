// rpg: command-line front end for training, attacking and evaluating randomized prediction games.

#include "rpg/attack.hpp"
#include "rpg/config.hpp"
#include "rpg/costs.hpp"
#include "rpg/data_io.hpp"
#include "rpg/diagnostics.hpp"
#include "rpg/errors.hpp"
#include "rpg/pipeline.hpp"
#include "rpg/serialization.hpp"
#include "rpg/solver.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace rpg;

constexpr int kExitNotConverged = 2;
constexpr int kExitNotCertified = 3;
constexpr int kExitUsage = 64;
constexpr int kExitFile = 66;

// A dataset path from a config file is relative to the config's directory.
std::string resolve(const std::string& config_path, const std::string& value) {
  const std::filesystem::path p(value);
  if (p.is_absolute() || config_path.empty()) return value;
  return (std::filesystem::path(config_path).parent_path() / p).string();
}

// Data named by --data, else by the config's `data` key, else synth_2d from the synth_* keys.
Dataset game_data(const Config& cfg, const std::string& cfg_path, const std::string& data_flag) {
  if (!data_flag.empty()) return load_dataset(data_flag);
  if (const auto path = cfg.find("data")) return load_dataset(resolve(cfg_path, *path));
  return synth_2d(cfg.get_int("synth_n", 10), cfg.get_double("synth_sep", 0.4),
                  static_cast<std::uint64_t>(cfg.get_int("synth_seed", 0)));
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  for (std::string_view tok : split(text, ',')) {
    double v = 0.0;
    if (!parse_double(tok, v)) throw DomainError(std::string(flag) + ": bad number '" + std::string(tok) + "'");
    out.push_back(v);
  }
  return out;
}

struct TrainArgs {
  std::string game, data, out, trace;
};

int run_train(const TrainArgs& a) {
  const Config cfg = Config::load(a.game);
  const GameSpec spec = game_spec_from_config(cfg, game_data(cfg, a.game, a.data));
  const TrainedGame t = train_game(spec, solver_config_from(cfg));
  save_params(a.out, t.result.theta, spec.layout());
  if (!a.trace.empty()) write_file_atomic(a.trace, trace_csv(t.result));
  const double residual = t.result.trace.empty() ? 0.0 : t.result.trace.back().residual;
  std::cout << "iterations = " << t.result.iterations << "\n"
            << "residual = " << format_double(residual) << "\n"
            << "termination = " << to_string(t.result.termination) << "\n";
  return t.result.converged ? 0 : kExitNotConverged;
}

struct BaselineArgs {
  std::string data, out;
  double C = 1.0;
  std::uint64_t seed = 0;
};

int run_train_baseline(const BaselineArgs& a) {
  const Dataset data = load_dataset(a.data);
  BaselineOptions opts;
  opts.seed = a.seed;
  const BaselineSvm svm = train_baseline_svm(data, a.C, opts);
  save_learner(a.out, as_learner_params(svm));
  std::cout << "objective = " << format_double(svm.objective) << "\n";
  return 0;
}

struct AttackArgs {
  std::string params, data, out, mode = "l2_box_pgd";
  double dmax = 0.0;
  bool monotone = false;
};

int run_attack(const AttackArgs& a) {
  const LearnerParams classifier = load_params(a.params).learner();
  const Dataset data = load_dataset(a.data);
  AttackSpec spec;
  spec.mode = attack_mode_from_string(a.mode);
  spec.d_max = a.dmax;
  spec.monotone_increase_only = a.monotone;
  spec = with_dataset_box(spec, data);
  const Dataset attacked = attack_dataset(classifier, data, spec);
  if (a.out.empty())
    std::cout << dense_csv(attacked);
  else
    save_dense_csv(a.out, attacked);
  return 0;
}

struct EvalArgs {
  std::string params, data, out, dmax_list = "0,0.1,0.2,0.3,0.4,0.5", mode = "l2_box_pgd";
  double fp = 0.01;
  int reps = 1;
  std::uint64_t seed = 0;
  bool monotone = false;
};

int run_secure_eval(const EvalArgs& a) {
  const LearnerParams classifier = load_params(a.params).learner();
  const Dataset data = load_dataset(a.data);
  AttackSpec spec;
  spec.mode = attack_mode_from_string(a.mode);
  spec.monotone_increase_only = a.monotone;
  spec = with_dataset_box(spec, data);
  const SecurityCurve curve = security_curve(classifier, data, spec, parse_list(a.dmax_list, "--dmax-list"),
                                             a.reps, a.seed, a.fp);
  write_file_atomic(a.out, curve_csv(curve));
  std::cout << "auc = " << format_double(curve.auc()) << "\n";
  return 0;
}

struct CheckArgs {
  std::string game, data, csv, method = "gradient";
  int profiles = 50;
  int pairs = 200;
  std::uint64_t seed = 0;
};

int run_check_eq(const CheckArgs& a) {
  const Config cfg = Config::load(a.game);
  const SvmGame game(game_spec_from_config(cfg, game_data(cfg, a.game, a.data)));
  DiagnosticsOptions opts;
  opts.n_pairs = a.pairs;
  if (a.method == "gradient")
    opts.method = JacobianMethod::gradient_differences;
  else if (a.method == "cost")
    opts.method = JacobianMethod::cost_differences;
  else
    throw DomainError("--method must be 'gradient' or 'cost'");
  const DiagnosticsReport report = uniqueness_margin(game, a.profiles, a.seed, opts);
  std::cout << report_text(report);
  if (!a.csv.empty()) write_file_atomic(a.csv, report_csv(report));
  return report.certified() ? 0 : kExitNotCertified;
}

struct GridArgs {
  std::string grids, out, curves;
};

int run_grid_search(const GridArgs& a) {
  const Config cfg = Config::load(a.grids);
  const GridSpec grid = grid_spec_from_config(cfg);
  std::optional<Dataset> train, val;
  if (const auto v = cfg.find("val")) {
    train = game_data(cfg, a.grids, "");
    val = load_dataset(resolve(a.grids, *v));
  } else {
    // Split one dataset into training and validation parts.
    const Dataset all = game_data(cfg, a.grids, "");
    SplitSpec split;
    split.train_n = cfg.get_int("train_n", all.n() / 2);
    split.val_n = cfg.get_int("val_n", all.n() - split.train_n);
    split.seed = static_cast<std::uint64_t>(cfg.get_int("split_seed", 0));
    split.chronological = cfg.get_int("chronological", 0) != 0;
    Split parts = split_dataset(all, split);
    if (!parts.val) throw DomainError("grid search needs a validation set (val_n > 0)");
    train = std::move(parts.train);
    val = std::move(*parts.val);
  }
  const std::vector<GridCell> cells = grid_search(*train, *val, grid, cfg.get_double("bias_eps", 0.0),
                                                  solver_config_from(cfg), eval_spec_from_config(cfg));
  write_file_atomic(a.out, grid_csv(cells));
  if (!a.curves.empty()) {
    std::filesystem::create_directories(a.curves);
    for (std::size_t i = 0; i < cells.size(); ++i)
      write_file_atomic((std::filesystem::path(a.curves) / ("curve_" + std::to_string(i) + ".csv")).string(),
                        curve_csv(cells[i].curve));
  }
  const GridCell& best = cells[select_best(cells)];
  std::cout << "rho_l = " << format_double(best.rho_l) << "\n"
            << "rho_d = " << format_double(best.rho_d) << "\n"
            << "W = " << format_double(best.W) << "\n"
            << "auc = " << format_double(best.auc) << "\n";
  return 0;
}

struct SynthArgs {
  std::string out;
  long long n = 100;
  double sep = 0.4;
  std::uint64_t seed = 0;
};

int run_gen_synth(const SynthArgs& a) {
  save_dense_csv(a.out, synth_2d(a.n, a.sep, a.seed));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized prediction games: training, attacks and security evaluation", "rpg"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Solve the game and write the equilibrium parameters");
  c_train->add_option("--game", train.game, "Game config (key = value)")->required();
  c_train->add_option("--data", train.data, "Training data (dense CSV or sparse)");
  c_train->add_option("--out", train.out, "Output parameter CSV")->required();
  c_train->add_option("--trace", train.trace, "Optional per-iteration trace CSV");

  BaselineArgs base;
  auto* c_base = app.add_subcommand("train-baseline", "Train a deterministic linear SVM");
  c_base->add_option("--data", base.data, "Training data")->required();
  c_base->add_option("--C", base.C, "SVM trade-off C > 0")->required();
  c_base->add_option("--out", base.out, "Output parameter CSV")->required();
  c_base->add_option("--seed", base.seed, "Seed for the random restarts");

  AttackArgs att;
  auto* c_att = app.add_subcommand("attack", "Attack the malicious samples of a dataset");
  c_att->add_option("--params", att.params, "Classifier parameter CSV")->required();
  c_att->add_option("--data", att.data, "Data to attack")->required();
  c_att->add_option("--dmax", att.dmax, "Attack budget")->required();
  c_att->add_option("--mode", att.mode, "l2_closed_form | l2_box_pgd | binary_flip");
  c_att->add_flag("--monotone", att.monotone, "Features may only increase");
  c_att->add_option("--out", att.out, "Output CSV (stdout if omitted)");

  EvalArgs ev;
  auto* c_ev = app.add_subcommand("secure-eval", "Security evaluation curve (TP at fixed FP vs d_max)");
  c_ev->add_option("--params", ev.params, "Classifier parameter CSV")->required();
  c_ev->add_option("--data", ev.data, "Test data")->required();
  c_ev->add_option("--dmax-list", ev.dmax_list, "Comma-separated increasing budgets");
  c_ev->add_option("--fp", ev.fp, "False-positive rate");
  c_ev->add_option("--reps", ev.reps, "Number of disjoint test folds");
  c_ev->add_option("--seed", ev.seed, "Fold seed");
  c_ev->add_option("--mode", ev.mode, "Attack mode");
  c_ev->add_flag("--monotone", ev.monotone, "Features may only increase");
  c_ev->add_option("--out", ev.out, "Output curve CSV")->required();

  CheckArgs chk;
  auto* c_chk = app.add_subcommand("check-eq", "Sampled uniqueness diagnostics; exit 3 if not certified");
  c_chk->add_option("--game", chk.game, "Game config")->required();
  c_chk->add_option("--data", chk.data, "Data (overrides the config)");
  c_chk->add_option("--profiles", chk.profiles, "Sampled profiles");
  c_chk->add_option("--pairs", chk.pairs, "Sampled monotonicity pairs");
  c_chk->add_option("--seed", chk.seed, "Sampling seed");
  c_chk->add_option("--method", chk.method, "gradient | cost");
  c_chk->add_option("--csv", chk.csv, "Per-profile eigenvalue CSV");

  GridArgs grid;
  auto* c_grid = app.add_subcommand("grid-search", "Select (rho_l, rho_d, W) by security-curve AUC");
  c_grid->add_option("--grids", grid.grids, "Grid config")->required();
  c_grid->add_option("--out", grid.out, "Output CSV of all cells")->required();
  c_grid->add_option("--curves", grid.curves, "Directory for per-cell curve CSVs");

  SynthArgs syn;
  auto* c_syn = app.add_subcommand("gen-synth", "Two-Gaussian 2-D synthetic data");
  c_syn->add_option("--n", syn.n, "Samples per class")->required();
  c_syn->add_option("--sep", syn.sep, "Separation of the class centers");
  c_syn->add_option("--seed", syn.seed, "Seed");
  c_syn->add_option("--out", syn.out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*c_train) return run_train(train);
    if (*c_base) return run_train_baseline(base);
    if (*c_att) return run_attack(att);
    if (*c_ev) return run_secure_eval(ev);
    if (*c_chk) return run_check_eq(chk);
    if (*c_grid) return run_grid_search(grid);
    if (*c_syn) return run_gen_synth(syn);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFile;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFile;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFile;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
