#include "rpg/attack.hpp"
#include "rpg/costs.hpp"
#include "rpg/data_io.hpp"
#include "rpg/diagnostics.hpp"
#include "rpg/errors.hpp"
#include "rpg/gaussian_hinge.hpp"
#include "rpg/pipeline.hpp"
#include "rpg/solver.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace rpg;

namespace {

FeatureKind kind_from_string(const std::string& name) {
  if (name == "continuous" || name == "continuous_unit_interval") return FeatureKind::continuous_unit_interval;
  if (name == "binary") return FeatureKind::binary;
  if (name == "unbounded") return FeatureKind::unbounded;
  throw DomainError("unknown feature kind '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Randomized prediction games for adversarial classification";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](Mat x, Vec y, const std::string& kind) {
             return Dataset(std::move(x), std::move(y), kind_from_string(kind));
           }),
           py::arg("x"), py::arg("y"), py::arg("kind") = "continuous")
      .def_property_readonly("n", &Dataset::n)
      .def_property_readonly("k", &Dataset::k)
      .def_property_readonly("x", &Dataset::features)
      .def_property_readonly("y", &Dataset::labels)
      .def_property_readonly("kind", [](const Dataset& d) { return to_string(d.kind()); });

  m.def("synth_2d", &synth_2d, py::arg("n_per_class"), py::arg("separation") = 0.4,
        py::arg("seed") = 0);
  m.def("load_dataset", [](const std::string& path) { return load_dataset(path); });
  m.def("save_dense_csv", &save_dense_csv);

  m.def("hinge_expect", &hinge_expect, py::arg("mu"), py::arg("sigma"));

  py::class_<LearnerParams>(m, "LearnerParams")
      .def(py::init<Vec, Vec>(), py::arg("mu_w"), py::arg("sigma_w"))
      .def_readwrite("mu_w", &LearnerParams::mu_w)
      .def_readwrite("sigma_w", &LearnerParams::sigma_w)
      .def("scores", [](const LearnerParams& c, const Mat& x) { return expected_scores(c, x); });

  py::class_<BaselineSvm>(m, "BaselineSvm")
      .def_readonly("w", &BaselineSvm::w)
      .def_readonly("b", &BaselineSvm::b)
      .def_readonly("objective", &BaselineSvm::objective)
      .def("as_learner", [](const BaselineSvm& s) { return as_learner_params(s); });
  m.def(
      "train_baseline_svm",
      [](const Dataset& data, double C, std::uint64_t seed) {
        BaselineOptions opts;
        opts.seed = seed;
        return train_baseline_svm(data, C, opts);
      },
      py::arg("data"), py::arg("C") = 1.0, py::arg("seed") = 0);

  py::class_<EquilibriumResult>(m, "EquilibriumResult")
      .def_readonly("theta", &EquilibriumResult::theta)
      .def_readonly("iterations", &EquilibriumResult::iterations)
      .def_readonly("converged", &EquilibriumResult::converged)
      .def_property_readonly("termination",
                             [](const EquilibriumResult& r) { return to_string(r.termination); })
      .def_property_readonly("residuals", &EquilibriumResult::residual_trace);

  py::class_<TrainedGame>(m, "TrainedGame")
      .def_readonly("result", &TrainedGame::result)
      .def_readonly("classifier", &TrainedGame::classifier);

  m.def(
      "train_game",
      [](const Dataset& data, double rho_l, double rho_d, double W, double bias_eps,
         int max_iter, double epsilon, std::uint64_t seed) {
        SolverConfig cfg;
        cfg.max_iter = max_iter;
        cfg.epsilon = epsilon;
        cfg.seed = seed;
        cfg.validate();
        return train_game(make_game(data, rho_l, rho_d, W, bias_eps), cfg);
      },
      py::arg("data"), py::arg("rho_l") = 10.0, py::arg("rho_d") = 10.0, py::arg("W") = 1.0,
      py::arg("bias_eps") = 0.0, py::arg("max_iter") = 5000, py::arg("epsilon") = 1e-10,
      py::arg("seed") = 0);

  m.def(
      "attack_dataset",
      [](const LearnerParams& c, const Dataset& data, double d_max, const std::string& mode,
         bool monotone) {
        AttackSpec spec;
        spec.d_max = d_max;
        spec.mode = attack_mode_from_string(mode);
        spec.monotone_increase_only = monotone;
        return attack_dataset(c, data, with_dataset_box(spec, data));
      },
      py::arg("classifier"), py::arg("data"), py::arg("d_max"), py::arg("mode") = "l2_box_pgd",
      py::arg("monotone") = false);

  py::class_<TpAtFp>(m, "TpAtFp")
      .def_readonly("threshold", &TpAtFp::threshold)
      .def_readonly("tp_rate", &TpAtFp::tp_rate)
      .def_readonly("fp_rate", &TpAtFp::fp_rate);
  m.def("tp_at_fp", &tp_at_fp, py::arg("legit"), py::arg("malicious"), py::arg("fp_target"));

  py::class_<CurvePoint>(m, "CurvePoint")
      .def_readonly("d_max", &CurvePoint::d_max)
      .def_readonly("tp_mean", &CurvePoint::tp_mean)
      .def_readonly("tp_std", &CurvePoint::tp_std);
  py::class_<SecurityCurve>(m, "SecurityCurve")
      .def_readonly("points", &SecurityCurve::points)
      .def("auc", &SecurityCurve::auc)
      .def("csv", [](const SecurityCurve& c) { return curve_csv(c); });
  m.def(
      "security_curve",
      [](const LearnerParams& c, const Dataset& test, const std::vector<double>& d_max_list,
         const std::string& mode, int reps, std::uint64_t seed, double fp) {
        AttackSpec spec;
        spec.mode = attack_mode_from_string(mode);
        return security_curve(c, test, with_dataset_box(spec, test), d_max_list, reps, seed, fp);
      },
      py::arg("classifier"), py::arg("test"), py::arg("d_max_list"),
      py::arg("mode") = "l2_box_pgd", py::arg("repetitions") = 1, py::arg("seed") = 0,
      py::arg("fp_target") = 0.01);

  py::class_<DiagnosticsReport>(m, "DiagnosticsReport")
      .def_readonly("lambda_omega_l", &DiagnosticsReport::lambda_omega_l)
      .def_readonly("lambda_omega_d", &DiagnosticsReport::lambda_omega_d)
      .def_readonly("uniqueness_margin", &DiagnosticsReport::uniqueness_margin)
      .def_readonly("monotone_violations", &DiagnosticsReport::monotone_violations)
      .def("worst_jacobian_eig", &DiagnosticsReport::worst_jacobian_eig)
      .def("certified", &DiagnosticsReport::certified)
      .def("__str__", [](const DiagnosticsReport& r) { return report_text(r); });
  m.def(
      "check_equilibrium",
      [](const Dataset& data, double rho_l, double rho_d, double W, double bias_eps,
         int profiles, int pairs, std::uint64_t seed) {
        const SvmGame game(make_game(data, rho_l, rho_d, W, bias_eps));
        DiagnosticsOptions opts;
        opts.n_pairs = pairs;
        return uniqueness_margin(game, profiles, seed, opts);
      },
      py::arg("data"), py::arg("rho_l") = 10.0, py::arg("rho_d") = 10.0, py::arg("W") = 1.0,
      py::arg("bias_eps") = 0.0, py::arg("profiles") = 10, py::arg("pairs") = 200,
      py::arg("seed") = 0);
}
