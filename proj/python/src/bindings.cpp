#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gistsparse/classify.hpp"
#include "gistsparse/errors.hpp"
#include "gistsparse/losses.hpp"
#include "gistsparse/regularizers.hpp"
#include "gistsparse/solver.hpp"
#include "gistsparse/unmix.hpp"
#include "gistsparse/verify.hpp"

namespace py = pybind11;
using namespace gistsparse;

namespace {

RegularizerSpec reg_spec(const std::string& reg, double theta, bool nonneg) {
  RegularizerSpec s{parse_reg_kind(reg), theta, nonneg};
  s.validate();
  return s;
}

LossKind loss_kind(const std::string& name) {
  for (LossKind k : {LossKind::SquaredHinge, LossKind::Logistic, LossKind::LeastSquares, LossKind::Huber}) {
    if (loss_name(k) == name) return k;
  }
  throw InvalidInput("unknown loss '" + name + "'");
}

SolverConfig solver_config(std::size_t max_iter, double tol) {
  SolverConfig c;
  c.max_iter = max_iter;
  c.tol = tol;
  c.validate();
  return c;
}

py::dict report_dict(const SolverReport& r) {
  py::dict d;
  d["coef"] = r.model.coef;
  d["bias"] = r.model.bias;
  d["objective"] = r.objective();
  d["objective_trace"] = r.objective_trace;
  d["iterations"] = r.iterations;
  d["termination"] = std::string(termination_name(r.termination));
  d["kkt_max_residual"] = r.kkt_max_residual;
  return d;
}

SpectralLibrary library_of(const Eigen::MatrixXd& spectra) {
  SpectralLibrary lib;
  lib.spectra = spectra;
  for (Eigen::Index j = 0; j < spectra.cols(); ++j) lib.names.push_back("s" + std::to_string(j + 1));
  lib.validate();
  return lib;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sparse linear models with nonconvex regularizers (C++ core)";

  py::register_exception<Diverged>(m, "DivergedError", PyExc_RuntimeError);
  py::register_exception<NoMatch>(m, "NoMatchError", PyExc_LookupError);

  m.def("prox", [](const std::string& reg, double v, double tau, double theta, bool nonneg) {
        return prox_scalar(reg_spec(reg, theta, nonneg), v, tau);
      },
      py::arg("reg"), py::arg("v"), py::arg("tau"), py::arg("theta") = kDefaultTheta, py::arg("nonneg") = false,
      "Scalar proximity operator of tau * g(|x|).");
  m.def("prox_vector", [](const std::string& reg, const Eigen::VectorXd& v, double tau, double theta, bool nonneg) {
        return prox_vector(reg_spec(reg, theta, nonneg), v, tau);
      },
      py::arg("reg"), py::arg("v"), py::arg("tau"), py::arg("theta") = kDefaultTheta, py::arg("nonneg") = false);
  m.def("prox_oracle", [](const std::string& reg, double v, double tau, double theta, bool nonneg, long grid_n) {
        return prox_oracle_scalar(reg_spec(reg, theta, nonneg), v, tau, grid_n);
      },
      py::arg("reg"), py::arg("v"), py::arg("tau"), py::arg("theta") = kDefaultTheta, py::arg("nonneg") = false,
      py::arg("grid_n") = 100000);
  m.def("reg_value", [](const std::string& reg, const Eigen::VectorXd& w, double theta, bool nonneg) {
        return reg_value(reg_spec(reg, theta, nonneg), w);
      },
      py::arg("reg"), py::arg("w"), py::arg("theta") = kDefaultTheta, py::arg("nonneg") = false);

  m.def("solve_regression",
        [](const Eigen::MatrixXd& d, const Eigen::VectorXd& y, const std::string& reg, double lam,
           double theta, bool nonneg, const std::string& loss, double delta, std::size_t max_iter, double tol) {
          const RegressionProblem p({loss_kind(loss), delta}, UnmixObservation{d, y});
          return report_dict(gist_solve(p, reg_spec(reg, theta, nonneg), lam, p.zero_model(),
                                        solver_config(max_iter, tol)));
        },
        py::arg("dictionary"), py::arg("observed"), py::arg("reg"), py::arg("lam"),
        py::arg("theta") = kDefaultTheta, py::arg("nonneg") = false, py::arg("loss") = "least_squares",
        py::arg("delta") = 1.0, py::arg("max_iter") = 2000, py::arg("tol") = 1e-7,
        "GIST on 0.5 ||y - D a||^2 (or Huber) + lam R(a) from the zero model.");
  m.def("solve_classification",
        [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::string& reg, double lam,
           double theta, const std::string& loss, std::size_t max_iter, double tol) {
          const ClassificationProblem p({loss_kind(loss), 1.0}, LabeledDataset{x, y});
          return report_dict(gist_solve(p, reg_spec(reg, theta, false), lam, p.zero_model(),
                                        solver_config(max_iter, tol)));
        },
        py::arg("features"), py::arg("labels"), py::arg("reg"), py::arg("lam"),
        py::arg("theta") = kDefaultTheta, py::arg("loss") = "squared_hinge", py::arg("max_iter") = 2000,
        py::arg("tol") = 1e-7, "Binary linear classifier, labels in {-1, +1}.");

  m.def("make_toy", [](int n_per_class, int d_noise, std::uint64_t seed) {
        ToySpec s;
        s.n_per_class = n_per_class;
        s.d_noise = d_noise;
        s.seed = seed;
        const ToyData t = make_toy(s);
        return py::make_tuple(t.data.features, t.data.labels, t.bayes.coef);
      },
      py::arg("n_per_class") = 100, py::arg("d_noise") = 18, py::arg("seed") = 0,
      "Returns (features, labels in {0, 1}, bayes coefficients).");
  m.def("train_ova", [](const Eigen::MatrixXd& x, const std::vector<int>& labels, int classes,
                        const std::string& reg, double lam, double theta) {
        const MulticlassDataset data{x, labels, classes};
        const OvaFit f = train_ova(data, reg_spec(reg, theta, false), lam);
        Eigen::MatrixXd w(x.cols(), classes);
        Eigen::VectorXd b(classes);
        for (int k = 0; k < classes; ++k) {
          w.col(k) = f.model.per_class[static_cast<std::size_t>(k)].coef;
          b[k] = f.model.per_class[static_cast<std::size_t>(k)].bias;
        }
        return py::make_tuple(w, b);
      },
      py::arg("features"), py::arg("labels"), py::arg("classes"), py::arg("reg"), py::arg("lam"),
      py::arg("theta") = kDefaultTheta, "One-against-all squared hinge; returns (W d-by-C, biases).");
  m.def("kappa", [](const Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>& cm) { return kappa(cm); },
        py::arg("confusion"));
  m.def("confusion_matrix", &confusion_matrix, py::arg("truth"), py::arg("predicted"), py::arg("classes"));

  m.def("synth_library", [](int q, int bands, std::uint64_t seed) { return synth_library(q, bands, seed).spectra; },
        py::arg("q") = 23, py::arg("bands") = 200, py::arg("seed") = 0,
        "Synthetic spectra, one per column.");
  m.def("simulate_mixture", [](const Eigen::MatrixXd& spectra, int n_act, double sigma, std::uint64_t seed,
                               std::uint64_t trial) {
        const MixtureSample s = simulate_mixture(library_of(spectra), n_act, sigma, seed, trial);
        return py::make_tuple(s.observed, s.alpha_true);
      },
      py::arg("spectra"), py::arg("n_act"), py::arg("sigma"), py::arg("seed") = 0, py::arg("trial") = 0,
      "Returns (observed, alpha_true).");
  m.def("unmix_solve", [](const Eigen::MatrixXd& spectra, const Eigen::VectorXd& y, const std::string& reg,
                          double lam, double theta) {
        return report_dict(unmix_solve(library_of(spectra), y, reg_spec(reg, theta, true), lam,
                                       default_unmix_solver()));
      },
      py::arg("spectra"), py::arg("observed"), py::arg("reg"), py::arg("lam"), py::arg("theta") = kDefaultTheta,
      "Nonnegative regularized unmixing.");
  m.def("nnls", [](const Eigen::MatrixXd& d, const Eigen::VectorXd& y) { return nnls(d, y); },
        py::arg("dictionary"), py::arg("observed"));
  m.def("ls_threshold_baseline", [](const Eigen::MatrixXd& spectra, const Eigen::VectorXd& y, int k) {
        return ls_threshold_baseline(library_of(spectra), y, k);
      },
      py::arg("spectra"), py::arg("observed"), py::arg("k"));
  m.def("model_error", [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return model_error(a, b); },
        py::arg("alpha"), py::arg("alpha_true"));

  m.def("prox_check", [](int samples, double tolerance) { return prox_check(samples, tolerance).pass; },
        py::arg("samples") = 200, py::arg("tolerance") = 1e-6);
  m.def("grad_check", [](int points, double tolerance) { return grad_check(points, tolerance).pass; },
        py::arg("points") = 20, py::arg("tolerance") = 1e-5);
}
