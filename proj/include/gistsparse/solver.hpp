#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gistsparse/losses.hpp"
#include "gistsparse/model.hpp"
#include "gistsparse/regularizers.hpp"

namespace gistsparse {

/// GIST settings. The line-search and stopping constants are implementation
/// defaults, not values taken from the method's reference description.
struct SolverConfig {
  std::size_t max_iter = 2000;
  double tol = 1e-7;        // relative objective change
  double mu_min = 1e-10;
  double mu_max = 1e10;
  double sigma = 1e-4;      // sufficient-decrease constant
  bool monotone = true;
  std::size_t nonmonotone_window = 5;  // used only when monotone == false
  std::uint64_t seed = 0;   // consumed by random_model()

  void validate() const;
};

enum class Termination { Tol, MaxIter };

std::string_view termination_name(Termination t);

struct SolverReport {
  Model model;
  std::vector<double> objective_trace;  // F at the initial point, then after each iteration
  std::size_t iterations = 0;
  Termination termination = Termination::MaxIter;
  double kkt_max_residual = 0.0;
  double kkt_mean_residual = 0.0;
  double final_mu = 0.0;
  double wall_time = 0.0;  // seconds; excluded from equality

  double objective() const { return objective_trace.back(); }

  /// Equality of everything but wall time.
  bool same_result(const SolverReport& other) const;
};

/// F(w) = L(w) + lambda R(w). Throws Infeasible for nonneg violations.
double objective(const Problem& problem, const RegularizerSpec& reg, double lambda,
                 const Model& model);

/// Proximal gradient with Barzilai-Borwein initialized step and backtracking:
///   w+ = prox_{(lambda/mu) R}(w - grad_w / mu),   b+ = b - grad_b / mu,
/// mu doubled until F(w+) <= F_ref - (sigma mu / 2) ||(w+, b+) - (w, b)||^2,
/// where F_ref is F(w) (monotone) or the max over the last window objectives.
/// Throws Diverged on a non-finite objective.
SolverReport gist_solve(const Problem& problem, const RegularizerSpec& reg, double lambda,
                        const Model& init, const SolverConfig& cfg = {});

/// Deterministic Gaussian model scaled by `scale`.
Model random_model(const Problem& problem, std::uint64_t seed, double scale = 1.0);

/// ||grad L(0)||_inf over the regularized coefficients, with the bias (if
/// any) first optimized out, so it is the smallest lambda giving the
/// all-zero solution under the l1 penalty.
double lasso_lambda_max(const Problem& problem);

// ---------------------------------------------------------------------------
// Regularization paths

using Metrics = std::map<std::string, double>;

struct PathRecord {
  double lambda = 0.0;
  std::vector<Model> models;       // one per sub-problem (one per class for OvA)
  std::size_t active_count = 0;    // nonzeros plus bias terms
  double objective = 0.0;          // summed over sub-problems
  std::size_t iterations = 0;      // summed over sub-problems
  double kkt_max_residual = 0.0;
  Metrics metrics;
};

struct PathResult {
  std::vector<double> lambdas;
  std::vector<PathRecord> records;
};

struct PathOptions {
  bool warm_start = false;
  std::size_t jobs = 1;
  /// Optional task metrics computed from a finished record.
  std::function<Metrics(const PathRecord&)> evaluator;
};

/// A single-λ fit over one or more sub-problems, used by the path driver.
using PathFit = std::function<PathRecord(double lambda, const PathRecord* warm)>;

/// Runs `fit` for every λ (strictly increasing, positive). Records come back in
/// grid order regardless of `jobs`. Solver errors are rethrown with λ attached.
PathResult run_path(const std::vector<double>& lambdas, const PathFit& fit,
                    const PathOptions& opts = {});

/// Path of gist_solve over one problem, each λ from the zero model unless
/// warm starts are requested.
PathResult reg_path(const Problem& problem, const RegularizerSpec& reg,
                    const std::vector<double>& lambdas, const SolverConfig& cfg = {},
                    const PathOptions& opts = {});

/// Record with the smallest λ whose active_count equals k.
const PathRecord& path_select_by_sparsity(const PathResult& path, std::size_t k);

/// Record minimizing metrics[metric]; ties go to the smaller λ.
const PathRecord& path_select_by_error(const PathResult& path,
                                       const std::string& metric = "model_error");

/// n points spaced logarithmically over [lo, hi] (n = 1 gives {lo}).
std::vector<double> log_grid(double lo, double hi, std::size_t n);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Exceptions are rethrown
/// for the lowest failing index.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace gistsparse
