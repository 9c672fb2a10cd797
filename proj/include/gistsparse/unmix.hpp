#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "gistsparse/losses.hpp"
#include "gistsparse/regularizers.hpp"
#include "gistsparse/solver.hpp"

namespace gistsparse {

/// Endmember spectra stored column-wise (m bands by q spectra).
struct SpectralLibrary {
  std::vector<std::string> names;
  Eigen::MatrixXd spectra;

  Eigen::Index bands() const { return spectra.rows(); }
  Eigen::Index size() const { return spectra.cols(); }
  void validate() const;
};

inline constexpr double kDefaultPruneDegrees = 15.0;

/// arccos(<a, b> / (|a| |b|)) in degrees.
double spectral_angle_deg(const Eigen::Ref<const Eigen::VectorXd>& a,
                          const Eigen::Ref<const Eigen::VectorXd>& b);

/// Greedy pass in column order: a spectrum is kept iff its angle to every
/// spectrum kept so far is >= min_deg.
SpectralLibrary prune_library(const SpectralLibrary& lib, double min_deg);

/// CSV: header `name,band_1,...,band_m`, then one spectrum per row.
/// Throws ParseError (with line number) on malformed input, InvalidInput when
/// fewer than two spectra survive pruning.
SpectralLibrary parse_library(std::istream& in, double prune_deg = kDefaultPruneDegrees);
SpectralLibrary load_library(const std::string& path, double prune_deg = kDefaultPruneDegrees);
void write_library(std::ostream& out, const SpectralLibrary& lib);

/// q smooth nonnegative spectra (3 to 6 Gaussian bumps each, peak 1) with
/// pairwise angles >= 15 degrees.
SpectralLibrary synth_library(int q, int m = 200, std::uint64_t seed = 0);

struct MixtureSample {
  Eigen::VectorXd observed;
  Eigen::VectorXd alpha_true;
  int n_act = 0;
  double sigma = 0.0;
};

/// Support uniform without replacement, weights U[0, 1], i.i.d. N(0, sigma^2)
/// noise per band. The stream is keyed by (seed, trial), so every sigma and
/// every method sees the same support, weights and standardized noise.
MixtureSample simulate_mixture(const SpectralLibrary& lib, int n_act, double sigma,
                               std::uint64_t seed, std::uint64_t trial = 0);

/// Nonnegative least squares min_{a >= 0} ||y - D a||^2 (Lawson-Hanson).
Eigen::VectorXd nnls(const Eigen::Ref<const Eigen::MatrixXd>& dictionary,
                     const Eigen::Ref<const Eigen::VectorXd>& observed);

/// A library bound to the least-squares machinery (Gram matrix and step
/// bound shared across observations).
class Unmixer {
 public:
  explicit Unmixer(const SpectralLibrary& lib);

  /// min_{a >= 0} 0.5 ||y - D a||^2 + lambda R(a); reg.nonneg is forced on.
  SolverReport solve(const Eigen::Ref<const Eigen::VectorXd>& observed, RegularizerSpec reg,
                     double lambda, const SolverConfig& cfg = {},
                     const Model* init = nullptr) const;

  RegressionProblem problem(const Eigen::Ref<const Eigen::VectorXd>& observed) const;

  Eigen::VectorXd nnls(const Eigen::Ref<const Eigen::VectorXd>& observed) const;

  Eigen::Index size() const { return dict_->cols(); }
  Eigen::Index bands() const { return dict_->rows(); }

 private:
  std::shared_ptr<const Eigen::MatrixXd> dict_;
  std::shared_ptr<const Eigen::MatrixXd> gram_;
  double lipschitz_;
};

SolverReport unmix_solve(const SpectralLibrary& lib, const Eigen::Ref<const Eigen::VectorXd>& observed,
                         const RegularizerSpec& reg, double lambda, const SolverConfig& cfg = {});

/// NNLS solution with all but its k largest coordinates zeroed (no refit).
Eigen::VectorXd ls_threshold_baseline(const SpectralLibrary& lib,
                                      const Eigen::Ref<const Eigen::VectorXd>& observed, int k,
                                      bool refit = false);

/// Same, from an already computed NNLS solution.
Eigen::VectorXd keep_top_k(const Eigen::Ref<const Eigen::VectorXd>& alpha, int k);

/// Hard threshold: coordinates <= threshold become 0.
Eigen::VectorXd hard_threshold(const Eigen::Ref<const Eigen::VectorXd>& alpha, double threshold);

/// ||alpha - alpha_true||^2
double model_error(const Eigen::Ref<const Eigen::VectorXd>& alpha,
                   const Eigen::Ref<const Eigen::VectorXd>& alpha_true);

/// Coordinates with |a_k| > eps (eps = 0 counts exact nonzeros).
int count_selected(const Eigen::Ref<const Eigen::VectorXd>& alpha, double eps = 0.0);

inline constexpr double kNnlsSelectEps = 1e-9;

// ---------------------------------------------------------------------------
// Simulation study

/// Tighter stopping than the generic default: the Gram systems are badly
/// conditioned and selected counts are sensitive to unconverged dust.
inline SolverConfig default_unmix_solver() {
  SolverConfig c;
  c.tol = 1e-10;
  c.max_iter = 20000;
  return c;
}

/// Regularized solvers plus the thresholded NNLS baseline, whose path
/// parameter is the hard threshold applied to the NNLS solution.
enum class UnmixMethod { Ridge, Lasso, LogSumPenalty, HalfNorm, LsThreshold };

std::string_view method_name(UnmixMethod m);
UnmixMethod method_from_reg(RegKind k);

/// How each path point is initialized. Zero follows the classification
/// protocol; Warm starts from the previous (smaller) lambda's solution;
/// BestOf runs both and keeps the lower objective.
enum class PathInit { Zero, Warm, BestOf };

std::string_view path_init_name(PathInit p);
PathInit parse_path_init(std::string_view name);

struct UnmixExperimentConfig {
  std::vector<int> n_acts{3};
  std::vector<double> sigmas{0.01, 0.05, 0.10};
  std::vector<double> lambdas;  // default: 33 log-spaced points over [1e-5, 1e3]
  int trials = 50;
  std::vector<UnmixMethod> methods{UnmixMethod::Ridge, UnmixMethod::Lasso,
                                   UnmixMethod::LogSumPenalty, UnmixMethod::HalfNorm,
                                   UnmixMethod::LsThreshold};
  double theta = kDefaultTheta;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  PathInit init = PathInit::BestOf;
  SolverConfig solver = default_unmix_solver();
};

std::vector<double> default_unmix_lambdas();

struct UnmixRow {
  UnmixMethod method;
  int n_act;
  double sigma;
  double lambda;
  int trial;
  double model_error;
  int n_selected;
};

/// Per (method, n_act, sigma, trial) path summary.
struct UnmixTrialSummary {
  UnmixMethod method;
  int n_act;
  double sigma;
  int trial;
  /// Error at the smallest lambda with n_selected == n_act (NaN if the path
  /// never hits it). The baseline uses its top-n_act truncation instead.
  double matched_error = std::numeric_limits<double>::quiet_NaN();
  double min_error = 0.0;
  int n_selected_at_min = 0;
  double lambda_at_min = 0.0;
};

struct UnmixExperiment {
  std::vector<double> lambdas;
  /// Ordered by (method, n_act, sigma, lambda, trial).
  std::vector<UnmixRow> rows;
  /// Ordered by (method, n_act, sigma, trial).
  std::vector<UnmixTrialSummary> summaries;
};

UnmixExperiment unmix_experiment(const SpectralLibrary& lib, const UnmixExperimentConfig& cfg);

/// Mean error per lambda.
struct LambdaMean {
  UnmixMethod method;
  int n_act;
  double sigma;
  double lambda;
  double mean_error;
  double mean_selected;
};
std::vector<LambdaMean> mean_error_by_lambda(const UnmixExperiment& exp);

/// Mean error over every (trial, lambda) record with a given selected count.
struct CountMean {
  UnmixMethod method;
  int n_act;
  double sigma;
  int n_selected;
  double mean_error;
  int records;
};
std::vector<CountMean> mean_error_by_count(const UnmixExperiment& exp);

/// Trial means of the per-path summaries.
struct SelectionMean {
  UnmixMethod method;
  int n_act;
  double sigma;
  double mean_matched_error;  // over trials that reached n_act
  int matched_trials;
  double mean_min_error;
  double mean_selected_at_min;
};
std::vector<SelectionMean> selection_means(const UnmixExperiment& exp);

/// min over lambda of the trial-mean error, for one (method, n_act, sigma).
double min_mean_error(const UnmixExperiment& exp, UnmixMethod m, int n_act, double sigma);

/// Mean error over records with n_selected == count (NaN if none).
double mean_error_at_count(const UnmixExperiment& exp, UnmixMethod m, int n_act, double sigma,
                           int count);

}  // namespace gistsparse
