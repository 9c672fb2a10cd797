#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "gistsparse/losses.hpp"
#include "gistsparse/model.hpp"
#include "gistsparse/regularizers.hpp"
#include "gistsparse/solver.hpp"

namespace gistsparse {

/// Samples with integer class labels 0..classes-1.
struct MulticlassDataset {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  int classes = 0;

  void validate() const;
  Eigen::Index samples() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
};

/// Class k against the rest, as {-1, +1} labels.
LabeledDataset one_vs_rest(const MulticlassDataset& data, int k);

/// Two Gaussian classes: class 1 centered at +mean_offset, class 0 at
/// -mean_offset on the first two dimensions, zero mean on the noise dims,
/// covariance noise_sd^2 I.
struct ToySpec {
  int n_per_class = 100;
  int d_noise = 18;
  std::array<double, 2> mean_offset{1.0, 0.5};
  double noise_sd = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
  int dim() const { return 2 + d_noise; }
};

struct ToyData {
  MulticlassDataset data;
  Model bayes;  // Sigma^{-1} (mu_+ - mu_-), zero bias
};

ToyData make_toy(const ToySpec& spec);

/// Independent train and test draws for one seed; the test set is
/// test_factor times larger.
struct ToySplit {
  MulticlassDataset train;
  MulticlassDataset test;
  Model bayes;
};
ToySplit make_toy_split(const ToySpec& spec, int test_factor = 10);

struct MulticlassModel {
  std::vector<Model> per_class;

  int classes() const { return static_cast<int>(per_class.size()); }
  Eigen::Index dim() const { return per_class.empty() ? 0 : per_class.front().dim(); }
  /// d * C + C
  std::size_t coefficient_total() const;
  /// Nonzero coefficients plus one bias per class.
  std::size_t active_total() const;
  /// Distinct features that are nonzero in at least one class model.
  std::size_t active_features() const;
};

struct OvaFit {
  MulticlassModel model;
  std::vector<SolverReport> reports;  // one per class
  double objective = 0.0;             // summed
  std::size_t iterations = 0;         // summed
};

/// One squared-hinge problem per class, each solved from the zero model.
OvaFit train_ova(const MulticlassDataset& data, const RegularizerSpec& reg, double lambda,
                 const SolverConfig& cfg = {}, const std::vector<Model>* init = nullptr,
                 LossSpec loss = {LossKind::SquaredHinge, 1.0});

/// Regularization path of train_ova; record.models holds the class models.
PathResult ova_path(const MulticlassDataset& data, const RegularizerSpec& reg,
                    const std::vector<double>& lambdas, const SolverConfig& cfg = {},
                    const PathOptions& opts = {});

/// Per-sample decision values f_k(x) = w_k'x + b_k (n by C).
Eigen::MatrixXd decision_values(const MulticlassModel& model,
                                const Eigen::Ref<const Eigen::MatrixXd>& features);

/// argmax_k f_k(x); ties go to the lowest class index.
std::vector<int> predict(const MulticlassModel& model,
                         const Eigen::Ref<const Eigen::MatrixXd>& features);

using ConfusionMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

/// Rows are true classes, columns predicted classes.
ConfusionMatrix confusion_matrix(const std::vector<int>& truth, const std::vector<int>& predicted,
                                 int classes);

/// Cohen's kappa; 0 when chance agreement is exactly 1.
double kappa(const ConfusionMatrix& confusion);
double accuracy(const ConfusionMatrix& confusion);

/// Angle in degrees between the coefficient vectors restricted to the first
/// `informative` dimensions. Throws InvalidInput if either restriction is zero.
double bayes_angle(const Model& model, const Model& bayes, int informative = 2);

}  // namespace gistsparse
