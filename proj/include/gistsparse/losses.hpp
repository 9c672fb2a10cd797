#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string_view>
#include <variant>

#include "gistsparse/model.hpp"

namespace gistsparse {

/// Binary classification data: n samples by d features, labels in {-1, +1}.
struct LabeledDataset {
  Eigen::MatrixXd features;
  Eigen::VectorXd labels;

  void validate() const;
  Eigen::Index samples() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
};

/// Linear mixing data: dictionary D (m bands by q spectra) and observation y.
struct UnmixObservation {
  Eigen::MatrixXd dictionary;
  Eigen::VectorXd observed;

  void validate() const;
};

using Dataset = std::variant<LabeledDataset, UnmixObservation>;

enum class LossKind { SquaredHinge, Logistic, LeastSquares, Huber };

struct LossSpec {
  LossKind kind = LossKind::SquaredHinge;
  double delta = 1.0;  // Huber knee

  void validate() const;
  bool is_classification() const {
    return kind == LossKind::SquaredHinge || kind == LossKind::Logistic;
  }
};

std::string_view loss_name(LossKind kind);

/// Smooth data-fit term bound to its data.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual Eigen::Index dim() const = 0;
  virtual bool has_bias() const = 0;

  /// Loss value; fills grad (same shape as the model) when non-null.
  virtual double value_grad(const Model& model, Model* grad) const = 0;

  /// Upper estimate of the gradient Lipschitz constant.
  virtual double lipschitz() const = 0;

  double value(const Model& model) const { return value_grad(model, nullptr); }
  Model zero_model() const { return Model::zeros(dim(), has_bias()); }
};

/// Squared hinge or logistic loss averaged over samples, f(x) = w'x + b.
class ClassificationProblem final : public Problem {
 public:
  ClassificationProblem(LossSpec spec, LabeledDataset data);

  Eigen::Index dim() const override { return data_.dim(); }
  bool has_bias() const override { return true; }
  double value_grad(const Model& model, Model* grad) const override;
  double lipschitz() const override { return lipschitz_; }

  const LabeledDataset& data() const { return data_; }

 private:
  LossSpec spec_;
  LabeledDataset data_;
  double lipschitz_;
};

/// Unnormalized least squares 0.5 ||y - D a||^2 or Huber on the residuals.
/// Least squares runs on the Gram matrix D'D, which can be shared between
/// observations of the same dictionary.
class RegressionProblem final : public Problem {
 public:
  RegressionProblem(LossSpec spec, UnmixObservation obs);

  /// Shares a dictionary and its precomputed Gram matrix / Lipschitz bound.
  RegressionProblem(LossSpec spec, std::shared_ptr<const Eigen::MatrixXd> dictionary,
                    std::shared_ptr<const Eigen::MatrixXd> gram, double lipschitz,
                    Eigen::VectorXd observed);

  Eigen::Index dim() const override { return dict_->cols(); }
  bool has_bias() const override { return false; }
  double value_grad(const Model& model, Model* grad) const override;
  double lipschitz() const override { return lipschitz_; }

  const Eigen::MatrixXd& dictionary() const { return *dict_; }
  const Eigen::VectorXd& observed() const { return y_; }

 private:
  void init_observation();

  LossSpec spec_;
  std::shared_ptr<const Eigen::MatrixXd> dict_;
  std::shared_ptr<const Eigen::MatrixXd> gram_;
  Eigen::VectorXd y_;
  Eigen::VectorXd dty_;
  double yty_ = 0.0;
  double lipschitz_;
};

std::unique_ptr<Problem> make_problem(const LossSpec& spec, const Dataset& data);

struct LossEval {
  double value = 0.0;
  Model grad;
};

/// Throws DimensionMismatch when the model does not fit the data, InvalidInput
/// for a loss/data pairing that does not exist or a non-finite model.
LossEval loss_value_grad(const LossSpec& spec, const Dataset& data, const Model& model);

double lipschitz_estimate(const LossSpec& spec, const Dataset& data);

/// Largest eigenvalue of the PSD matrix A'A by power iteration
/// (at most 50 steps, stopping on relative change < 1e-8).
double max_singular_value_squared(const Eigen::Ref<const Eigen::MatrixXd>& a);

/// Same, for a small symmetric PSD matrix given directly.
double max_eigenvalue_psd(const Eigen::Ref<const Eigen::MatrixXd>& m);

/// Numerically safe log(1 + exp(-margin)).
double logistic_loss(double margin);

}  // namespace gistsparse
