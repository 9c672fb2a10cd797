#include "gistsparse/losses.hpp"

#include <cmath>
#include <string>

#include "gistsparse/errors.hpp"

namespace gistsparse {

namespace {

constexpr int kPowerIterations = 50;
constexpr double kPowerRelTol = 1e-8;

template <class MatVec>
double power_iteration(Eigen::Index n, MatVec&& apply) {
  if (n == 0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
  Eigen::VectorXd mv(n);
  double est = 0.0;
  for (int it = 0; it < kPowerIterations; ++it) {
    apply(v, mv);
    const double rq = v.dot(mv);
    const double nrm = mv.norm();
    if (nrm == 0.0) return est;
    v = mv / nrm;
    const double prev = est;
    est = rq;
    if (it > 0 && std::abs(est - prev) <= kPowerRelTol * std::abs(est)) break;
  }
  apply(v, mv);
  return std::max(est, v.dot(mv));
}

void check_model(const Model& model, Eigen::Index dim, bool with_bias) {
  if (model.dim() != dim) {
    throw DimensionMismatch("model has " + std::to_string(model.dim()) +
                            " coefficients, data has " + std::to_string(dim));
  }
  if (model.has_bias != with_bias) throw DimensionMismatch("model bias does not match the loss");
  if (!model.all_finite()) throw InvalidInput("model has non-finite entries");
}

}  // namespace

void LabeledDataset::validate() const {
  if (features.rows() < 1 || features.cols() < 1) throw InvalidInput("empty feature matrix");
  if (labels.size() != features.rows()) throw DimensionMismatch("labels and features disagree on n");
  if (!features.allFinite() || !labels.allFinite()) throw InvalidInput("non-finite dataset entry");
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1.0 && labels[i] != -1.0) throw InvalidInput("labels must be -1 or +1");
  }
}

void UnmixObservation::validate() const {
  if (dictionary.rows() < 1 || dictionary.cols() < 1) throw InvalidInput("empty dictionary");
  if (observed.size() != dictionary.rows()) {
    throw DimensionMismatch("observation has " + std::to_string(observed.size()) +
                            " bands, dictionary has " + std::to_string(dictionary.rows()));
  }
  if (!dictionary.allFinite() || !observed.allFinite()) throw InvalidInput("non-finite entry");
}

void LossSpec::validate() const {
  if (kind == LossKind::Huber && !(delta > 0.0 && std::isfinite(delta))) {
    throw InvalidInput("Huber loss requires delta > 0");
  }
}

std::string_view loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::SquaredHinge: return "squared_hinge";
    case LossKind::Logistic: return "logistic";
    case LossKind::LeastSquares: return "least_squares";
    case LossKind::Huber: return "huber";
  }
  return "?";
}

double logistic_loss(double margin) {
  if (margin > 0.0) return std::log1p(std::exp(-margin));
  return -margin + std::log1p(std::exp(margin));
}

double max_singular_value_squared(const Eigen::Ref<const Eigen::MatrixXd>& a) {
  Eigen::VectorXd tmp(a.rows());
  return power_iteration(a.cols(), [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    tmp.noalias() = a * v;
    out.noalias() = a.transpose() * tmp;
  });
}

double max_eigenvalue_psd(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  return power_iteration(m.cols(), [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    out.noalias() = m * v;
  });
}

// ---------------------------------------------------------------------------

ClassificationProblem::ClassificationProblem(LossSpec spec, LabeledDataset data)
    : spec_(spec), data_(std::move(data)) {
  spec_.validate();
  if (!spec_.is_classification()) throw InvalidInput("classification problem needs a margin loss");
  data_.validate();
  Eigen::MatrixXd aug(data_.samples(), data_.dim() + 1);
  aug.leftCols(data_.dim()) = data_.features;
  aug.col(data_.dim()).setOnes();
  const double s2 = max_singular_value_squared(aug);
  const double n = static_cast<double>(data_.samples());
  lipschitz_ = spec_.kind == LossKind::SquaredHinge ? 2.0 * s2 / n : s2 / (4.0 * n);
}

double ClassificationProblem::value_grad(const Model& model, Model* grad) const {
  check_model(model, dim(), true);
  const auto& x = data_.features;
  const auto& y = data_.labels;
  const double n = static_cast<double>(data_.samples());

  Eigen::VectorXd margin = (x * model.coef).array() + model.bias;
  margin.array() *= y.array();

  // weights[i] = -dL_i/df_i * y_i so that grad_w = -(X' weights)/n.
  Eigen::VectorXd weights(margin.size());
  double total = 0.0;
  if (spec_.kind == LossKind::SquaredHinge) {
    for (Eigen::Index i = 0; i < margin.size(); ++i) {
      const double h = margin[i] < 1.0 ? 1.0 - margin[i] : 0.0;
      total += h * h;
      weights[i] = 2.0 * h * y[i];
    }
  } else {
    for (Eigen::Index i = 0; i < margin.size(); ++i) {
      total += logistic_loss(margin[i]);
      // sigmoid(-margin), evaluated without overflow.
      const double s = margin[i] >= 0.0 ? std::exp(-margin[i]) / (1.0 + std::exp(-margin[i]))
                                        : 1.0 / (1.0 + std::exp(margin[i]));
      weights[i] = s * y[i];
    }
  }
  if (grad != nullptr) {
    grad->has_bias = true;
    grad->coef.noalias() = -(x.transpose() * weights) / n;
    grad->bias = -weights.sum() / n;
  }
  return total / n;
}

// ---------------------------------------------------------------------------

RegressionProblem::RegressionProblem(LossSpec spec, UnmixObservation obs) : spec_(spec) {
  spec_.validate();
  if (spec_.is_classification()) throw InvalidInput("regression problem needs least squares or Huber");
  obs.validate();
  dict_ = std::make_shared<const Eigen::MatrixXd>(std::move(obs.dictionary));
  if (spec_.kind == LossKind::LeastSquares) {
    auto g = std::make_shared<Eigen::MatrixXd>(dict_->transpose() * *dict_);
    lipschitz_ = max_eigenvalue_psd(*g);
    gram_ = std::move(g);
  } else {
    lipschitz_ = max_singular_value_squared(*dict_);
  }
  y_ = std::move(obs.observed);
  init_observation();
}

RegressionProblem::RegressionProblem(LossSpec spec,
                                     std::shared_ptr<const Eigen::MatrixXd> dictionary,
                                     std::shared_ptr<const Eigen::MatrixXd> gram,
                                     double lipschitz, Eigen::VectorXd observed)
    : spec_(spec),
      dict_(std::move(dictionary)),
      gram_(std::move(gram)),
      y_(std::move(observed)),
      lipschitz_(lipschitz) {
  spec_.validate();
  if (spec_.is_classification()) throw InvalidInput("regression problem needs least squares or Huber");
  if (!dict_) throw InvalidInput("missing dictionary");
  if (y_.size() != dict_->rows()) throw DimensionMismatch("observation and dictionary band counts differ");
  if (!y_.allFinite()) throw InvalidInput("non-finite observation");
  if (spec_.kind == LossKind::LeastSquares && !gram_) {
    gram_ = std::make_shared<const Eigen::MatrixXd>(dict_->transpose() * *dict_);
  }
  if (gram_ && (gram_->rows() != dict_->cols() || gram_->cols() != dict_->cols())) {
    throw DimensionMismatch("Gram matrix does not match the dictionary");
  }
  init_observation();
}

void RegressionProblem::init_observation() {
  dty_ = dict_->transpose() * y_;
  yty_ = y_.squaredNorm();
}

double RegressionProblem::value_grad(const Model& model, Model* grad) const {
  check_model(model, dim(), false);
  const auto& a = model.coef;
  if (spec_.kind == LossKind::LeastSquares) {
    const Eigen::VectorXd ga = *gram_ * a;
    if (grad != nullptr) {
      grad->has_bias = false;
      grad->bias = 0.0;
      grad->coef = ga - dty_;
    }
    const double v = 0.5 * a.dot(ga) - a.dot(dty_) + 0.5 * yty_;
    return std::max(v, 0.0);
  }

  const Eigen::VectorXd r = *dict_ * a - y_;
  const double delta = spec_.delta;
  double total = 0.0;
  Eigen::VectorXd psi(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const double ar = std::abs(r[i]);
    if (ar <= delta) {
      total += 0.5 * r[i] * r[i];
      psi[i] = r[i];
    } else {
      total += delta * ar - 0.5 * delta * delta;
      psi[i] = std::copysign(delta, r[i]);
    }
  }
  if (grad != nullptr) {
    grad->has_bias = false;
    grad->bias = 0.0;
    grad->coef.noalias() = dict_->transpose() * psi;
  }
  return total;
}

// ---------------------------------------------------------------------------

std::unique_ptr<Problem> make_problem(const LossSpec& spec, const Dataset& data) {
  if (spec.is_classification()) {
    const auto* d = std::get_if<LabeledDataset>(&data);
    if (d == nullptr) throw InvalidInput(std::string(loss_name(spec.kind)) + " requires labeled data");
    return std::make_unique<ClassificationProblem>(spec, *d);
  }
  const auto* d = std::get_if<UnmixObservation>(&data);
  if (d == nullptr) throw InvalidInput(std::string(loss_name(spec.kind)) + " requires an unmixing observation");
  return std::make_unique<RegressionProblem>(spec, *d);
}

LossEval loss_value_grad(const LossSpec& spec, const Dataset& data, const Model& model) {
  const auto problem = make_problem(spec, data);
  LossEval out;
  out.value = problem->value_grad(model, &out.grad);
  return out;
}

double lipschitz_estimate(const LossSpec& spec, const Dataset& data) {
  return make_problem(spec, data)->lipschitz();
}

}  // namespace gistsparse
