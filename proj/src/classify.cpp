#include "gistsparse/classify.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gistsparse/errors.hpp"
#include "gistsparse/rng.hpp"

namespace gistsparse {

void MulticlassDataset::validate() const {
  if (features.rows() < 1 || features.cols() < 1) throw InvalidInput("empty feature matrix");
  if (static_cast<Eigen::Index>(labels.size()) != features.rows()) {
    throw DimensionMismatch("labels and features disagree on n");
  }
  if (classes < 2) throw InvalidInput("need at least two classes");
  if (!features.allFinite()) throw InvalidInput("non-finite feature");
  std::vector<long> counts(static_cast<std::size_t>(classes), 0);
  for (const int y : labels) {
    if (y < 0 || y >= classes) throw InvalidInput("label " + std::to_string(y) + " out of range");
    ++counts[static_cast<std::size_t>(y)];
  }
  for (int k = 0; k < classes; ++k) {
    if (counts[static_cast<std::size_t>(k)] == 0) {
      throw InvalidInput("class " + std::to_string(k) + " has no samples");
    }
  }
}

LabeledDataset one_vs_rest(const MulticlassDataset& data, int k) {
  LabeledDataset out;
  out.features = data.features;
  out.labels.resize(data.samples());
  for (Eigen::Index i = 0; i < data.samples(); ++i) {
    out.labels[i] = data.labels[static_cast<std::size_t>(i)] == k ? 1.0 : -1.0;
  }
  return out;
}

void ToySpec::validate() const {
  if (n_per_class < 1) throw InvalidInput("n_per_class must be positive");
  if (d_noise < 0) throw InvalidInput("d_noise must be >= 0");
  if (!(noise_sd > 0.0)) throw InvalidInput("noise_sd must be positive");
}

ToyData make_toy(const ToySpec& spec) {
  spec.validate();
  auto rng = make_rng({spec.seed});
  std::normal_distribution<double> normal(0.0, 1.0);
  const int d = spec.dim();
  const int n = 2 * spec.n_per_class;

  ToyData out;
  out.data.classes = 2;
  out.data.features.resize(n, d);
  out.data.labels.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int cls = i < spec.n_per_class ? 0 : 1;
    const double sign = cls == 1 ? 1.0 : -1.0;
    out.data.labels[static_cast<std::size_t>(i)] = cls;
    for (int j = 0; j < d; ++j) {
      const double mean = j < 2 ? sign * spec.mean_offset[static_cast<std::size_t>(j)] : 0.0;
      out.data.features(i, j) = mean + spec.noise_sd * normal(rng);
    }
  }
  out.bayes = Model::zeros(d, true);
  const double inv_var = 1.0 / (spec.noise_sd * spec.noise_sd);
  out.bayes.coef[0] = 2.0 * spec.mean_offset[0] * inv_var;
  out.bayes.coef[1] = 2.0 * spec.mean_offset[1] * inv_var;
  return out;
}

ToySplit make_toy_split(const ToySpec& spec, int test_factor) {
  if (test_factor < 1) throw InvalidInput("test_factor must be positive");
  ToySpec train_spec = spec;
  train_spec.seed = make_rng({spec.seed, 0})();
  ToySpec test_spec = spec;
  test_spec.n_per_class = spec.n_per_class * test_factor;
  test_spec.seed = make_rng({spec.seed, 1})();
  ToyData train = make_toy(train_spec);
  ToySplit out;
  out.train = std::move(train.data);
  out.test = make_toy(test_spec).data;
  out.bayes = std::move(train.bayes);
  return out;
}

std::size_t MulticlassModel::coefficient_total() const {
  return static_cast<std::size_t>(dim() + 1) * per_class.size();
}

std::size_t MulticlassModel::active_total() const {
  std::size_t n = 0;
  for (const auto& m : per_class) n += m.active_total();
  return n;
}

std::size_t MulticlassModel::active_features() const {
  std::size_t n = 0;
  for (Eigen::Index j = 0; j < dim(); ++j) {
    for (const auto& m : per_class) {
      if (m.coef[j] != 0.0) {
        ++n;
        break;
      }
    }
  }
  return n;
}

OvaFit train_ova(const MulticlassDataset& data, const RegularizerSpec& reg, double lambda,
                 const SolverConfig& cfg, const std::vector<Model>* init, LossSpec loss) {
  data.validate();
  if (!loss.is_classification()) throw InvalidInput("one-against-all needs a margin loss");
  if (init != nullptr && static_cast<int>(init->size()) != data.classes) {
    throw DimensionMismatch("need one initial model per class");
  }
  OvaFit fit;
  for (int k = 0; k < data.classes; ++k) {
    const ClassificationProblem problem(loss, one_vs_rest(data, k));
    const Model start = init ? (*init)[static_cast<std::size_t>(k)] : problem.zero_model();
    SolverReport rep = gist_solve(problem, reg, lambda, start, cfg);
    fit.objective += rep.objective();
    fit.iterations += rep.iterations;
    fit.model.per_class.push_back(rep.model);
    fit.reports.push_back(std::move(rep));
  }
  return fit;
}

PathResult ova_path(const MulticlassDataset& data, const RegularizerSpec& reg,
                    const std::vector<double>& lambdas, const SolverConfig& cfg,
                    const PathOptions& opts) {
  data.validate();
  const PathFit fit = [&](double lam, const PathRecord* warm) {
    OvaFit f = train_ova(data, reg, lam, cfg, warm ? &warm->models : nullptr);
    PathRecord rec;
    rec.active_count = f.model.active_total();
    rec.objective = f.objective;
    rec.iterations = f.iterations;
    for (const auto& r : f.reports) rec.kkt_max_residual = std::max(rec.kkt_max_residual, r.kkt_max_residual);
    rec.models = std::move(f.model.per_class);
    return rec;
  };
  return run_path(lambdas, fit, opts);
}

Eigen::MatrixXd decision_values(const MulticlassModel& model,
                                const Eigen::Ref<const Eigen::MatrixXd>& features) {
  if (model.per_class.empty()) throw InvalidInput("empty model");
  if (features.cols() != model.dim()) {
    throw DimensionMismatch("features have " + std::to_string(features.cols()) +
                            " columns, model expects " + std::to_string(model.dim()));
  }
  Eigen::MatrixXd f(features.rows(), model.classes());
  for (int k = 0; k < model.classes(); ++k) {
    const auto& m = model.per_class[static_cast<std::size_t>(k)];
    f.col(k) = (features * m.coef).array() + m.bias;
  }
  return f;
}

std::vector<int> predict(const MulticlassModel& model,
                         const Eigen::Ref<const Eigen::MatrixXd>& features) {
  const Eigen::MatrixXd f = decision_values(model, features);
  std::vector<int> out(static_cast<std::size_t>(f.rows()));
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    int best = 0;
    for (int k = 1; k < f.cols(); ++k) {
      if (f(i, k) > f(i, best)) best = k;
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

ConfusionMatrix confusion_matrix(const std::vector<int>& truth, const std::vector<int>& predicted,
                                 int classes) {
  if (truth.size() != predicted.size()) throw DimensionMismatch("truth and prediction lengths differ");
  if (classes < 1) throw InvalidInput("need at least one class");
  ConfusionMatrix cm = ConfusionMatrix::Zero(classes, classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= classes || predicted[i] < 0 || predicted[i] >= classes) {
      throw InvalidInput("label out of range");
    }
    ++cm(truth[i], predicted[i]);
  }
  return cm;
}

double kappa(const ConfusionMatrix& cm) {
  if (cm.rows() == 0 || cm.rows() != cm.cols()) throw InvalidInput("confusion matrix must be square and non-empty");
  if ((cm.array() < 0).any()) throw InvalidInput("negative count in confusion matrix");
  const double total = static_cast<double>(cm.sum());
  if (total <= 0.0) throw InvalidInput("confusion matrix has no samples");
  const double po = static_cast<double>(cm.trace()) / total;
  double pe = 0.0;
  for (Eigen::Index k = 0; k < cm.rows(); ++k) {
    pe += static_cast<double>(cm.row(k).sum()) * static_cast<double>(cm.col(k).sum());
  }
  pe /= total * total;
  if (pe == 1.0) return 0.0;
  return (po - pe) / (1.0 - pe);
}

double accuracy(const ConfusionMatrix& cm) {
  const double total = static_cast<double>(cm.sum());
  if (total <= 0.0) throw InvalidInput("confusion matrix has no samples");
  return static_cast<double>(cm.trace()) / total;
}

double bayes_angle(const Model& model, const Model& bayes, int informative) {
  if (informative < 1 || model.dim() < informative || bayes.dim() < informative) {
    throw DimensionMismatch("models shorter than the informative block");
  }
  const auto a = model.coef.head(informative);
  const auto b = bayes.coef.head(informative);
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw InvalidInput("angle undefined for a zero coefficient block");
  const double c = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

}  // namespace gistsparse
