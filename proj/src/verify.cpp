#include "gistsparse/verify.hpp"

#include <algorithm>
#include <cmath>

#include "gistsparse/errors.hpp"
#include "gistsparse/rng.hpp"

namespace gistsparse {

ProxCheckResult prox_check(int samples, double tolerance, std::uint64_t seed, long grid_n,
                           const ProxFn& prox) {
  if (samples < 1) throw InvalidInput("samples must be >= 1");
  if (!(tolerance >= 0.0)) throw InvalidInput("tolerance must be >= 0");
  ProxCheckResult out;
  const RegKind kinds[] = {RegKind::Ridge, RegKind::Lasso, RegKind::LogSumPenalty, RegKind::HalfNorm};
  std::uint64_t stream = 0;
  for (const RegKind kind : kinds) {
    for (const bool nonneg : {false, true}) {
      auto rng = make_rng({seed, stream++});
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      ProxCheckLine line{kind, nonneg, -std::numeric_limits<double>::infinity(), true};
      for (int i = 0; i < samples; ++i) {
        const double v = -10.0 + 20.0 * unit(rng);
        const double tau = std::pow(10.0, -3.0 + 4.0 * unit(rng));
        const double theta = std::pow(10.0, -2.0 + 2.0 * unit(rng));
        const RegularizerSpec spec{kind, theta, nonneg};
        const double x = prox(spec, v, tau);
        const double xo = prox_oracle_scalar(spec, v, tau, grid_n);
        const double gap = prox_objective(spec, v, tau, x) - prox_objective(spec, v, tau, xo);
        line.worst_gap = std::max(line.worst_gap, std::isnan(gap) ? INFINITY : gap);
      }
      line.pass = line.worst_gap <= tolerance;
      out.pass = out.pass && line.pass;
      out.lines.push_back(line);
    }
  }
  return out;
}

ProxFn perturbed_lasso_prox(double factor) {
  return [factor](const RegularizerSpec& spec, double v, double tau) {
    if (spec.kind == RegKind::Lasso) return prox_scalar(spec, v, tau * factor);
    return prox_scalar(spec, v, tau);
  };
}

namespace {

struct GradCase {
  LossSpec spec;
  Dataset data;
  double model_scale;
};

std::vector<GradCase> grad_cases(std::uint64_t seed) {
  auto rng = make_rng({seed, 0x67});
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  LabeledDataset cls;
  cls.features.resize(40, 6);
  cls.labels.resize(40);
  for (Eigen::Index i = 0; i < 40; ++i) {
    for (Eigen::Index j = 0; j < 6; ++j) cls.features(i, j) = normal(rng);
    cls.labels[i] = unit(rng) < 0.5 ? -1.0 : 1.0;
  }
  UnmixObservation reg;
  reg.dictionary.resize(25, 8);
  reg.observed.resize(25);
  for (Eigen::Index i = 0; i < 25; ++i) {
    for (Eigen::Index j = 0; j < 8; ++j) reg.dictionary(i, j) = unit(rng);
    reg.observed[i] = 2.0 * unit(rng);
  }
  return {{{LossKind::SquaredHinge, 1.0}, cls, 0.5},
          {{LossKind::Logistic, 1.0}, cls, 1.0},
          {{LossKind::LeastSquares, 1.0}, reg, 0.3},
          {{LossKind::Huber, 0.5}, reg, 0.3}};
}

}  // namespace

GradCheckResult grad_check(int points, double tolerance, std::uint64_t seed, double gradient_scale) {
  if (points < 1) throw InvalidInput("points must be >= 1");
  GradCheckResult out;
  std::uint64_t stream = 1;
  for (const GradCase& gc : grad_cases(seed)) {
    const auto problem = make_problem(gc.spec, gc.data);
    auto rng = make_rng({seed, stream++});
    std::normal_distribution<double> normal(0.0, 1.0);
    GradCheckLine line{gc.spec.kind, 0.0, true};
    for (int p = 0; p < points; ++p) {
      Model m = problem->zero_model();
      for (Eigen::Index k = 0; k < m.dim(); ++k) m.coef[k] = gc.model_scale * normal(rng);
      if (m.has_bias) m.bias = gc.model_scale * normal(rng);

      Model g;
      problem->value_grad(m, &g);
      const Eigen::Index n = m.dim() + (m.has_bias ? 1 : 0);
      Eigen::VectorXd analytic(n), fd(n);
      for (Eigen::Index k = 0; k < n; ++k) {
        double& x = k < m.dim() ? m.coef[k] : m.bias;
        const double x0 = x;
        const double h = 1e-6 * std::max(1.0, std::abs(x0));
        x = x0 + h;
        const double fp = problem->value(m);
        x = x0 - h;
        const double fm = problem->value(m);
        x = x0;
        fd[k] = (fp - fm) / (2.0 * h);
        analytic[k] = gradient_scale * (k < m.dim() ? g.coef[k] : g.bias);
      }
      const double rel = (analytic - fd).cwiseAbs().maxCoeff() /
                         std::max(fd.cwiseAbs().maxCoeff(), 1e-8);
      line.max_rel_error = std::max(line.max_rel_error, rel);
    }
    line.pass = line.max_rel_error < tolerance;
    out.pass = out.pass && line.pass;
    out.lines.push_back(line);
  }
  return out;
}

}  // namespace gistsparse
