#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>

namespace gistsparse {

/// Separable penalties R(w) = sum_k g(|w_k|).
///   Ridge:          g(x) = x^2
///   Lasso:          g(x) = x
///   LogSumPenalty:  g(x) = log(x / theta + 1)
///   HalfNorm:       g(x) = x^(1/2)
enum class RegKind { Ridge, Lasso, LogSumPenalty, HalfNorm };

inline constexpr double kDefaultTheta = 0.1;

struct RegularizerSpec {
  RegKind kind = RegKind::Lasso;
  double theta = kDefaultTheta;  // LogSumPenalty only
  bool nonneg = false;           // adds the indicator of the nonnegative orthant

  /// Throws InvalidInput when theta is not positive for LogSumPenalty.
  void validate() const;
};

/// Short command-line names: l2, l1, lsp, lhalf.
std::string_view reg_name(RegKind kind);
RegKind parse_reg_kind(std::string_view name);

/// Penalty g applied to a magnitude x >= 0.
double penalty(const RegularizerSpec& spec, double x);

/// sum_k g(|w_k|). Throws InvalidInput on non-finite entries and Infeasible
/// when spec.nonneg and some w_k < 0.
double reg_value(const RegularizerSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& w);

/// tau * g(|x|) + (x - v)^2 / 2, the function minimized by the prox.
/// Returns +infinity for x < 0 under nonneg.
double prox_objective(const RegularizerSpec& spec, double v, double tau, double x);

/// Global minimizer of tau * g(|x|) + (x - v)^2 / 2 (over x >= 0 when
/// spec.nonneg, computed as the plain prox of max(v, 0)).
/// Exact zeros are returned whenever zero is a minimizer; ties within 1e-12
/// resolve toward zero.
double prox_scalar(const RegularizerSpec& spec, double v, double tau);

/// Coordinate-wise prox_scalar.
Eigen::VectorXd prox_vector(const RegularizerSpec& spec,
                            const Eigen::Ref<const Eigen::VectorXd>& v, double tau);
void prox_vector_into(const RegularizerSpec& spec,
                      const Eigen::Ref<const Eigen::VectorXd>& v, double tau,
                      Eigen::Ref<Eigen::VectorXd> out);

/// Brute-force prox: evaluate the objective on grid_n points spanning
/// [-(|v|+1), |v|+1] (or [0, |v|+1] under nonneg), then golden-section refine
/// the best bracket. Validation only; grid_n >= 1000.
double prox_oracle_scalar(const RegularizerSpec& spec, double v, double tau,
                          long grid_n = 100000);

struct KktReport {
  double max_residual = 0.0;
  double mean_residual = 0.0;
};

/// Stationarity residuals of 0 in grad + lambda * dR(w) (plus the normal cone
/// of the orthant under nonneg). For the nonconvex kinds, a zero coordinate
/// counts as stationary when it is a fixed point of the prox-gradient map with
/// step 1/mu; otherwise its residual is mu * |prox(w_k - grad_k/mu) - w_k|.
KktReport subdifferential_check(const RegularizerSpec& spec,
                                const Eigen::Ref<const Eigen::VectorXd>& w,
                                const Eigen::Ref<const Eigen::VectorXd>& grad,
                                double lambda, double mu = 1.0);

}  // namespace gistsparse
