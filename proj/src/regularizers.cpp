#include "gistsparse/regularizers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "gistsparse/errors.hpp"

namespace gistsparse {

namespace {

constexpr double kTieTolerance = 1e-12;

void check_tau(double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw InvalidInput("prox threshold tau must be finite and >= 0");
  }
}

// Picks the best of 0 and the candidate magnitudes for the plain prox of a = |v| >= 0.
template <std::size_t N>
double best_candidate(const RegularizerSpec& spec, double a, double tau,
                      const std::array<double, N>& cands, std::size_t count) {
  const double h0 = prox_objective(spec, a, tau, 0.0);
  double best = 0.0;
  double best_h = h0;
  for (std::size_t i = 0; i < count; ++i) {
    const double x = cands[i];
    if (!(x > 0.0)) continue;
    const double h = prox_objective(spec, a, tau, x);
    if (h < best_h) {
      best_h = h;
      best = x;
    }
  }
  if (best != 0.0 && !(best_h < h0 - kTieTolerance)) return 0.0;
  return best;
}

double prox_lsp_magnitude(const RegularizerSpec& spec, double a, double tau) {
  const double theta = spec.theta;
  // Stationary points of tau*log(x/theta + 1) + (x - a)^2/2 on x > 0 solve
  // x^2 + (theta - a) x + (tau - a theta) = 0.
  const double disc = (a + theta) * (a + theta) - 4.0 * tau;
  if (disc < 0.0) return 0.0;
  const double s = std::sqrt(disc);
  const std::array<double, 2> roots{0.5 * ((a - theta) + s), 0.5 * ((a - theta) - s)};
  return best_candidate(spec, a, tau, roots, roots.size());
}

double prox_half_magnitude(const RegularizerSpec& spec, double a, double tau) {
  if (a <= 0.0) return 0.0;
  // With u = sqrt(x), stationarity is the depressed cubic u^3 - a u + tau/2 = 0.
  // Positive roots exist only in the three-real-root regime 27 tau^2 / 4 <= 4 a^3.
  const double q = 0.5 * tau;
  if (27.0 * q * q > 4.0 * a * a * a) return 0.0;
  const double r = 2.0 * std::sqrt(a / 3.0);
  const double arg = std::clamp(-(1.5 * q / a) * std::sqrt(3.0 / a), -1.0, 1.0);
  const double phi = std::acos(arg);
  std::array<double, 3> xs{};
  for (int k = 0; k < 3; ++k) {
    double u = r * std::cos(phi / 3.0 - 2.0 * std::numbers::pi * k / 3.0);
    // One Newton polish on the cubic.
    const double f = u * u * u - a * u + q;
    const double df = 3.0 * u * u - a;
    if (df != 0.0) {
      const double un = u - f / df;
      if (std::isfinite(un) && std::abs(un * un * un - a * un + q) <= std::abs(f)) u = un;
    }
    xs[k] = u > 0.0 ? u * u : 0.0;
  }
  return best_candidate(spec, a, tau, xs, xs.size());
}

double prox_plain(const RegularizerSpec& spec, double v, double tau) {
  if (tau == 0.0 || v == 0.0) return v;
  const double a = std::abs(v);
  double m = 0.0;
  switch (spec.kind) {
    case RegKind::Ridge:
      return v / (1.0 + 2.0 * tau);
    case RegKind::Lasso:
      m = a > tau ? a - tau : 0.0;
      break;
    case RegKind::LogSumPenalty:
      m = prox_lsp_magnitude(spec, a, tau);
      break;
    case RegKind::HalfNorm:
      m = prox_half_magnitude(spec, a, tau);
      break;
  }
  if (m == 0.0) return 0.0;
  return std::copysign(m, v);
}

}  // namespace

void RegularizerSpec::validate() const {
  if (kind == RegKind::LogSumPenalty && !(theta > 0.0 && std::isfinite(theta))) {
    throw InvalidInput("log-sum penalty requires theta > 0");
  }
}

std::string_view reg_name(RegKind kind) {
  switch (kind) {
    case RegKind::Ridge: return "l2";
    case RegKind::Lasso: return "l1";
    case RegKind::LogSumPenalty: return "lsp";
    case RegKind::HalfNorm: return "lhalf";
  }
  return "?";
}

RegKind parse_reg_kind(std::string_view name) {
  if (name == "l2" || name == "ridge") return RegKind::Ridge;
  if (name == "l1" || name == "lasso") return RegKind::Lasso;
  if (name == "lsp") return RegKind::LogSumPenalty;
  if (name == "lhalf" || name == "half") return RegKind::HalfNorm;
  throw InvalidInput("unknown regularizer '" + std::string(name) + "'");
}

double penalty(const RegularizerSpec& spec, double x) {
  switch (spec.kind) {
    case RegKind::Ridge: return x * x;
    case RegKind::Lasso: return x;
    case RegKind::LogSumPenalty: return std::log1p(x / spec.theta);
    case RegKind::HalfNorm: return std::sqrt(x);
  }
  return 0.0;
}

double reg_value(const RegularizerSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& w) {
  spec.validate();
  double total = 0.0;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    const double x = w[k];
    if (!std::isfinite(x)) throw InvalidInput("non-finite coefficient");
    if (spec.nonneg && x < 0.0) {
      throw Infeasible("coefficient " + std::to_string(k) + " is negative under nonnegativity");
    }
    total += penalty(spec, std::abs(x));
  }
  return total;
}

double prox_objective(const RegularizerSpec& spec, double v, double tau, double x) {
  if (spec.nonneg && x < 0.0) return std::numeric_limits<double>::infinity();
  const double d = x - v;
  return tau * penalty(spec, std::abs(x)) + 0.5 * d * d;
}

double prox_scalar(const RegularizerSpec& spec, double v, double tau) {
  check_tau(tau);
  if (!std::isfinite(v)) throw InvalidInput("prox point must be finite");
  spec.validate();
  if (spec.nonneg) v = std::max(v, 0.0);
  return prox_plain(spec, v, tau);
}

void prox_vector_into(const RegularizerSpec& spec,
                      const Eigen::Ref<const Eigen::VectorXd>& v, double tau,
                      Eigen::Ref<Eigen::VectorXd> out) {
  check_tau(tau);
  spec.validate();
  if (out.size() != v.size()) throw DimensionMismatch("prox output size mismatch");
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    double x = v[k];
    if (!std::isfinite(x)) throw InvalidInput("prox point must be finite");
    if (spec.nonneg) x = std::max(x, 0.0);
    out[k] = prox_plain(spec, x, tau);
  }
}

Eigen::VectorXd prox_vector(const RegularizerSpec& spec,
                            const Eigen::Ref<const Eigen::VectorXd>& v, double tau) {
  Eigen::VectorXd out(v.size());
  prox_vector_into(spec, v, tau, out);
  return out;
}

double prox_oracle_scalar(const RegularizerSpec& spec, double v, double tau, long grid_n) {
  check_tau(tau);
  spec.validate();
  if (!std::isfinite(v)) throw InvalidInput("prox point must be finite");
  if (grid_n < 1000) throw InvalidInput("oracle grid needs at least 1000 points");

  const double radius = std::abs(v) + 1.0;
  const double lo = spec.nonneg ? 0.0 : -radius;
  const double hi = radius;
  const double step = (hi - lo) / static_cast<double>(grid_n - 1);
  auto h = [&](double x) { return prox_objective(spec, v, tau, x); };

  long best_i = 0;
  double best_h = h(lo);
  for (long i = 1; i < grid_n; ++i) {
    const double hv = h(lo + step * static_cast<double>(i));
    if (hv < best_h) {
      best_h = hv;
      best_i = i;
    }
  }
  double best_x = lo + step * static_cast<double>(best_i);

  // Golden-section search on the bracket around the best grid point.
  double a = std::max(lo, best_x - step);
  double b = std::min(hi, best_x + step);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double hc = h(c), hd = h(d);
  for (int it = 0; it < 200 && (b - a) > 1e-15 * (1.0 + std::abs(best_x)); ++it) {
    if (hc < hd) {
      b = d;
      d = c;
      hd = hc;
      c = b - inv_phi * (b - a);
      hc = h(c);
    } else {
      a = c;
      c = d;
      hc = hd;
      d = a + inv_phi * (b - a);
      hd = h(d);
    }
  }
  const double refined = 0.5 * (a + b);
  if (h(refined) < best_h) {
    best_x = refined;
    best_h = h(refined);
  }
  if (h(0.0) <= best_h) best_x = 0.0;
  return best_x;
}

KktReport subdifferential_check(const RegularizerSpec& spec,
                                const Eigen::Ref<const Eigen::VectorXd>& w,
                                const Eigen::Ref<const Eigen::VectorXd>& grad,
                                double lambda, double mu) {
  if (w.size() != grad.size()) throw DimensionMismatch("w and grad lengths differ");
  if (!(lambda >= 0.0)) throw InvalidInput("lambda must be >= 0");
  if (!(mu > 0.0)) throw InvalidInput("mu must be > 0");
  spec.validate();

  KktReport rep;
  if (w.size() == 0) return rep;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    const double x = w[k];
    const double g = grad[k];
    double r = 0.0;
    if (x == 0.0) {
      switch (spec.kind) {
        case RegKind::Ridge:
          r = spec.nonneg ? std::max(0.0, -g) : std::abs(g);
          break;
        case RegKind::Lasso:
          r = spec.nonneg ? std::max(0.0, -g - lambda) : std::max(0.0, std::abs(g) - lambda);
          break;
        case RegKind::LogSumPenalty:
        case RegKind::HalfNorm:
          r = mu * std::abs(prox_scalar(spec, -g / mu, lambda / mu));
          break;
      }
    } else {
      const double s = x > 0.0 ? 1.0 : -1.0;
      const double a = std::abs(x);
      double dg = 0.0;  // derivative of g at |x|
      switch (spec.kind) {
        case RegKind::Ridge: dg = 2.0 * a; break;
        case RegKind::Lasso: dg = 1.0; break;
        case RegKind::LogSumPenalty: dg = 1.0 / (a + spec.theta); break;
        case RegKind::HalfNorm: dg = 0.5 / std::sqrt(a); break;
      }
      r = std::abs(g + lambda * s * dg);
    }
    rep.max_residual = std::max(rep.max_residual, r);
    sum += r;
  }
  rep.mean_residual = sum / static_cast<double>(w.size());
  return rep;
}

}  // namespace gistsparse
