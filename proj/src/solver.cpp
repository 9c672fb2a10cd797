#include "gistsparse/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "gistsparse/errors.hpp"

namespace gistsparse {

namespace {

std::string lambda_tag(double lambda) {
  std::ostringstream os;
  os.precision(17);
  os << "lambda=" << lambda;
  return os.str();
}

double squared_step(const Model& a, const Model& b) {
  double s = (a.coef - b.coef).squaredNorm();
  if (a.has_bias) s += (a.bias - b.bias) * (a.bias - b.bias);
  return s;
}

double dot_diff(const Model& x1, const Model& x0, const Model& g1, const Model& g0) {
  double s = (x1.coef - x0.coef).dot(g1.coef - g0.coef);
  if (x1.has_bias) s += (x1.bias - x0.bias) * (g1.bias - g0.bias);
  return s;
}

}  // namespace

void SolverConfig::validate() const {
  if (max_iter < 1) throw InvalidInput("max_iter must be positive");
  if (!(tol > 0.0)) throw InvalidInput("tol must be positive");
  if (!(mu_min > 0.0) || !(mu_min < mu_max)) throw InvalidInput("need 0 < mu_min < mu_max");
  if (!(sigma > 0.0 && sigma < 1.0)) throw InvalidInput("sigma must lie in (0, 1)");
  if (!monotone && nonmonotone_window < 1) throw InvalidInput("nonmonotone window must be >= 1");
}

std::string_view termination_name(Termination t) {
  return t == Termination::Tol ? "tol" : "max_iter";
}

bool SolverReport::same_result(const SolverReport& o) const {
  return model == o.model && objective_trace == o.objective_trace &&
         iterations == o.iterations && termination == o.termination &&
         kkt_max_residual == o.kkt_max_residual && kkt_mean_residual == o.kkt_mean_residual &&
         final_mu == o.final_mu;
}

double objective(const Problem& problem, const RegularizerSpec& reg, double lambda,
                 const Model& model) {
  return problem.value(model) + lambda * reg_value(reg, model.coef);
}

SolverReport gist_solve(const Problem& problem, const RegularizerSpec& reg, double lambda,
                        const Model& init, const SolverConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  cfg.validate();
  reg.validate();
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidInput("lambda must be finite and >= 0");
  if (init.dim() != problem.dim() || init.has_bias != problem.has_bias()) {
    throw DimensionMismatch("initial model does not match the problem");
  }

  Model x = init;
  Model g;
  double f = problem.value_grad(x, &g) + lambda * reg_value(reg, x.coef);
  if (!std::isfinite(f)) throw Diverged(0, "non-finite objective at the initial point");

  SolverReport rep;
  rep.objective_trace.reserve(std::min<std::size_t>(cfg.max_iter + 1, 4096));
  rep.objective_trace.push_back(f);

  double mu = std::clamp(problem.lipschitz(), cfg.mu_min, cfg.mu_max);
  Model x_prev, g_prev, xn, gn;
  xn = x;
  gn = g;
  Eigen::VectorXd point(x.dim());

  for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
    if (it > 1) {
      const double ss = squared_step(x, x_prev);
      if (ss > 0.0) mu = std::clamp(dot_diff(x, x_prev, g, g_prev) / ss, cfg.mu_min, cfg.mu_max);
    }
    double f_ref = f;
    if (!cfg.monotone) {
      const auto& tr = rep.objective_trace;
      const std::size_t w = std::min(cfg.nonmonotone_window, tr.size());
      f_ref = *std::max_element(tr.end() - static_cast<std::ptrdiff_t>(w), tr.end());
    }

    double fn = 0.0;
    bool stalled = false;
    for (;;) {
      point.noalias() = x.coef - g.coef / mu;
      prox_vector_into(reg, point, lambda / mu, xn.coef);
      xn.has_bias = x.has_bias;
      xn.bias = x.has_bias ? x.bias - g.bias / mu : 0.0;
      fn = problem.value_grad(xn, &gn) + lambda * reg_value(reg, xn.coef);
      if (!std::isfinite(fn)) {
        throw Diverged(it, "non-finite objective at iteration " + std::to_string(it));
      }
      if (fn <= f_ref - 0.5 * cfg.sigma * mu * squared_step(xn, x)) break;
      if (mu >= cfg.mu_max) {
        stalled = true;
        break;
      }
      mu = std::min(2.0 * mu, cfg.mu_max);
    }
    if (stalled && fn > f) {
      xn = x;
      gn = g;
      fn = f;
    }

    std::swap(x_prev, x);
    std::swap(g_prev, g);
    x = xn;
    g = gn;
    const double f_old = f;
    f = fn;
    rep.objective_trace.push_back(f);
    rep.iterations = it;
    if (std::abs(f_old - f) / std::max(1.0, std::abs(f_old)) < cfg.tol) {
      rep.termination = Termination::Tol;
      break;
    }
  }

  const KktReport kkt = subdifferential_check(reg, x.coef, g.coef, lambda, mu);
  rep.kkt_max_residual = kkt.max_residual;
  rep.kkt_mean_residual = kkt.mean_residual;
  if (x.has_bias) {
    const double rb = std::abs(g.bias);
    rep.kkt_max_residual = std::max(rep.kkt_max_residual, rb);
    const double n = static_cast<double>(x.dim());
    rep.kkt_mean_residual = (kkt.mean_residual * n + rb) / (n + 1.0);
  }
  rep.final_mu = mu;
  rep.model = std::move(x);
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

Model random_model(const Problem& problem, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Model m = problem.zero_model();
  for (Eigen::Index k = 0; k < m.dim(); ++k) m.coef[k] = scale * normal(rng);
  if (m.has_bias) m.bias = scale * normal(rng);
  return m;
}

double lasso_lambda_max(const Problem& problem) {
  Model m = problem.zero_model();
  Model g;
  problem.value_grad(m, &g);
  if (m.has_bias) {
    // L(0, b) is convex in b; drive dL/db to zero by bracketing + bisection.
    auto db = [&](double b) {
      m.bias = b;
      problem.value_grad(m, &g);
      return g.bias;
    };
    double lo = -1.0, hi = 1.0;
    while (db(lo) > 0.0 && lo > -1e12) lo *= 2.0;
    while (db(hi) < 0.0 && hi < 1e12) hi *= 2.0;
    for (std::size_t it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (db(mid) > 0.0 ? hi : lo) = mid;
    }
    m.bias = 0.5 * (lo + hi);
    problem.value_grad(m, &g);
  }
  return g.coef.size() ? g.coef.cwiseAbs().maxCoeff() : 0.0;
}

// ---------------------------------------------------------------------------

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  jobs = std::clamp<std::size_t>(jobs, 1, n);
  std::vector<std::exception_ptr> errors(n);
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t t = 0; t < jobs; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n || failed.load()) return;
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
            failed.store(true);
          }
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (n < 1) throw InvalidInput("grid needs at least one step");
  if (!(lo > 0.0) || !(hi >= lo)) throw InvalidInput("log grid needs 0 < lo <= hi");
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

PathResult run_path(const std::vector<double>& lambdas, const PathFit& fit, const PathOptions& opts) {
  if (lambdas.empty()) throw InvalidInput("empty lambda grid");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0) || !std::isfinite(lambdas[i])) throw InvalidInput("lambdas must be positive");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1])) throw InvalidInput("lambdas must be strictly increasing");
  }

  PathResult out;
  out.lambdas = lambdas;
  out.records.resize(lambdas.size());

  auto one = [&](std::size_t i) {
    const double lam = lambdas[i];
    try {
      const PathRecord* warm = (opts.warm_start && i > 0) ? &out.records[i - 1] : nullptr;
      PathRecord rec = fit(lam, warm);
      rec.lambda = lam;
      if (opts.evaluator) rec.metrics = opts.evaluator(rec);
      out.records[i] = std::move(rec);
    } catch (const Diverged& e) {
      throw Diverged(e.iteration(), lambda_tag(lam) + ": " + e.what());
    } catch (const InvalidInput& e) {
      throw InvalidInput(lambda_tag(lam) + ": " + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error(lambda_tag(lam) + ": " + e.what());
    }
  };
  parallel_for(lambdas.size(), opts.warm_start ? 1 : opts.jobs, one);
  return out;
}

PathResult reg_path(const Problem& problem, const RegularizerSpec& reg,
                    const std::vector<double>& lambdas, const SolverConfig& cfg,
                    const PathOptions& opts) {
  const PathFit fit = [&](double lam, const PathRecord* warm) {
    const Model init = warm ? warm->models.front() : problem.zero_model();
    SolverReport rep = gist_solve(problem, reg, lam, init, cfg);
    PathRecord rec;
    rec.active_count = rep.model.active_total();
    rec.objective = rep.objective();
    rec.iterations = rep.iterations;
    rec.kkt_max_residual = rep.kkt_max_residual;
    rec.models.push_back(std::move(rep.model));
    return rec;
  };
  return run_path(lambdas, fit, opts);
}

const PathRecord& path_select_by_sparsity(const PathResult& path, std::size_t k) {
  if (path.records.empty()) throw InvalidInput("empty path");
  for (const auto& r : path.records) {
    if (r.active_count == k) return r;
  }
  std::ostringstream os;
  os << "no record with " << k << " active coefficients; achieved:";
  for (const auto& r : path.records) os << ' ' << r.active_count;
  throw NoMatch(os.str());
}

const PathRecord& path_select_by_error(const PathResult& path, const std::string& metric) {
  if (path.records.empty()) throw InvalidInput("empty path");
  const PathRecord* best = nullptr;
  double best_v = std::numeric_limits<double>::infinity();
  for (const auto& r : path.records) {
    const auto it = r.metrics.find(metric);
    if (it == r.metrics.end()) throw InvalidInput("record lacks metric '" + metric + "'");
    if (best == nullptr || it->second < best_v) {
      best = &r;
      best_v = it->second;
    }
  }
  return *best;
}

}  // namespace gistsparse
