#include "gistsparse/unmix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <tuple>

#include "gistsparse/errors.hpp"
#include "gistsparse/rng.hpp"

namespace gistsparse {

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, std::size_t line) {
  const std::string t = trim(s);
  if (t.empty()) throw ParseError(line, "empty value");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ParseError(line, "not a number: '" + t + "'");
  }
  if (used != t.size()) throw ParseError(line, "not a number: '" + t + "'");
  if (!std::isfinite(v)) throw ParseError(line, "non-finite value");
  return v;
}

}  // namespace

void SpectralLibrary::validate() const {
  if (spectra.cols() < 1 || spectra.rows() < 1) throw InvalidInput("empty spectral library");
  if (static_cast<Eigen::Index>(names.size()) != spectra.cols()) {
    throw DimensionMismatch("library names and spectra disagree");
  }
  if (!spectra.allFinite()) throw InvalidInput("non-finite reflectance");
  for (Eigen::Index j = 0; j < spectra.cols(); ++j) {
    if (spectra.col(j).norm() == 0.0) throw InvalidInput("spectrum '" + names[static_cast<std::size_t>(j)] + "' is all zero");
  }
}

double spectral_angle_deg(const Eigen::Ref<const Eigen::VectorXd>& a,
                          const Eigen::Ref<const Eigen::VectorXd>& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw InvalidInput("angle undefined for a zero spectrum");
  const double c = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

SpectralLibrary prune_library(const SpectralLibrary& lib, double min_deg) {
  lib.validate();
  std::vector<Eigen::Index> kept;
  for (Eigen::Index j = 0; j < lib.size(); ++j) {
    bool ok = true;
    for (const auto i : kept) {
      if (spectral_angle_deg(lib.spectra.col(j), lib.spectra.col(i)) < min_deg) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(j);
  }
  SpectralLibrary out;
  out.spectra.resize(lib.bands(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    out.spectra.col(static_cast<Eigen::Index>(c)) = lib.spectra.col(kept[c]);
    out.names.push_back(lib.names[static_cast<std::size_t>(kept[c])]);
  }
  return out;
}

SpectralLibrary parse_library(std::istream& in, double prune_deg) {
  std::string line;
  std::size_t lineno = 0;
  std::size_t bands = 0;
  bool have_header = false;
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    if (!have_header) {
      if (fields.size() < 2 || trim(fields[0]) != "name") {
        throw ParseError(lineno, "expected header 'name,band_1,...,band_m'");
      }
      bands = fields.size() - 1;
      have_header = true;
      continue;
    }
    if (fields.size() != bands + 1) {
      throw ParseError(lineno, "expected " + std::to_string(bands + 1) + " fields, got " +
                                   std::to_string(fields.size()));
    }
    names.push_back(trim(fields[0]));
    std::vector<double> vals(bands);
    for (std::size_t b = 0; b < bands; ++b) vals[b] = parse_double(fields[b + 1], lineno);
    rows.push_back(std::move(vals));
  }
  if (!have_header) throw ParseError(lineno == 0 ? 1 : lineno, "empty library file");
  if (rows.empty()) throw ParseError(lineno, "library has a header but no spectra");

  SpectralLibrary lib;
  lib.names = std::move(names);
  lib.spectra.resize(static_cast<Eigen::Index>(bands), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t b = 0; b < bands; ++b) {
      lib.spectra(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(j)) = rows[j][b];
    }
  }
  SpectralLibrary pruned = prune_library(lib, prune_deg);
  if (pruned.size() < 2) {
    throw InvalidInput("only " + std::to_string(pruned.size()) + " spectra survive pruning");
  }
  return pruned;
}

SpectralLibrary load_library(const std::string& path, double prune_deg) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open library file '" + path + "'");
  return parse_library(in, prune_deg);
}

void write_library(std::ostream& out, const SpectralLibrary& lib) {
  out << "name";
  for (Eigen::Index b = 0; b < lib.bands(); ++b) out << ",band_" << (b + 1);
  out << '\n';
  char buf[32];
  for (Eigen::Index j = 0; j < lib.size(); ++j) {
    out << lib.names[static_cast<std::size_t>(j)];
    for (Eigen::Index b = 0; b < lib.bands(); ++b) {
      std::snprintf(buf, sizeof buf, "%.17g", lib.spectra(b, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

SpectralLibrary synth_library(int q, int m, std::uint64_t seed) {
  if (q < 2) throw InvalidInput("synthetic library needs q >= 2");
  if (m < 8) throw InvalidInput("synthetic library needs m >= 8 bands");
  auto rng = make_rng({seed, 0x5ec7});
  std::uniform_int_distribution<int> n_bumps(3, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SpectralLibrary lib;
  lib.spectra.resize(m, q);
  Eigen::VectorXd s(m);
  int kept = 0;
  const long max_attempts = 100L * q;
  for (long attempt = 0; attempt < max_attempts && kept < q; ++attempt) {
    s.setZero();
    const int nb = n_bumps(rng);
    for (int k = 0; k < nb; ++k) {
      const double center = unit(rng) * (m - 1);
      const double width = (0.02 + 0.08 * unit(rng)) * m;
      const double amp = 0.2 + 0.8 * unit(rng);
      for (int b = 0; b < m; ++b) {
        const double z = (b - center) / width;
        s[b] += amp * std::exp(-0.5 * z * z);
      }
    }
    s /= s.maxCoeff();
    bool ok = true;
    for (int j = 0; j < kept && ok; ++j) {
      ok = spectral_angle_deg(s, lib.spectra.col(j)) >= kDefaultPruneDegrees;
    }
    if (!ok) continue;
    lib.spectra.col(kept) = s;
    char name[32];
    std::snprintf(name, sizeof name, "synth_%02d", kept);
    lib.names.emplace_back(name);
    ++kept;
  }
  if (kept < q) {
    throw InvalidInput("could not draw " + std::to_string(q) + " spectra separated by 15 degrees");
  }
  return lib;
}

MixtureSample simulate_mixture(const SpectralLibrary& lib, int n_act, double sigma,
                               std::uint64_t seed, std::uint64_t trial) {
  const int q = static_cast<int>(lib.size());
  if (n_act < 1 || n_act > q) {
    throw InvalidInput("n_act must lie in [1, " + std::to_string(q) + "]");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidInput("sigma must be >= 0");
  auto rng = make_rng({seed, trial});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Partial Fisher-Yates for the support.
  std::vector<int> idx(static_cast<std::size_t>(q));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < n_act; ++i) {
    std::uniform_int_distribution<int> pick(i, q - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  MixtureSample out;
  out.n_act = n_act;
  out.sigma = sigma;
  out.alpha_true = Eigen::VectorXd::Zero(q);
  for (int i = 0; i < n_act; ++i) {
    double w = unit(rng);
    while (w == 0.0) w = unit(rng);  // keep the support exact
    out.alpha_true[idx[static_cast<std::size_t>(i)]] = w;
  }
  out.observed = lib.spectra * out.alpha_true;
  if (sigma > 0.0) {
    for (Eigen::Index b = 0; b < out.observed.size(); ++b) out.observed[b] += sigma * normal(rng);
  }
  return out;
}

Eigen::VectorXd nnls(const Eigen::Ref<const Eigen::MatrixXd>& a,
                     const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (a.rows() != y.size()) throw DimensionMismatch("NNLS: dictionary and observation disagree");
  const Eigen::Index q = a.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(q);
  std::vector<bool> passive(static_cast<std::size_t>(q), false);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     a.cwiseAbs().colwise().sum().maxCoeff() *
                     static_cast<double>(std::max(a.rows(), q));

  auto solve_passive = [&](Eigen::VectorXd& s) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < q; ++j) {
      if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
    }
    Eigen::MatrixXd ap(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) ap.col(static_cast<Eigen::Index>(c)) = a.col(cols[c]);
    const Eigen::VectorXd z = ap.colPivHouseholderQr().solve(y);
    s.setZero();
    for (std::size_t c = 0; c < cols.size(); ++c) s[cols[c]] = z[static_cast<Eigen::Index>(c)];
  };

  Eigen::VectorXd w = a.transpose() * (y - a * x);
  Eigen::VectorXd s(q);
  const int max_outer = 3 * static_cast<int>(q) + 10;
  for (int outer = 0; outer < max_outer; ++outer) {
    Eigen::Index j_best = -1;
    double w_best = tol;
    for (Eigen::Index j = 0; j < q; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w[j] > w_best) {
        w_best = w[j];
        j_best = j;
      }
    }
    if (j_best < 0) break;
    passive[static_cast<std::size_t>(j_best)] = true;

    for (int inner = 0; inner < 3 * static_cast<int>(q) + 10; ++inner) {
      solve_passive(s);
      double alpha = 1.0;
      bool feasible = true;
      for (Eigen::Index j = 0; j < q; ++j) {
        if (passive[static_cast<std::size_t>(j)] && s[j] <= 0.0) {
          feasible = false;
          const double denom = x[j] - s[j];
          if (denom > 0.0) alpha = std::min(alpha, x[j] / denom);
        }
      }
      if (feasible) break;
      x += alpha * (s - x);
      for (Eigen::Index j = 0; j < q; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x[j] <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          x[j] = 0.0;
        }
      }
    }
    for (Eigen::Index j = 0; j < q; ++j) x[j] = passive[static_cast<std::size_t>(j)] ? std::max(s[j], 0.0) : 0.0;
    w = a.transpose() * (y - a * x);
  }
  return x;
}

// ---------------------------------------------------------------------------

Unmixer::Unmixer(const SpectralLibrary& lib) {
  lib.validate();
  dict_ = std::make_shared<const Eigen::MatrixXd>(lib.spectra);
  auto g = std::make_shared<Eigen::MatrixXd>(dict_->transpose() * *dict_);
  lipschitz_ = max_eigenvalue_psd(*g);
  gram_ = std::move(g);
}

RegressionProblem Unmixer::problem(const Eigen::Ref<const Eigen::VectorXd>& observed) const {
  return RegressionProblem({LossKind::LeastSquares, 1.0}, dict_, gram_, lipschitz_, observed);
}

SolverReport Unmixer::solve(const Eigen::Ref<const Eigen::VectorXd>& observed, RegularizerSpec reg,
                            double lambda, const SolverConfig& cfg, const Model* init) const {
  reg.nonneg = true;
  const RegressionProblem p = problem(observed);
  return gist_solve(p, reg, lambda, init ? *init : p.zero_model(), cfg);
}

Eigen::VectorXd Unmixer::nnls(const Eigen::Ref<const Eigen::VectorXd>& observed) const {
  return gistsparse::nnls(*dict_, observed);
}

SolverReport unmix_solve(const SpectralLibrary& lib, const Eigen::Ref<const Eigen::VectorXd>& observed,
                         const RegularizerSpec& reg, double lambda, const SolverConfig& cfg) {
  if (!reg.nonneg) throw InvalidInput("unmixing requires the nonnegative regularizer");
  if (observed.size() != lib.bands()) throw DimensionMismatch("observation and library band counts differ");
  return Unmixer(lib).solve(observed, reg, lambda, cfg);
}

Eigen::VectorXd keep_top_k(const Eigen::Ref<const Eigen::VectorXd>& alpha, int k) {
  if (k < 0 || k > alpha.size()) throw InvalidInput("k out of range");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(alpha.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return alpha[a] > alpha[b]; });
  Eigen::VectorXd out = Eigen::VectorXd::Zero(alpha.size());
  for (int i = 0; i < k; ++i) out[order[static_cast<std::size_t>(i)]] = alpha[order[static_cast<std::size_t>(i)]];
  return out;
}

Eigen::VectorXd ls_threshold_baseline(const SpectralLibrary& lib,
                                      const Eigen::Ref<const Eigen::VectorXd>& observed, int k,
                                      bool refit) {
  lib.validate();
  if (k < 0 || k > lib.size()) throw InvalidInput("k must lie in [0, q]");
  if (observed.size() != lib.bands()) throw DimensionMismatch("observation and library band counts differ");
  const Eigen::VectorXd full = nnls(lib.spectra, observed);
  Eigen::VectorXd out = keep_top_k(full, k);
  if (!refit || k == 0) return out;
  std::vector<Eigen::Index> support;
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    if (out[j] != 0.0) support.push_back(j);
  }
  Eigen::MatrixXd sub(lib.bands(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t c = 0; c < support.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = lib.spectra.col(support[c]);
  const Eigen::VectorXd z = nnls(sub, observed);
  out.setZero();
  for (std::size_t c = 0; c < support.size(); ++c) out[support[c]] = z[static_cast<Eigen::Index>(c)];
  return out;
}

Eigen::VectorXd hard_threshold(const Eigen::Ref<const Eigen::VectorXd>& alpha, double threshold) {
  return (alpha.array() > threshold).select(alpha, 0.0);
}

double model_error(const Eigen::Ref<const Eigen::VectorXd>& alpha,
                   const Eigen::Ref<const Eigen::VectorXd>& alpha_true) {
  if (alpha.size() != alpha_true.size()) throw DimensionMismatch("model_error: length mismatch");
  return (alpha - alpha_true).squaredNorm();
}

int count_selected(const Eigen::Ref<const Eigen::VectorXd>& alpha, double eps) {
  return static_cast<int>((alpha.array().abs() > eps).count());
}

// ---------------------------------------------------------------------------

std::string_view method_name(UnmixMethod m) {
  switch (m) {
    case UnmixMethod::Ridge: return "l2";
    case UnmixMethod::Lasso: return "l1";
    case UnmixMethod::LogSumPenalty: return "lsp";
    case UnmixMethod::HalfNorm: return "lhalf";
    case UnmixMethod::LsThreshold: return "ls_threshold";
  }
  return "?";
}

UnmixMethod method_from_reg(RegKind k) {
  switch (k) {
    case RegKind::Ridge: return UnmixMethod::Ridge;
    case RegKind::Lasso: return UnmixMethod::Lasso;
    case RegKind::LogSumPenalty: return UnmixMethod::LogSumPenalty;
    case RegKind::HalfNorm: return UnmixMethod::HalfNorm;
  }
  return UnmixMethod::Lasso;
}

namespace {

RegKind reg_of(UnmixMethod m) {
  switch (m) {
    case UnmixMethod::Ridge: return RegKind::Ridge;
    case UnmixMethod::Lasso: return RegKind::Lasso;
    case UnmixMethod::LogSumPenalty: return RegKind::LogSumPenalty;
    case UnmixMethod::HalfNorm: return RegKind::HalfNorm;
    case UnmixMethod::LsThreshold: break;
  }
  throw InvalidInput("method has no regularizer");
}

}  // namespace

std::string_view path_init_name(PathInit p) {
  switch (p) {
    case PathInit::Zero: return "zero";
    case PathInit::Warm: return "warm";
    case PathInit::BestOf: return "best";
  }
  return "?";
}

PathInit parse_path_init(std::string_view name) {
  if (name == "zero") return PathInit::Zero;
  if (name == "warm") return PathInit::Warm;
  if (name == "best") return PathInit::BestOf;
  throw InvalidInput("unknown path initialization '" + std::string(name) + "'");
}

std::vector<double> default_unmix_lambdas() { return log_grid(1e-5, 1e3, 33); }

UnmixExperiment unmix_experiment(const SpectralLibrary& lib, const UnmixExperimentConfig& cfg) {
  lib.validate();
  if (cfg.trials < 1) throw InvalidInput("trials must be >= 1");
  if (cfg.sigmas.empty() || cfg.n_acts.empty() || cfg.methods.empty()) {
    throw InvalidInput("empty sigma, n_act or method set");
  }
  const std::vector<double> lambdas = cfg.lambdas.empty() ? default_unmix_lambdas() : cfg.lambdas;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0) || (i > 0 && !(lambdas[i] > lambdas[i - 1]))) {
      throw InvalidInput("lambdas must be positive and strictly increasing");
    }
  }
  for (const int n : cfg.n_acts) {
    if (n < 1 || n > lib.size()) throw InvalidInput("n_act out of range");
  }
  const Unmixer unmixer(lib);

  const std::size_t nm = cfg.methods.size(), na = cfg.n_acts.size(), ns = cfg.sigmas.size();
  const std::size_t nt = static_cast<std::size_t>(cfg.trials), nl = lambdas.size();
  const std::size_t units = nm * na * ns * nt;

  struct UnitOut {
    std::vector<double> errors;
    std::vector<int> selected;
    UnmixTrialSummary summary;
  };
  std::vector<UnitOut> outs(units);

  // Unit index order: method, n_act, sigma, trial.
  parallel_for(units, cfg.jobs, [&](std::size_t u) {
    const std::size_t t = u % nt;
    const std::size_t s = (u / nt) % ns;
    const std::size_t a = (u / (nt * ns)) % na;
    const std::size_t m = u / (nt * ns * na);
    const UnmixMethod method = cfg.methods[m];
    const int n_act = cfg.n_acts[a];
    const double sigma = cfg.sigmas[s];
    const MixtureSample mix = simulate_mixture(lib, n_act, sigma, cfg.seed, t);

    UnitOut& out = outs[u];
    out.errors.resize(nl);
    out.selected.resize(nl);
    out.summary = {method, n_act, sigma, static_cast<int>(t)};

    if (method == UnmixMethod::LsThreshold) {
      const Eigen::VectorXd full = unmixer.nnls(mix.observed);
      for (std::size_t l = 0; l < nl; ++l) {
        const Eigen::VectorXd alpha = hard_threshold(full, lambdas[l]);
        out.errors[l] = model_error(alpha, mix.alpha_true);
        out.selected[l] = count_selected(alpha, kNnlsSelectEps);
      }
      out.summary.matched_error = model_error(keep_top_k(full, n_act), mix.alpha_true);
    } else {
      RegularizerSpec reg{reg_of(method), cfg.theta, true};
      Model prev;
      for (std::size_t l = 0; l < nl; ++l) {
        const bool warm = cfg.init != PathInit::Zero && l > 0;
        SolverReport rep = unmixer.solve(mix.observed, reg, lambdas[l], cfg.solver,
                                         warm ? &prev : nullptr);
        if (cfg.init == PathInit::BestOf && warm) {
          SolverReport cold = unmixer.solve(mix.observed, reg, lambdas[l], cfg.solver);
          if (cold.objective() <= rep.objective()) rep = std::move(cold);
        }
        out.errors[l] = model_error(rep.model.coef, mix.alpha_true);
        out.selected[l] = static_cast<int>(rep.model.nonzero_count());
        prev = std::move(rep.model);
      }
      for (std::size_t l = 0; l < nl; ++l) {
        if (out.selected[l] == n_act) {
          out.summary.matched_error = out.errors[l];
          break;
        }
      }
    }
    std::size_t best = 0;
    for (std::size_t l = 1; l < nl; ++l) {
      if (out.errors[l] < out.errors[best]) best = l;
    }
    out.summary.min_error = out.errors[best];
    out.summary.n_selected_at_min = out.selected[best];
    out.summary.lambda_at_min = lambdas[best];
  });

  UnmixExperiment exp;
  exp.lambdas = lambdas;
  exp.rows.reserve(units * nl);
  exp.summaries.reserve(units);
  for (std::size_t m = 0; m < nm; ++m) {
    for (std::size_t a = 0; a < na; ++a) {
      for (std::size_t s = 0; s < ns; ++s) {
        const std::size_t base = ((m * na + a) * ns + s) * nt;
        for (std::size_t l = 0; l < nl; ++l) {
          for (std::size_t t = 0; t < nt; ++t) {
            const UnitOut& o = outs[base + t];
            exp.rows.push_back({cfg.methods[m], cfg.n_acts[a], cfg.sigmas[s], lambdas[l],
                                static_cast<int>(t), o.errors[l], o.selected[l]});
          }
        }
        for (std::size_t t = 0; t < nt; ++t) exp.summaries.push_back(outs[base + t].summary);
      }
    }
  }
  return exp;
}

std::vector<LambdaMean> mean_error_by_lambda(const UnmixExperiment& exp) {
  std::vector<LambdaMean> out;
  std::size_t i = 0;
  while (i < exp.rows.size()) {
    const UnmixRow& first = exp.rows[i];
    double se = 0.0, ss = 0.0;
    std::size_t n = 0;
    while (i < exp.rows.size() && exp.rows[i].method == first.method &&
           exp.rows[i].n_act == first.n_act && exp.rows[i].sigma == first.sigma &&
           exp.rows[i].lambda == first.lambda) {
      se += exp.rows[i].model_error;
      ss += exp.rows[i].n_selected;
      ++n;
      ++i;
    }
    out.push_back({first.method, first.n_act, first.sigma, first.lambda, se / n, ss / n});
  }
  return out;
}

std::vector<CountMean> mean_error_by_count(const UnmixExperiment& exp) {
  // Groups keep first-appearance order of (method, n_act, sigma); counts ascend.
  std::vector<CountMean> out;
  std::size_t i = 0;
  while (i < exp.rows.size()) {
    const UnmixRow& first = exp.rows[i];
    std::map<int, std::pair<double, int>> acc;
    while (i < exp.rows.size() && exp.rows[i].method == first.method &&
           exp.rows[i].n_act == first.n_act && exp.rows[i].sigma == first.sigma) {
      auto& e = acc[exp.rows[i].n_selected];
      e.first += exp.rows[i].model_error;
      ++e.second;
      ++i;
    }
    for (const auto& [count, e] : acc) {
      out.push_back({first.method, first.n_act, first.sigma, count, e.first / e.second, e.second});
    }
  }
  return out;
}

std::vector<SelectionMean> selection_means(const UnmixExperiment& exp) {
  std::vector<SelectionMean> out;
  std::size_t i = 0;
  const auto& s = exp.summaries;
  while (i < s.size()) {
    const UnmixTrialSummary& first = s[i];
    double matched = 0.0, min_err = 0.0, sel = 0.0;
    int n_matched = 0, n = 0;
    while (i < s.size() && s[i].method == first.method && s[i].n_act == first.n_act &&
           s[i].sigma == first.sigma) {
      if (!std::isnan(s[i].matched_error)) {
        matched += s[i].matched_error;
        ++n_matched;
      }
      min_err += s[i].min_error;
      sel += s[i].n_selected_at_min;
      ++n;
      ++i;
    }
    out.push_back({first.method, first.n_act, first.sigma,
                   n_matched ? matched / n_matched : std::numeric_limits<double>::quiet_NaN(),
                   n_matched, min_err / n, sel / n});
  }
  return out;
}

double min_mean_error(const UnmixExperiment& exp, UnmixMethod m, int n_act, double sigma) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : mean_error_by_lambda(exp)) {
    if (r.method == m && r.n_act == n_act && r.sigma == sigma) best = std::min(best, r.mean_error);
  }
  if (std::isinf(best)) throw NoMatch("no rows for the requested configuration");
  return best;
}

double mean_error_at_count(const UnmixExperiment& exp, UnmixMethod m, int n_act, double sigma,
                           int count) {
  double sum = 0.0;
  int n = 0;
  for (const auto& r : exp.rows) {
    if (r.method == m && r.n_act == n_act && r.sigma == sigma && r.n_selected == count) {
      sum += r.model_error;
      ++n;
    }
  }
  return n ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace gistsparse
