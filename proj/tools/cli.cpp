#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include "gistsparse/classify.hpp"
#include "gistsparse/errors.hpp"
#include "gistsparse/solver.hpp"
#include "gistsparse/unmix.hpp"
#include "gistsparse/verify.hpp"

namespace gistsparse::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string cell_text(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return format_double(std::get<double>(c));
}

std::string json_cell(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) {
    // Cell strings are names and identifiers; only quotes and backslashes
    // could need escaping.
    std::string out = "\"";
    for (const char ch : *s) {
      if (ch == '"' || ch == '\\') out += '\\';
      out += ch;
    }
    return out + "\"";
  }
  if (const auto* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return "null";
  }
  return cell_text(c);
}

}  // namespace

void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t j = 0; j < t.columns.size(); ++j) os << (j ? "," : "") << t.columns[j];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << cell_text(row[j]);
    os << '\n';
  }
}

void write_json(std::ostream& os, const std::vector<const Table*>& tables) {
  os << "{";
  for (std::size_t k = 0; k < tables.size(); ++k) {
    const Table& t = *tables[k];
    os << (k ? ",\n" : "\n") << "\"" << t.name << "\": [";
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      os << (i ? ",\n  {" : "\n  {");
      for (std::size_t j = 0; j < t.columns.size(); ++j) {
        os << (j ? ", " : "") << "\"" << t.columns[j] << "\": " << json_cell(t.rows[i][j]);
      }
      os << "}";
    }
    os << (t.rows.empty() ? "]" : "\n]");
  }
  os << "\n}\n";
}

namespace {

/// Thrown for configuration problems detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridOptions {
  double lambda_min;
  double lambda_max;
  int lambda_steps;

  std::vector<double> grid() const {
    if (!(lambda_min > 0.0) || !std::isfinite(lambda_min) || !std::isfinite(lambda_max)) {
      throw UsageError("--lambda-min must be positive and finite");
    }
    if (lambda_steps < 1) throw UsageError("--lambda-steps must be >= 1");
    if (lambda_steps == 1 ? lambda_max != lambda_min : !(lambda_max > lambda_min)) {
      throw UsageError("--lambda-max must exceed --lambda-min (or equal it with one step)");
    }
    return log_grid(lambda_min, lambda_max, static_cast<std::size_t>(lambda_steps));
  }
};

struct OutputOptions {
  std::string out;
  std::string format = "csv";
  std::string summary_out;
};

struct SolverOptions {
  std::optional<std::size_t> max_iter;
  std::optional<double> tol;
  SolverConfig apply(SolverConfig c) const {
    if (max_iter) c.max_iter = *max_iter;
    if (tol) c.tol = *tol;
    try {
      c.validate();
    } catch (const InvalidInput& e) {
      throw UsageError(e.what());
    }
    return c;
  }
};

void add_grid(CLI::App* cmd, GridOptions& g) {
  cmd->add_option("--lambda-min", g.lambda_min, "Smallest lambda of the log-spaced grid")
      ->capture_default_str();
  cmd->add_option("--lambda-max", g.lambda_max, "Largest lambda")->capture_default_str();
  cmd->add_option("--lambda-steps", g.lambda_steps, "Number of grid points")->capture_default_str();
}

void add_output(CLI::App* cmd, OutputOptions& o, bool summary) {
  cmd->add_option("--out", o.out, "Result file (default: standard output)");
  cmd->add_option("--format", o.format, "Result format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  if (summary) cmd->add_option("--summary-out", o.summary_out, "Also write the summary blocks here");
}

void add_solver(CLI::App* cmd, SolverOptions& s) {
  cmd->add_option("--max-iter", s.max_iter, "Solver iteration cap");
  cmd->add_option("--tol", s.tol, "Solver relative objective tolerance");
}

std::vector<RegKind> parse_regs(const std::vector<std::string>& names) {
  std::vector<RegKind> out;
  const auto add = [&](RegKind k) {
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  };
  for (const auto& n : names) {
    if (n == "all") {
      for (RegKind k : {RegKind::Ridge, RegKind::Lasso, RegKind::LogSumPenalty, RegKind::HalfNorm}) add(k);
    } else {
      add(parse_reg_kind(n));
    }
  }
  // Canonical order so that "--reg l1 --reg l2" and "--reg l2 --reg l1" agree.
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t resolve_jobs(int jobs) {
  if (jobs < 0) throw UsageError("--jobs must be >= 0");
  if (jobs == 0) return std::max(1u, std::thread::hardware_concurrency());
  return static_cast<std::size_t>(jobs);
}

void check_theta(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw UsageError("--theta must be positive");
}

/// Opens the result sink up front so an unwritable path fails before any work.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
      if (!*file_) throw UsageError("cannot write output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : fallback_; }
  bool is_file() const { return file_ != nullptr; }
  void close(const std::string& path) {
    if (!file_) return;
    file_->close();
    if (!*file_) throw std::runtime_error("failed writing '" + path + "'");
  }

 private:
  std::ostream& fallback_;
  std::unique_ptr<std::ofstream> file_;
};

void emit(const OutputOptions& o, const Table& rows, const std::vector<Table>& summaries,
          std::ostream& out, std::ostream& err) {
  Sink sink(o.out, out);
  Sink summary_file(o.summary_out, out);
  if (o.format == "json") {
    std::vector<const Table*> all{&rows};
    for (const auto& s : summaries) all.push_back(&s);
    write_json(sink.stream(), all);
  } else {
    write_csv(sink.stream(), rows);
  }
  sink.close(o.out);

  std::ostream& summary = sink.is_file() ? out : err;
  for (const auto& s : summaries) {
    summary << "# " << s.name << '\n';
    write_csv(summary, s);
  }
  if (summary_file.is_file()) {
    for (const auto& s : summaries) {
      summary_file.stream() << "# " << s.name << '\n';
      write_csv(summary_file.stream(), s);
    }
    summary_file.close(o.summary_out);
  }
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return v.empty() ? std::nan("") : s / static_cast<double>(v.size());
}

// ---------------------------------------------------------------------------
// toy-classify

struct ToyOptions {
  std::vector<std::string> regs{"all"};
  // The classifier's loss is normalized by the sample count, so sparsity sets
  // in around 1e-2; this range covers dense through all-zero models.
  GridOptions grid{1e-3, 1e1, 18};
  int seeds = 10;
  std::uint64_t seed = 0;
  int n_per_class = 100;
  int d_noise = 18;
  int test_factor = 10;
  double theta = kDefaultTheta;
  int jobs = 1;
  OutputOptions output;
  SolverOptions solver;
};

struct ToyRow {
  double kappa, accuracy, angle, objective;
  long long n_total, n_informative, iterations;
};

int cmd_toy_classify(const ToyOptions& o, std::ostream& out, std::ostream& err) {
  const auto regs = parse_regs(o.regs);
  const auto lambdas = o.grid.grid();
  if (o.seeds < 1) throw UsageError("--seeds must be >= 1");
  if (o.n_per_class < 1) throw UsageError("--n-per-class must be >= 1");
  if (o.d_noise < 0) throw UsageError("--d-noise must be >= 0");
  if (o.test_factor < 1) throw UsageError("--test-factor must be >= 1");
  check_theta(o.theta);
  const SolverConfig solver = o.solver.apply({});
  const std::size_t jobs = resolve_jobs(o.jobs);
  // Fail on an unwritable path before the run, not after it.
  { Sink probe(o.output.out, out); Sink probe2(o.output.summary_out, out); }

  const std::size_t n_l = lambdas.size(), n_s = static_cast<std::size_t>(o.seeds);
  std::vector<ToyRow> results(regs.size() * n_l * n_s);
  const auto at = [&](std::size_t r, std::size_t l, std::size_t s) -> ToyRow& {
    return results[(r * n_l + l) * n_s + s];
  };

  parallel_for(regs.size() * n_s, jobs, [&](std::size_t task) {
    const std::size_t r = task / n_s, s = task % n_s;
    const std::uint64_t seed = o.seed + s;
    ToySpec spec;
    spec.n_per_class = o.n_per_class;
    spec.d_noise = o.d_noise;
    spec.seed = seed;
    const ToySplit split = make_toy_split(spec, o.test_factor);
    const RegularizerSpec reg{regs[r], o.theta, false};
    PathResult path;
    try {
      path = ova_path(split.train, reg, lambdas, solver);
    } catch (const Diverged& e) {
      throw Diverged(e.iteration(), "reg=" + std::string(reg_name(regs[r])) +
                                        " seed=" + std::to_string(seed) + " " + e.what());
    }
    for (std::size_t l = 0; l < n_l; ++l) {
      const PathRecord& rec = path.records[l];
      const MulticlassModel mm{rec.models};
      const auto cm = confusion_matrix(split.test.labels, predict(mm, split.test.features), 2);
      ToyRow& row = at(r, l, s);
      row.kappa = kappa(cm);
      row.accuracy = accuracy(cm);
      row.n_total = static_cast<long long>(mm.active_features());
      row.n_informative = 0;
      for (int j = 0; j < 2; ++j) {
        for (const auto& m : rec.models) {
          if (m.coef[j] != 0.0) {
            ++row.n_informative;
            break;
          }
        }
      }
      // Class 1 sits at +mean_offset, so its model is aligned with the Bayes
      // direction. NaN when the informative block is entirely zero.
      try {
        row.angle = bayes_angle(rec.models[1], split.bayes);
      } catch (const InvalidInput&) {
        row.angle = std::nan("");
      }
      row.objective = rec.objective;
      row.iterations = static_cast<long long>(rec.iterations);
    }
  });

  Table rows{"rows",
             {"reg", "lambda", "seed", "kappa", "accuracy", "n_active_total", "n_active_informative",
              "bayes_angle_deg", "objective", "iterations"},
             {}};
  Table means{"reg_lambda_means",
              {"reg", "lambda", "seeds", "mean_kappa", "mean_accuracy", "mean_n_active_total",
               "mean_n_active_informative", "mean_bayes_angle_deg", "angle_seeds", "mean_objective",
               "mean_iterations"},
              {}};
  Table support{"true_support",
                {"reg", "seeds", "seeds_with_true_support", "mean_bayes_angle_deg", "mean_kappa"},
                {}};
  for (std::size_t r = 0; r < regs.size(); ++r) {
    const std::string name(reg_name(regs[r]));
    for (std::size_t l = 0; l < n_l; ++l) {
      std::vector<double> k, a, nt, ni, ang, obj, it;
      for (std::size_t s = 0; s < n_s; ++s) {
        const ToyRow& x = at(r, l, s);
        rows.rows.push_back({name, lambdas[l], static_cast<long long>(o.seed + s), x.kappa, x.accuracy,
                             x.n_total, x.n_informative, x.angle, x.objective, x.iterations});
        k.push_back(x.kappa);
        a.push_back(x.accuracy);
        nt.push_back(static_cast<double>(x.n_total));
        ni.push_back(static_cast<double>(x.n_informative));
        if (std::isfinite(x.angle)) ang.push_back(x.angle);
        obj.push_back(x.objective);
        it.push_back(static_cast<double>(x.iterations));
      }
      means.rows.push_back({name, lambdas[l], static_cast<long long>(n_s), mean_of(k), mean_of(a),
                            mean_of(nt), mean_of(ni), mean_of(ang), static_cast<long long>(ang.size()),
                            mean_of(obj), mean_of(it)});
    }
    // Smallest lambda at which exactly the two informative features survive.
    std::vector<double> ang, kap;
    for (std::size_t s = 0; s < n_s; ++s) {
      for (std::size_t l = 0; l < n_l; ++l) {
        const ToyRow& x = at(r, l, s);
        if (x.n_total == 2 && x.n_informative == 2) {
          ang.push_back(x.angle);
          kap.push_back(x.kappa);
          break;
        }
      }
    }
    support.rows.push_back({name, static_cast<long long>(n_s), static_cast<long long>(ang.size()),
                            mean_of(ang), mean_of(kap)});
  }
  emit(o.output, rows, {means, support}, out, err);
  return kOk;
}

// ---------------------------------------------------------------------------
// unmix-sim

struct UnmixOptions {
  std::vector<std::string> regs{"all"};
  bool baseline = true;
  GridOptions grid{1e-5, 1e3, 33};
  int trials = 50;
  std::uint64_t seed = 0;
  std::vector<int> n_acts{3};
  std::vector<double> sigmas{0.01, 0.05, 0.10};
  double theta = kDefaultTheta;
  bool synth = false;
  int q = 23;
  int bands = 200;
  std::string library;
  double prune_deg = kDefaultPruneDegrees;
  std::string init = "best";
  bool fig9 = false;
  int fig9_max_nact = 0;  // 0: library size
  double fig9_sigma = 0.05;
  int jobs = 1;
  OutputOptions output;
  SolverOptions solver;
};

int cmd_unmix_sim(const UnmixOptions& o, std::ostream& out, std::ostream& err) {
  UnmixExperimentConfig cfg;
  cfg.methods.clear();
  for (const RegKind k : parse_regs(o.regs)) cfg.methods.push_back(method_from_reg(k));
  if (o.baseline) cfg.methods.push_back(UnmixMethod::LsThreshold);
  cfg.lambdas = o.grid.grid();
  if (o.trials < 1) throw UsageError("--trials must be >= 1");
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.n_acts = o.n_acts;
  cfg.sigmas = o.sigmas;
  for (const double s : cfg.sigmas) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw UsageError("--sigma must be >= 0");
  }
  std::sort(cfg.n_acts.begin(), cfg.n_acts.end());
  cfg.n_acts.erase(std::unique(cfg.n_acts.begin(), cfg.n_acts.end()), cfg.n_acts.end());
  std::sort(cfg.sigmas.begin(), cfg.sigmas.end());
  cfg.sigmas.erase(std::unique(cfg.sigmas.begin(), cfg.sigmas.end()), cfg.sigmas.end());
  check_theta(o.theta);
  cfg.theta = o.theta;
  cfg.init = parse_path_init(o.init);
  cfg.solver = o.solver.apply(default_unmix_solver());
  cfg.jobs = resolve_jobs(o.jobs);
  { Sink probe(o.output.out, out); Sink probe2(o.output.summary_out, out); }

  SpectralLibrary lib;
  if (!o.library.empty()) {
    lib = load_library(o.library, o.prune_deg);
  } else if (o.synth) {
    lib = synth_library(o.q, o.bands, o.seed);
  } else {
    throw UsageError("no spectral library: pass --library <path> or --synth");
  }
  for (const int n : cfg.n_acts) {
    if (n < 1 || n > lib.size()) {
      throw UsageError("--nact " + std::to_string(n) + " outside [1, " + std::to_string(lib.size()) + "]");
    }
  }

  const UnmixExperiment exp = unmix_experiment(lib, cfg);

  Table rows{"rows", {"reg", "n_act", "sigma", "lambda", "trial", "model_error", "n_selected"}, {}};
  for (const auto& r : exp.rows) {
    rows.rows.push_back({std::string(method_name(r.method)), static_cast<long long>(r.n_act), r.sigma,
                         r.lambda, static_cast<long long>(r.trial), r.model_error,
                         static_cast<long long>(r.n_selected)});
  }
  Table by_lambda{"error_by_lambda",
                  {"reg", "n_act", "sigma", "lambda", "mean_model_error", "mean_n_selected"}, {}};
  for (const auto& m : mean_error_by_lambda(exp)) {
    by_lambda.rows.push_back({std::string(method_name(m.method)), static_cast<long long>(m.n_act), m.sigma,
                              m.lambda, m.mean_error, m.mean_selected});
  }
  Table by_count{"error_by_n_selected",
                 {"reg", "n_act", "sigma", "n_selected", "mean_model_error", "records"}, {}};
  for (const auto& m : mean_error_by_count(exp)) {
    by_count.rows.push_back({std::string(method_name(m.method)), static_cast<long long>(m.n_act), m.sigma,
                             static_cast<long long>(m.n_selected), m.mean_error,
                             static_cast<long long>(m.records)});
  }
  const auto selection_table = [](const std::string& name, const UnmixExperiment& e) {
    Table t{name,
            {"reg", "n_act", "sigma", "mean_error_matched", "matched_trials", "mean_min_error",
             "mean_n_selected_at_min"},
            {}};
    for (const auto& m : selection_means(e)) {
      t.rows.push_back({std::string(method_name(m.method)), static_cast<long long>(m.n_act), m.sigma,
                        m.mean_matched_error, static_cast<long long>(m.matched_trials), m.mean_min_error,
                        m.mean_selected_at_min});
    }
    return t;
  };
  std::vector<Table> summaries{by_lambda, by_count, selection_table("selection", exp)};

  if (o.fig9) {
    UnmixExperimentConfig sweep = cfg;
    const int top = o.fig9_max_nact > 0 ? o.fig9_max_nact : static_cast<int>(lib.size());
    if (top > lib.size()) throw UsageError("--fig9-max-nact exceeds the library size");
    if (!(o.fig9_sigma >= 0.0)) throw UsageError("--fig9-sigma must be >= 0");
    sweep.n_acts.clear();
    for (int n = 1; n <= top; ++n) sweep.n_acts.push_back(n);
    sweep.sigmas = {o.fig9_sigma};
    summaries.push_back(selection_table("sparsity_sweep", unmix_experiment(lib, sweep)));
  }
  emit(o.output, rows, summaries, out, err);
  return kOk;
}

// ---------------------------------------------------------------------------
// verification commands

struct ProxCheckOptions {
  int samples = 200;
  double tolerance = 1e-6;
  std::uint64_t seed = 0;
  long grid = 100000;
  bool inject_fault = false;
  OutputOptions output;
};

int cmd_prox_check(const ProxCheckOptions& o, std::ostream& out, std::ostream& err) {
  if (o.samples < 1) throw UsageError("--samples must be >= 1");
  if (!(o.tolerance >= 0.0)) throw UsageError("--tolerance must be >= 0");
  if (o.grid < 1000) throw UsageError("--grid must be >= 1000");
  const ProxCheckResult res = prox_check(o.samples, o.tolerance, o.seed, o.grid,
                                         o.inject_fault ? perturbed_lasso_prox() : ProxFn(prox_scalar));
  Table t{"prox_check", {"reg", "nonneg", "samples", "worst_gap", "tolerance", "status"}, {}};
  for (const auto& l : res.lines) {
    t.rows.push_back({std::string(reg_name(l.kind)), static_cast<long long>(l.nonneg),
                      static_cast<long long>(o.samples), l.worst_gap, o.tolerance,
                      std::string(l.pass ? "pass" : "FAIL")});
  }
  emit(o.output, t, {}, out, err);
  return res.pass ? kOk : kVerifyFailed;
}

struct GradCheckOptions {
  int points = 20;
  double tolerance = 1e-5;
  std::uint64_t seed = 0;
  bool inject_fault = false;
  OutputOptions output;
};

int cmd_grad_check(const GradCheckOptions& o, std::ostream& out, std::ostream& err) {
  if (o.points < 1) throw UsageError("--points must be >= 1");
  if (!(o.tolerance > 0.0)) throw UsageError("--tolerance must be positive");
  const GradCheckResult res = grad_check(o.points, o.tolerance, o.seed, o.inject_fault ? 1.01 : 1.0);
  Table t{"grad_check", {"loss", "points", "max_rel_error", "tolerance", "status"}, {}};
  for (const auto& l : res.lines) {
    t.rows.push_back({std::string(loss_name(l.kind)), static_cast<long long>(o.points), l.max_rel_error,
                      o.tolerance, std::string(l.pass ? "pass" : "FAIL")});
  }
  emit(o.output, t, {}, out, err);
  return res.pass ? kOk : kVerifyFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse linear models with nonconvex regularizers"};
  app.name(args.empty() ? "gistsparse" : args.front());
  app.set_config("--config", "", "TOML or INI file; command-line flags override its values");
  app.require_subcommand(1);

  const std::vector<std::string> reg_names{"l2", "l1", "lsp", "lhalf", "all"};

  ToyOptions toy;
  auto* toy_cmd = app.add_subcommand("toy-classify", "Two-class Gaussian toy study over a lambda grid");
  toy_cmd->add_option("--reg", toy.regs, "Regularizers (repeatable)")
      ->check(CLI::IsMember(reg_names))
      ->capture_default_str();
  add_grid(toy_cmd, toy.grid);
  toy_cmd->add_option("--seeds", toy.seeds, "Number of train/test draws")->capture_default_str();
  toy_cmd->add_option("--seed", toy.seed, "First seed; draws use seed, seed+1, ...")->capture_default_str();
  toy_cmd->add_option("--n-per-class", toy.n_per_class, "Training samples per class")->capture_default_str();
  toy_cmd->add_option("--d-noise", toy.d_noise, "Number of noise dimensions")->capture_default_str();
  toy_cmd->add_option("--test-factor", toy.test_factor, "Test set size relative to training")
      ->capture_default_str();
  toy_cmd->add_option("--theta", toy.theta, "Log sum penalty parameter")->capture_default_str();
  toy_cmd->add_option("--jobs", toy.jobs, "Worker threads (0: all cores)")->capture_default_str();
  add_output(toy_cmd, toy.output, true);
  add_solver(toy_cmd, toy.solver);

  UnmixOptions um;
  auto* um_cmd = app.add_subcommand("unmix-sim", "Simulated sparse unmixing over a lambda grid");
  um_cmd->add_option("--reg", um.regs, "Regularizers (repeatable)")
      ->check(CLI::IsMember(reg_names))
      ->capture_default_str();
  um_cmd->add_flag("--baseline,!--no-baseline", um.baseline, "Include the thresholded NNLS baseline")
      ->capture_default_str();
  add_grid(um_cmd, um.grid);
  um_cmd->add_option("--trials", um.trials, "Mixtures per (n_act, sigma)")->capture_default_str();
  um_cmd->add_option("--seed", um.seed, "Seed for the mixtures and the synthetic library")
      ->capture_default_str();
  um_cmd->add_option("--nact", um.n_acts, "Active endmembers (repeatable)")->capture_default_str();
  um_cmd->add_option("--sigma", um.sigmas, "Noise level (repeatable)")->capture_default_str();
  um_cmd->add_option("--theta", um.theta, "Log sum penalty parameter")->capture_default_str();
  um_cmd->add_flag("--synth", um.synth, "Use a synthetic library instead of --library");
  um_cmd->add_option("--q", um.q, "Synthetic library size")->capture_default_str();
  um_cmd->add_option("--bands", um.bands, "Synthetic library band count")->capture_default_str();
  um_cmd->add_option("--library", um.library, "Spectral library CSV");
  um_cmd->add_option("--prune-deg", um.prune_deg, "Minimum angle between kept library spectra")
      ->capture_default_str();
  um_cmd->add_option("--init", um.init, "Path initialization")
      ->check(CLI::IsMember({"zero", "warm", "best"}))
      ->capture_default_str();
  um_cmd->add_flag("--fig9", um.fig9, "Add the n_act sweep block (n_act = 1..max at one sigma)");
  um_cmd->add_option("--fig9-max-nact", um.fig9_max_nact, "Sweep upper end (0: library size)")
      ->capture_default_str();
  um_cmd->add_option("--fig9-sigma", um.fig9_sigma, "Sweep noise level")->capture_default_str();
  um_cmd->add_option("--jobs", um.jobs, "Worker threads (0: all cores)")->capture_default_str();
  add_output(um_cmd, um.output, true);
  add_solver(um_cmd, um.solver);

  ProxCheckOptions pc;
  auto* pc_cmd = app.add_subcommand("prox-check", "Compare closed-form proxes with a numerical oracle");
  pc_cmd->add_option("--samples", pc.samples, "Random (v, tau, theta) per line")->capture_default_str();
  pc_cmd->add_option("--tolerance", pc.tolerance, "Allowed objective gap")->capture_default_str();
  pc_cmd->add_option("--seed", pc.seed, "Sampling seed")->capture_default_str();
  pc_cmd->add_option("--grid", pc.grid, "Oracle grid size")->capture_default_str();
  pc_cmd->add_flag("--inject-fault", pc.inject_fault)->group("");
  add_output(pc_cmd, pc.output, false);

  GradCheckOptions gc;
  auto* gc_cmd = app.add_subcommand("grad-check", "Compare loss gradients with central differences");
  gc_cmd->add_option("--points", gc.points, "Random models per loss")->capture_default_str();
  gc_cmd->add_option("--tolerance", gc.tolerance, "Allowed relative error")->capture_default_str();
  gc_cmd->add_option("--seed", gc.seed, "Sampling seed")->capture_default_str();
  gc_cmd->add_flag("--inject-fault", gc.inject_fault)->group("");
  add_output(gc_cmd, gc.output, false);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*toy_cmd) return cmd_toy_classify(toy, out, err);
    if (*um_cmd) return cmd_unmix_sim(um, out, err);
    if (*pc_cmd) return cmd_prox_check(pc, out, err);
    if (*gc_cmd) return cmd_grad_check(gc, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Diverged& e) {
    err << "error: diverged: " << e.what() << '\n';
    return kDiverged;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: library " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kVerifyFailed;
  }
  return kUsage;
}

}  // namespace gistsparse::cli
