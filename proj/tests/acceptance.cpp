// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "gistsparse/classify.hpp"
#include "gistsparse/solver.hpp"
#include "gistsparse/unmix.hpp"
#include "gistsparse/verify.hpp"

using namespace gistsparse;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = limit_s <= 0.0 || secs < limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("criterion %d: %s  %s  [%.1fs%s]\n", id, pass ? "PASS" : "FAIL", o.detail.c_str(), secs,
              in_time ? "" : " over time limit");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Eigen::MatrixXd gaussian(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

LabeledDataset random_labeled(int n, int d, std::mt19937_64& rng) {
  LabeledDataset out;
  out.features = gaussian(n, d, rng);
  out.labels.resize(n);
  std::normal_distribution<double> g;
  for (int i = 0; i < n; ++i) out.labels[i] = out.features(i, 0) + 0.5 * g(rng) > 0 ? 1.0 : -1.0;
  return out;
}

Outcome criterion1() {
  const ProxCheckResult r = prox_check(200, 1e-6, 0, 100000);
  double worst = -INFINITY;
  for (const auto& l : r.lines) worst = std::max(worst, l.worst_gap);
  return {r.pass && r.lines.size() == 8, "8 lines, worst objective gap " + fmt("%.3g", worst) + " (limit 1e-6)"};
}

Outcome criterion2() {
  const GradCheckResult r = grad_check(20, 1e-5, 0);
  double worst = 0.0;
  for (const auto& l : r.lines) worst = std::max(worst, l.max_rel_error);
  return {r.pass && r.lines.size() == 4, "4 losses, worst relative error " + fmt("%.3g", worst) + " (limit 1e-5)"};
}

Outcome criterion3() {
  std::mt19937_64 rng(2024);
  const RegKind kinds[] = {RegKind::Ridge, RegKind::Lasso, RegKind::LogSumPenalty, RegKind::HalfNorm};

  // (a) monotone traces
  int traces = 0, monotone = 0;
  {
    const ClassificationProblem hinge({LossKind::SquaredHinge, 1.0}, random_labeled(60, 8, rng));
    const ClassificationProblem logit({LossKind::Logistic, 1.0}, random_labeled(60, 8, rng));
    const Eigen::MatrixXd d = gaussian(30, 12, rng);
    const Eigen::VectorXd y = gaussian(30, 1, rng);
    const RegressionProblem ls({LossKind::LeastSquares, 1.0}, UnmixObservation{d, y});
    const RegressionProblem hub({LossKind::Huber, 0.5}, UnmixObservation{d, y});
    const SpectralLibrary lib = synth_library(23, 200, 0);
    const Unmixer um(lib);
    const RegressionProblem mix = um.problem(simulate_mixture(lib, 3, 0.05, 0).observed);
    const Problem* problems[] = {&hinge, &logit, &ls, &hub, &mix};
    for (const Problem* p : problems) {
      for (RegKind k : kinds) {
        for (bool nonneg : {false, true}) {
          if (nonneg && p->has_bias()) continue;
          for (double lam : {1e-4, 1e-2, 1e-1, 1.0}) {
            const SolverReport r = gist_solve(*p, {k, kDefaultTheta, nonneg}, lam, p->zero_model());
            ++traces;
            bool ok = true;
            for (std::size_t i = 1; i < r.objective_trace.size(); ++i) ok = ok && r.objective_trace[i] <= r.objective_trace[i - 1];
            monotone += ok;
          }
        }
      }
    }
  }

  // (b) lambda = 0 least squares against a dense solve
  double worst_b = 0.0;
  {
    SolverConfig cfg;
    cfg.tol = 1e-12;
    cfg.max_iter = 50000;
    for (int t = 0; t < 10; ++t) {
      const Eigen::MatrixXd d = gaussian(40, 8, rng);
      const Eigen::VectorXd y = gaussian(40, 1, rng);
      const RegressionProblem p({LossKind::LeastSquares, 1.0}, UnmixObservation{d, y});
      Model opt = p.zero_model();
      opt.coef = d.colPivHouseholderQr().solve(y);
      const double f_opt = p.value(opt);
      const double f = gist_solve(p, {RegKind::Lasso}, 0.0, p.zero_model(), cfg).objective();
      worst_b = std::max(worst_b, std::abs(f - f_opt) / std::max(1.0, std::abs(f_opt)));
    }
  }

  // (c) all-zero lasso solution at lambda >= ||grad L(0)||_inf
  int zero_ok = 0;
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd d = gaussian(25, 10, rng);
    const RegressionProblem p({LossKind::LeastSquares, 1.0}, UnmixObservation{d, gaussian(25, 1, rng)});
    Model g;
    p.value_grad(p.zero_model(), &g);
    const double bound = g.coef.cwiseAbs().maxCoeff();
    zero_ok += gist_solve(p, {RegKind::Lasso}, bound, p.zero_model()).model.nonzero_count() == 0;
  }

  // (d) KKT residual, scaled by max(1, ||grad L(0)||_inf)
  double worst_d = 0.0;
  {
    SolverConfig cfg;
    cfg.tol = 1e-12;
    cfg.max_iter = 50000;
    for (int t = 0; t < 5; ++t) {
      const ClassificationProblem c({LossKind::SquaredHinge, 1.0}, random_labeled(80, 10, rng));
      const RegressionProblem r({LossKind::LeastSquares, 1.0}, UnmixObservation{gaussian(40, 15, rng), gaussian(40, 1, rng)});
      const Problem* problems[] = {&c, &r};
      for (const Problem* p : problems) {
        Model g;
        p->value_grad(p->zero_model(), &g);
        const double scale = std::max(1.0, g.coef.cwiseAbs().maxCoeff());
        for (RegKind k : {RegKind::Lasso, RegKind::Ridge}) {
          for (double frac : {0.01, 0.1, 0.5}) {
            const SolverReport rep = gist_solve(*p, {k}, frac * scale, p->zero_model(), cfg);
            worst_d = std::max(worst_d, rep.kkt_max_residual / scale);
          }
        }
      }
    }
  }

  const bool pass = monotone == traces && worst_b < 1e-5 && zero_ok == 20 && worst_d < 1e-3;
  std::ostringstream os;
  os << "(a) " << monotone << "/" << traces << " monotone; (b) rel gap " << fmt("%.2g", worst_b)
     << " < 1e-5; (c) " << zero_ok << "/20 zero; (d) scaled KKT " << fmt("%.2g", worst_d) << " < 1e-3";
  return {pass, os.str()};
}

Outcome criterion4() {
  // The command-line default grid for toy-classify.
  const auto grid = log_grid(1e-3, 1e1, 18);
  std::ostringstream os;
  bool pass = true;
  double angle[3] = {0, 0, 0};
  const RegKind sparse[] = {RegKind::Lasso, RegKind::LogSumPenalty, RegKind::HalfNorm};
  for (int k = 0; k < 3; ++k) {
    int hits = 0;
    double sum = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      ToySpec spec;
      spec.seed = seed;
      const ToySplit split = make_toy_split(spec);
      const PathResult path = ova_path(split.train, {sparse[k]}, grid);
      for (const auto& r : path.records) {
        const MulticlassModel mm{r.models};
        if (mm.active_features() != 2) continue;
        if (r.models[1].coef[0] != 0.0 && r.models[1].coef[1] != 0.0) {
          ++hits;
          sum += bayes_angle(r.models[1], split.bayes);
        }
        break;
      }
    }
    angle[k] = hits ? sum / hits : NAN;
    pass = pass && hits >= 9;
    os << reg_name(sparse[k]) << " " << hits << "/10 angle " << fmt("%.3f", angle[k]) << "; ";
  }
  pass = pass && angle[1] <= angle[0] && angle[2] <= angle[0];
  os << "need >=9/10 and lsp, lhalf angle <= l1";
  return {pass, os.str()};
}

UnmixExperiment& main_study() {
  static UnmixExperiment exp = [] {
    UnmixExperimentConfig cfg;  // n_act 3, 50 trials, 33 lambdas, 5 methods
    cfg.sigmas = {0.01, 0.05};
    return unmix_experiment(synth_library(23, 200, 0), cfg);
  }();
  return exp;
}

Outcome criterion5() {
  const UnmixExperiment& e = main_study();
  bool pass = true;
  std::ostringstream os;
  for (double s : {0.01, 0.05}) {
    const double l1 = min_mean_error(e, UnmixMethod::Lasso, 3, s);
    const double lsp = min_mean_error(e, UnmixMethod::LogSumPenalty, 3, s);
    const double lh = min_mean_error(e, UnmixMethod::HalfNorm, 3, s);
    const double c1 = mean_error_at_count(e, UnmixMethod::Lasso, 3, s, 3);
    const double c2 = mean_error_at_count(e, UnmixMethod::LogSumPenalty, 3, s, 3);
    const double c3 = mean_error_at_count(e, UnmixMethod::HalfNorm, 3, s, 3);
    pass = pass && lsp < l1 && lh < l1 && c2 < c1 && c3 < c1;
    os << "sigma " << s << ": min l1/lsp/lhalf " << fmt("%.2e", l1) << "/" << fmt("%.2e", lsp) << "/"
       << fmt("%.2e", lh) << ", at 3 selected " << fmt("%.2e", c1) << "/" << fmt("%.2e", c2) << "/"
       << fmt("%.2e", c3) << "; ";
  }
  return {pass, os.str()};
}

Outcome criterion6() {
  UnmixExperimentConfig cfg;
  cfg.sigmas = {0.05};
  cfg.n_acts = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  cfg.methods = {UnmixMethod::Lasso, UnmixMethod::LogSumPenalty, UnmixMethod::HalfNorm, UnmixMethod::LsThreshold};
  const UnmixExperiment e = unmix_experiment(synth_library(23, 200, 0), cfg);

  // Matched error per (method, n_act, trial); NaN when the path never selects n_act.
  const auto matched = [&](UnmixMethod m, int n) {
    std::vector<double> v(static_cast<std::size_t>(cfg.trials), NAN);
    for (const auto& s : e.summaries) {
      if (s.method == m && s.n_act == n) v[static_cast<std::size_t>(s.trial)] = s.matched_error;
    }
    return v;
  };
  // Paired comparison over trials where both paths reach n_act.
  const auto no_worse = [&](UnmixMethod a, UnmixMethod b, int n) {
    const auto va = matched(a, n), vb = matched(b, n);
    double sa = 0.0, sb = 0.0;
    int k = 0;
    for (std::size_t t = 0; t < va.size(); ++t) {
      if (std::isnan(va[t]) || std::isnan(vb[t])) continue;
      sa += va[t];
      sb += vb[t];
      ++k;
    }
    return k > 0 && sa <= sb;
  };
  bool pass = true;
  std::ostringstream os;
  for (UnmixMethod m : {UnmixMethod::LogSumPenalty, UnmixMethod::HalfNorm}) {
    int wins = 0;
    for (int n = 1; n <= 10; ++n) {
      wins += no_worse(m, UnmixMethod::Lasso, n) && no_worse(m, UnmixMethod::LsThreshold, n);
    }
    pass = pass && wins >= 8;
    os << method_name(m) << " " << wins << "/10; ";
  }
  os << "need >= 8/10 against both l1 and ls_threshold";
  return {pass, os.str()};
}

Outcome criterion7() {
  const UnmixExperiment& e = main_study();
  bool pass = true;
  std::ostringstream os;
  for (const auto& s : selection_means(e)) {
    if (s.method == UnmixMethod::Lasso) {
      pass = pass && s.mean_selected_at_min >= 3 + 2;
    } else if (s.method == UnmixMethod::LogSumPenalty || s.method == UnmixMethod::HalfNorm) {
      pass = pass && std::abs(s.mean_selected_at_min - 3) <= 1;
    } else {
      continue;
    }
    os << method_name(s.method) << "@" << s.sigma << " " << fmt("%.2f", s.mean_selected_at_min) << "; ";
  }
  os << "need l1 >= 5, lsp/lhalf within 1 of 3";
  return {pass, os.str()};
}

Outcome criterion8() {
  const fs::path dir = fs::temp_directory_path() / "gistsparse_acceptance";
  fs::create_directories(dir);
  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const auto run_to = [&](std::vector<std::string> args, const fs::path& out) {
    args.insert(args.begin(), "gistsparse");
    args.push_back("--out");
    args.push_back(out.string());
    std::ostringstream o, err;
    return cli::run(args, o, err) == 0 ? slurp(out) : std::string();
  };
  bool pass = true;
  std::ostringstream os;
  const std::vector<std::vector<std::string>> commands{{"toy-classify"}, {"unmix-sim", "--synth"}};
  for (const auto& cmd : commands) {
    const std::string a = run_to(cmd, dir / "a.csv");
    const std::string b = run_to(cmd, dir / "b.csv");
    auto par = cmd;
    par.insert(par.end(), {"--jobs", "4"});
    const std::string c = run_to(par, dir / "c.csv");
    const bool same = !a.empty() && a == b && a == c;
    pass = pass && same;
    os << cmd.front() << " " << (same ? "identical" : "DIFFERENT") << " (" << a.size() << " bytes, jobs 1/1/4); ";
  }
  return {pass, os.str()};
}

Outcome criterion9() {
  const auto code = [](std::vector<std::string> args) {
    args.insert(args.begin(), "gistsparse");
    std::ostringstream o, e;
    return cli::run(args, o, e);
  };
  const int p_ok = code({"prox-check"}), p_bad = code({"prox-check", "--inject-fault"});
  const int g_ok = code({"grad-check"}), g_bad = code({"grad-check", "--inject-fault"});
  std::ostringstream os;
  os << "prox-check " << p_ok << "/" << p_bad << ", grad-check " << g_ok << "/" << g_bad
     << " (clean/faulted exit codes)";
  return {p_ok == 0 && p_bad != 0 && g_ok == 0 && g_bad != 0, os.str()};
}

}  // namespace

int main() {
  report(1, 10.0, criterion1);
  report(2, 5.0, criterion2);
  report(3, 30.0, criterion3);
  report(4, 120.0, criterion4);
  report(5, 600.0, criterion5);
  report(6, 900.0, criterion6);
  report(7, 0.0, criterion7);
  report(8, 0.0, criterion8);
  report(9, 0.0, criterion9);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
