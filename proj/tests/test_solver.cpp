#include <doctest.h>

#include <atomic>
#include <cmath>
#include <memory>
#include <random>

#include "gistsparse/classify.hpp"
#include "gistsparse/errors.hpp"
#include "gistsparse/solver.hpp"

using namespace gistsparse;

namespace {

RegressionProblem regression(const Eigen::MatrixXd& d, const Eigen::VectorXd& y,
                             LossKind kind = LossKind::LeastSquares) {
  return RegressionProblem({kind, 1.0}, UnmixObservation{d, y});
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

/// Quadratic whose value turns NaN once the first coefficient exceeds 0.5.
class PoisonedProblem final : public Problem {
 public:
  Eigen::Index dim() const override { return 1; }
  bool has_bias() const override { return false; }
  double value_grad(const Model& m, Model* g) const override {
    if (g) {
      *g = Model::zeros(1, false);
      g->coef[0] = m.coef[0] - 1.0;
    }
    return m.coef[0] > 0.5 ? NAN : 0.5 * std::pow(m.coef[0] - 1.0, 2);
  }
  double lipschitz() const override { return 1.0; }
};

bool nonincreasing(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i] > trace[i - 1]) return false;
  }
  return true;
}

const RegKind kAllKinds[] = {RegKind::Ridge, RegKind::Lasso, RegKind::LogSumPenalty, RegKind::HalfNorm};

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("one-dimensional lasso reaches the soft-threshold point") {
  const auto p = regression(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Ones(1));
  const SolverReport r = gist_solve(p, {RegKind::Lasso}, 0.3, p.zero_model());
  CHECK(r.model.coef[0] == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(r.termination == Termination::Tol);
  // Exhaustive scan of the 1D objective as an independent check.
  double best = 0.0, best_f = INFINITY;
  for (int i = -20000; i <= 20000; ++i) {
    const double w = i * 1e-4;
    const double f = 0.5 * (w - 1) * (w - 1) + 0.3 * std::abs(w);
    if (f < best_f) best_f = f, best = w;
  }
  CHECK(r.model.coef[0] == doctest::Approx(best).epsilon(1e-4));
}

TEST_CASE("lambda = 0 least squares matches the dense solve") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 5; ++t) {
    const Eigen::MatrixXd d = gaussian(30, 6, rng);
    const Eigen::VectorXd y = gaussian(30, 1, rng);
    const auto p = regression(d, y);
    SolverConfig cfg;
    cfg.tol = 1e-12;
    cfg.max_iter = 20000;
    const SolverReport r = gist_solve(p, {RegKind::Lasso}, 0.0, p.zero_model(), cfg);
    const Eigen::VectorXd x = d.colPivHouseholderQr().solve(y);
    Model opt = p.zero_model();
    opt.coef = x;
    const double f_opt = p.value(opt);
    CHECK(std::abs(r.objective() - f_opt) / std::max(1.0, std::abs(f_opt)) < 1e-5);
  }
}

TEST_CASE("lasso above the zero threshold returns the zero model") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd d = gaussian(20, 8, rng);
    const auto p = regression(d, gaussian(20, 1, rng));
    const double lmax = (d.transpose() * p.observed()).cwiseAbs().maxCoeff();
    CHECK(lasso_lambda_max(p) == doctest::Approx(lmax));
    CHECK(gist_solve(p, {RegKind::Lasso}, lmax, p.zero_model()).model.nonzero_count() == 0);
    CHECK(gist_solve(p, {RegKind::Lasso}, 0.9 * lmax, p.zero_model()).model.nonzero_count() > 0);

    // With a bias the bound holds at the optimal bias. An objective-based stop
    // settles the bias only to about 1e-7, hence the small margin.
    const ClassificationProblem c({LossKind::SquaredHinge, 1.0}, random_labeled(40, 5, rng));
    const double cmax = lasso_lambda_max(c);
    SolverConfig tight;
    tight.tol = 1e-12;
    tight.max_iter = 20000;
    CHECK(gist_solve(c, {RegKind::Lasso}, cmax * (1 + 1e-6), c.zero_model(), tight).model.nonzero_count() == 0);
    CHECK(gist_solve(c, {RegKind::Lasso}, cmax * 0.9, c.zero_model(), tight).model.nonzero_count() > 0);
  }
}

TEST_CASE("property: objective traces are monotone in monotone mode") {
  std::mt19937_64 rng(3);
  const ClassificationProblem hinge({LossKind::SquaredHinge, 1.0}, random_labeled(50, 6, rng));
  const ClassificationProblem logit({LossKind::Logistic, 1.0}, random_labeled(50, 6, rng));
  const Eigen::MatrixXd d = gaussian(25, 10, rng).cwiseAbs();
  const Eigen::VectorXd y = gaussian(25, 1, rng).cwiseAbs();
  const auto ls = regression(d, y);
  const auto hub = regression(d, y, LossKind::Huber);
  const Problem* problems[] = {&hinge, &logit, &ls, &hub};
  for (const Problem* p : problems) {
    for (RegKind k : kAllKinds) {
      for (bool nonneg : {false, true}) {
        if (nonneg && p->has_bias()) continue;
        for (double lam : {1e-3, 1e-2, 1e-1}) {
          const SolverReport r = gist_solve(*p, {k, kDefaultTheta, nonneg}, lam, p->zero_model());
          CHECK(nonincreasing(r.objective_trace));
          CHECK(r.model.all_finite());
          const SolverReport rr = gist_solve(*p, {k, kDefaultTheta, nonneg}, lam,
                                             nonneg ? p->zero_model() : random_model(*p, 4));
          CHECK(nonincreasing(rr.objective_trace));
        }
      }
    }
  }
}

TEST_CASE("KKT residual at convergence for the convex penalties") {
  std::mt19937_64 rng(4);
  SolverConfig cfg;
  cfg.tol = 1e-12;
  cfg.max_iter = 50000;
  for (int t = 0; t < 5; ++t) {
    const ClassificationProblem c({LossKind::SquaredHinge, 1.0}, random_labeled(60, 8, rng));
    const auto r = regression(gaussian(30, 10, rng), gaussian(30, 1, rng));
    const Problem* problems[] = {&c, &r};
    for (const Problem* p : problems) {
      Model g;
      p->value_grad(p->zero_model(), &g);
      const double scale = std::max(1.0, g.coef.cwiseAbs().maxCoeff());
      for (RegKind k : {RegKind::Lasso, RegKind::Ridge}) {
        const SolverReport rep = gist_solve(*p, {k}, 0.05 * scale, p->zero_model(), cfg);
        CHECK(rep.kkt_max_residual / scale < 1e-3);
      }
    }
  }
}

TEST_CASE("nonmonotone mode converges to the same convex optimum") {
  std::mt19937_64 rng(5);
  const auto p = regression(gaussian(30, 8, rng), gaussian(30, 1, rng));
  SolverConfig mono, nonmono;
  mono.tol = nonmono.tol = 1e-12;
  mono.max_iter = nonmono.max_iter = 20000;
  nonmono.monotone = false;
  const auto a = gist_solve(p, {RegKind::Lasso}, 0.5, p.zero_model(), mono);
  const auto b = gist_solve(p, {RegKind::Lasso}, 0.5, p.zero_model(), nonmono);
  CHECK(a.objective() == doctest::Approx(b.objective()).epsilon(1e-8));
}

TEST_CASE("solver input validation") {
  const auto p = regression(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Ones(1));
  CHECK_THROWS_AS(gist_solve(p, {RegKind::Lasso}, -1.0, p.zero_model()), InvalidInput);
  CHECK_THROWS_AS(gist_solve(p, {RegKind::Lasso}, 1.0, Model::zeros(2, false)), DimensionMismatch);
  SolverConfig bad;
  bad.mu_min = 10.0;
  bad.mu_max = 1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = {};
  bad.sigma = 1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  Model neg = p.zero_model();
  neg.coef[0] = -1.0;
  CHECK_THROWS_AS(gist_solve(p, {RegKind::Lasso, kDefaultTheta, true}, 1.0, neg), Infeasible);
}

TEST_CASE("divergence is reported") {
  const PoisonedProblem p;
  CHECK_THROWS_AS(gist_solve(p, {RegKind::Ridge}, 1e-3, p.zero_model()), Diverged);
  try {
    run_path({1e-3}, [&](double lam, const PathRecord*) {
      gist_solve(p, {RegKind::Ridge}, lam, p.zero_model());
      return PathRecord{};
    });
    FAIL("expected Diverged");
  } catch (const Diverged& e) {
    CHECK(std::string(e.what()).find("lambda=") != std::string::npos);
  }
}

TEST_CASE("max_iter termination") {
  std::mt19937_64 rng(6);
  const auto p = regression(gaussian(30, 8, rng), gaussian(30, 1, rng));
  SolverConfig cfg;
  cfg.max_iter = 2;
  const auto r = gist_solve(p, {RegKind::Lasso}, 0.1, p.zero_model(), cfg);
  CHECK(r.termination == Termination::MaxIter);
  CHECK(r.iterations == 2);
  CHECK(r.objective_trace.size() == 3);
}

TEST_CASE("paths") {
  ToySpec spec;
  const auto toy = make_toy(spec).data;
  const auto grid = log_grid(1e-3, 1e1, 6);

  SUBCASE("ridge is dense everywhere") {
    const auto path = ova_path(toy, {RegKind::Ridge}, grid);
    for (const auto& r : path.records) CHECK(r.active_count == static_cast<std::size_t>(toy.dim() * 2 + 2));
  }
  SUBCASE("lasso ends at the zero model above the bound") {
    const auto bin = one_vs_rest(toy, 1);
    const ClassificationProblem p({LossKind::SquaredHinge, 1.0}, bin);
    const double top = lasso_lambda_max(p) * 1.01;
    const auto path = reg_path(p, {RegKind::Lasso}, {1e-3, 1e-2, top});
    CHECK(path.records.back().models[0].nonzero_count() == 0);
    CHECK(path.records.back().active_count == 1);
  }
  SUBCASE("single lambda equals gist_solve") {
    const ClassificationProblem p({LossKind::SquaredHinge, 1.0}, one_vs_rest(toy, 1));
    const auto path = reg_path(p, {RegKind::HalfNorm}, {0.05});
    REQUIRE(path.records.size() == 1);
    const auto direct = gist_solve(p, {RegKind::HalfNorm}, 0.05, p.zero_model());
    CHECK(path.records[0].models[0] == direct.model);
    CHECK(path.records[0].objective == direct.objective());
    CHECK(path.records[0].iterations == direct.iterations);
  }
  SUBCASE("jobs do not change the result") {
    PathOptions one, four;
    four.jobs = 4;
    const auto a = ova_path(toy, {RegKind::LogSumPenalty}, grid, {}, one);
    const auto b = ova_path(toy, {RegKind::LogSumPenalty}, grid, {}, four);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(a.records[i].models == b.records[i].models);
      CHECK(a.records[i].objective == b.records[i].objective);
    }
  }
  SUBCASE("warm starts reach the same convex solutions") {
    const ClassificationProblem p({LossKind::SquaredHinge, 1.0}, one_vs_rest(toy, 1));
    SolverConfig cfg;
    cfg.tol = 1e-12;
    cfg.max_iter = 20000;
    PathOptions warm;
    warm.warm_start = true;
    const auto a = reg_path(p, {RegKind::Lasso}, grid, cfg);
    const auto b = reg_path(p, {RegKind::Lasso}, grid, cfg, warm);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(a.records[i].objective == doctest::Approx(b.records[i].objective).epsilon(1e-7));
    }
  }
  SUBCASE("evaluator metrics are attached") {
    PathOptions opts;
    opts.evaluator = [](const PathRecord& r) { return Metrics{{"nnz", static_cast<double>(r.active_count)}}; };
    const auto path = ova_path(toy, {RegKind::Lasso}, grid, {}, opts);
    for (const auto& r : path.records) CHECK(r.metrics.at("nnz") == static_cast<double>(r.active_count));
  }
  SUBCASE("grid validation") {
    const ClassificationProblem p({LossKind::SquaredHinge, 1.0}, one_vs_rest(toy, 1));
    CHECK_THROWS_AS(reg_path(p, {RegKind::Lasso}, {}), InvalidInput);
    CHECK_THROWS_AS(reg_path(p, {RegKind::Lasso}, {0.1, 0.1}), InvalidInput);
    CHECK_THROWS_AS(reg_path(p, {RegKind::Lasso}, {0.0, 0.1}), InvalidInput);
    CHECK_THROWS_AS(reg_path(p, {RegKind::Lasso}, {0.2, 0.1}), InvalidInput);
  }
}

TEST_CASE("path selection") {
  const auto make = [](std::vector<std::size_t> counts, std::vector<double> errors) {
    PathResult p;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      PathRecord r;
      r.lambda = 0.1 * static_cast<double>(i + 1);
      r.active_count = counts[i];
      if (!errors.empty()) r.metrics["model_error"] = errors[i];
      p.lambdas.push_back(r.lambda);
      p.records.push_back(r);
    }
    return p;
  };
  const auto p = make({5, 3, 3, 1}, {});
  CHECK(&path_select_by_sparsity(p, 3) == &p.records[1]);
  CHECK_THROWS_AS(path_select_by_sparsity(p, 4), NoMatch);
  const auto z = make({2, 0, 0}, {});
  CHECK(&path_select_by_sparsity(z, 0) == &z.records[1]);

  const auto e = make({3, 2, 1}, {0.5, 0.2, 0.9});
  CHECK(&path_select_by_error(e) == &e.records[1]);
  const auto tie = make({2, 1}, {0.2, 0.2});
  CHECK(&path_select_by_error(tie) == &tie.records[0]);
  const auto one = make({1}, {0.7});
  CHECK(&path_select_by_error(one) == &one.records[0]);
  CHECK_THROWS_AS(path_select_by_error(one, "missing"), InvalidInput);
}

TEST_CASE("log_grid") {
  const auto g = log_grid(1e-5, 1e3, 33);
  REQUIRE(g.size() == 33);
  CHECK(g.front() == doctest::Approx(1e-5));
  CHECK(g.back() == doctest::Approx(1e3));
  CHECK(g[4] == doctest::Approx(1e-4));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  CHECK(log_grid(2.0, 2.0, 1) == std::vector<double>{2.0});
  CHECK_THROWS_AS(log_grid(0.0, 1.0, 3), InvalidInput);
  CHECK_THROWS_AS(log_grid(1.0, 2.0, 0), InvalidInput);
}

TEST_CASE("parallel_for runs every index and rethrows the lowest failure") {
  std::vector<int> hit(100, 0);
  parallel_for(100, 4, [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) CHECK(h == 1);
  try {
    parallel_for(50, 4, [](std::size_t i) {
      if (i == 7 || i == 30) throw std::runtime_error(std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "7");
  }
}

}  // TEST_SUITE
