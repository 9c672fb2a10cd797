#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gistsparse/losses.hpp"
#include "gistsparse/regularizers.hpp"

namespace gistsparse {

// Self-checks behind the `prox-check` and `grad-check` commands. Both accept
// an injectable implementation so negative controls can be exercised.

using ProxFn = std::function<double(const RegularizerSpec&, double v, double tau)>;

struct ProxCheckLine {
  RegKind kind;
  bool nonneg;
  double worst_gap;  // max over samples of h(closed form) - h(oracle)
  bool pass;
};

struct ProxCheckResult {
  std::vector<ProxCheckLine> lines;  // 4 kinds x {plain, nonneg}
  bool pass = true;
};

/// Random (v, tau, theta) in [-10, 10] x [1e-3, 10] x [1e-2, 1] per line;
/// a sample fails when the closed-form objective exceeds the oracle's by
/// more than `tolerance`.
ProxCheckResult prox_check(int samples = 200, double tolerance = 1e-6, std::uint64_t seed = 0,
                           long grid_n = 100000, const ProxFn& prox = prox_scalar);

/// prox_scalar with the l1 threshold inflated by `factor` (negative control).
ProxFn perturbed_lasso_prox(double factor = 1.05);

struct GradCheckLine {
  LossKind kind;
  double max_rel_error;
  bool pass;
};

struct GradCheckResult {
  std::vector<GradCheckLine> lines;  // one per loss
  bool pass = true;
};

/// Relative error ||g - g_fd||_inf / max(||g_fd||_inf, 1e-8) between the
/// analytic gradient and central differences (step 1e-6 scaled by
/// max(1, |x_k|)) at `points` random models per loss.
/// `gradient_scale` multiplies the analytic gradient (1 = unperturbed).
GradCheckResult grad_check(int points = 20, double tolerance = 1e-5, std::uint64_t seed = 0,
                           double gradient_scale = 1.0);

}  // namespace gistsparse
