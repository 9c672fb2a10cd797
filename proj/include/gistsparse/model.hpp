#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>

namespace gistsparse {

/// Linear model: coefficients plus an optional unregularized bias.
struct Model {
  Eigen::VectorXd coef;
  double bias = 0.0;
  bool has_bias = false;

  static Model zeros(Eigen::Index dim, bool with_bias) {
    Model m;
    m.coef = Eigen::VectorXd::Zero(dim);
    m.has_bias = with_bias;
    return m;
  }

  Eigen::Index dim() const { return coef.size(); }

  /// Exactly-nonzero coefficients; the bias is never counted.
  std::size_t nonzero_count() const {
    std::size_t n = 0;
    for (Eigen::Index k = 0; k < coef.size(); ++k) n += coef[k] != 0.0;
    return n;
  }

  /// Reported coefficient total: nonzeros plus one for the bias when present.
  std::size_t active_total() const { return nonzero_count() + (has_bias ? 1u : 0u); }

  bool all_finite() const { return coef.allFinite() && std::isfinite(bias); }

  friend bool operator==(const Model& a, const Model& b) {
    return a.has_bias == b.has_bias && a.bias == b.bias && a.coef.size() == b.coef.size() &&
           (a.coef.array() == b.coef.array()).all();
  }
};

}  // namespace gistsparse
