#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace goq {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Invalid user input: unknown ids, bad parameters, malformed config.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation could not produce a trustworthy number.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned box in R^p.
struct Box {
  Vec lo;
  Vec hi;

  static Box interval(double lo, double hi);
  static Box cube(int dim, double lo, double hi);

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Vec& g, double tol = 0.0) const;
  Vec clamp(const Vec& g) const;
  double volume() const;
  Vec center() const { return 0.5 * (lo + hi); }
};

inline Vec scalar_vec(double v) {
  Vec out(1);
  out(0) = v;
  return out;
}

}  // namespace goq
