#pragma once

#include "goq/goal_model.hpp"
#include "goq/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>

namespace goq {

class Quantizer;
class SourceModel;

struct WeightMatrices {
  Mat A;  // J^T H_f J
  Mat B;  // sum_i grad_i H_chi_i
  Mat E;  // A + B
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  Vec min_eigenvector;  // of A
  double nu_min = 0.0;  // smallest eigenvalue of H_f
  Vec nu_min_vector;
};

/// Throws NumericError when H_f is not symmetric to 1e-6 (relative).
/// `spectrum` = false skips the eigen-decompositions.
WeightMatrices weight_matrices(const GoalModel& goal, const Vec& g, bool spectrum = true,
                               DerivativeSource source = DerivativeSource::automatic);

/// Least normalised moment of inertia of the optimal tessellating cell
/// (p = 1, 2, 3).
double mu_p(int p);

struct OlBounds {
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> refined_lower;
  double mu = 0.0;
  int M = 0;
  int p = 0;
  int d = 0;
};

struct BoundsOptions {
  /// Monte Carlo points for the integrals when p > 2 (and for p = 2 when
  /// the grid is disabled).
  std::size_t mc_points = 100000;
  std::uint64_t seed = 11;
  /// Tensor Gauss-Legendre panels per axis for p = 2.
  int grid_panels = 48;
};

/// Eigenvalue bounds on the HR optimality loss:
/// (p mu_p / 2) M^{-2/p} (int (lambda phi)^{p/(p+2)})^{(p+2)/p}.
OlBounds ol_bounds(const GoalModel& goal, const SourceModel& source, int M, const BoundsOptions& opt = {});

/// Scalar factor a(J) of the refined lower bound: min over unit e of
/// ||J e||^2, so that e^T A e >= nu_min a(J).
double stretch_factor(const Mat& jac);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Mean over n seeded draws of 1/2 (g - z)^T A(g) (g - z), z = Q(g).
MonteCarloEstimate hr_equivalent(const GoalModel& goal, const Quantizer& q, const SourceModel& source,
                                 std::size_t n, std::uint64_t seed, int threads = 0);

nlohmann::json to_json(const OlBounds& b);

}  // namespace goq
