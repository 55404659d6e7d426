#pragma once

#include "goq/types.hpp"

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace goq {

using ScalarFn = std::function<double(double)>;
using FieldFn = std::function<double(const Vec&)>;

struct QuadratureOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-8;
  /// The interval is pre-split into this many equal panels before adaptive
  /// Gauss-Kronrod refinement; helps integrands with steep endpoint behaviour.
  int panels = 32;
};

/// Adaptive Gauss-Kronrod (G7/K15) integral of f over [a, b].
double integrate(const ScalarFn& f, double a, double b, const QuadratureOptions& opt = {});

/// Tensor-product composite Gauss-Legendre rule over a 2-D box.
double integrate_box2(const FieldFn& f, const Box& box, int panels_per_axis = 48, int order = 8);

/// Monte Carlo mean of f over the box (uniform points) times the volume.
double integrate_box_mc(const FieldFn& f, const Box& box, std::size_t n, std::uint64_t seed);

/// Integral of f over a box of dimension 1, 2 or more (MC above 2).
double integrate_box(const FieldFn& f, const Box& box, std::uint64_t seed = 17);

/// Minimiser of a unimodal function on [a, b] by Brent's method (golden
/// section with parabolic steps). Returns {argmin, min}.
std::pair<double, double> minimize_scalar(const ScalarFn& f, double a, double b, double x_tol = 1e-10);

/// Grid scan followed by Brent refinement around the best grid cell; for
/// objectives that may have several local minima on [a, b].
std::pair<double, double> minimize_scalar_global(const ScalarFn& f, double a, double b, int grid = 400,
                                                 double x_tol = 1e-10);

/// Root of a monotone function on [a, b] by bisection.
double bisect(const ScalarFn& f, double a, double b, double tol = 1e-12, int max_iter = 200);

/// Number of worker threads the library may use: explicit value if > 0,
/// else GOQ_THREADS, else 1.
int resolve_threads(int requested);
void set_default_threads(int threads);
int default_threads();

/// Runs body(chunk_index, begin, end) over fixed-size chunks of [0, n).
/// Chunking does not depend on the worker count, so per-chunk partial
/// results reduced in chunk order are bit-identical for any thread count.
void for_each_chunk(std::size_t n, std::size_t chunk,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& body,
                    int threads = 0);

inline std::size_t chunk_count(std::size_t n, std::size_t chunk) { return (n + chunk - 1) / chunk; }

}  // namespace goq
