#include "goq/numerics.hpp"
#include "goq/rng.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace goq {

Box Box::interval(double lo, double hi) {
  Box b;
  b.lo = scalar_vec(lo);
  b.hi = scalar_vec(hi);
  return b;
}

Box Box::cube(int dim, double lo, double hi) {
  Box b;
  b.lo = Vec::Constant(dim, lo);
  b.hi = Vec::Constant(dim, hi);
  return b;
}

bool Box::contains(const Vec& g, double tol) const {
  if (g.size() != lo.size()) return false;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (!(g(i) >= lo(i) - tol && g(i) <= hi(i) + tol)) return false;
  }
  return true;
}

Vec Box::clamp(const Vec& g) const { return g.cwiseMax(lo).cwiseMin(hi); }

double Box::volume() const { return (hi - lo).prod(); }

double integrate(const ScalarFn& f, double a, double b, const QuadratureOptions& opt) {
  if (a == b) return 0.0;
  if (!(a < b)) return -integrate(f, b, a, opt);
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  const int panels = std::max(1, opt.panels);
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * width;
    const double hi = (k + 1 == panels) ? b : a + (k + 1) * width;
    double err = 0.0;
    double l1 = 0.0;
    const double v = GK::integrate(f, lo, hi, 25, opt.rel_tol, &err, &l1);
    if (!std::isfinite(v)) throw NumericError("integrate: non-finite integrand");
    if (err > std::max(opt.abs_tol / panels, opt.rel_tol * l1) * 100.0) {
      throw NumericError("integrate: adaptive quadrature did not converge");
    }
    total += v;
  }
  return total;
}

double integrate_box2(const FieldFn& f, const Box& box, int panels_per_axis, int order) {
  if (box.dim() != 2) throw ConfigError("integrate_box2: box must be 2-D");
  // Fixed 8-point rule; `order` is kept for API symmetry and must be 8.
  if (order != 8) throw ConfigError("integrate_box2: only order 8 is supported");
  using GL = boost::math::quadrature::gauss<double, 8>;
  const auto& xs = GL::abscissa();
  const auto& ws = GL::weights();
  std::vector<double> nodes;
  std::vector<double> weights;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    nodes.push_back(xs[i]);
    weights.push_back(ws[i]);
    if (xs[i] != 0.0) {
      nodes.push_back(-xs[i]);
      weights.push_back(ws[i]);
    }
  }
  auto axis_points = [&](double lo, double hi, std::vector<double>& pts, std::vector<double>& wts) {
    const double h = (hi - lo) / panels_per_axis;
    for (int k = 0; k < panels_per_axis; ++k) {
      const double mid = lo + (k + 0.5) * h;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        pts.push_back(mid + 0.5 * h * nodes[i]);
        wts.push_back(0.5 * h * weights[i]);
      }
    }
  };
  std::vector<double> p0, w0, p1, w1;
  axis_points(box.lo(0), box.hi(0), p0, w0);
  axis_points(box.lo(1), box.hi(1), p1, w1);
  Vec g(2);
  double total = 0.0;
  for (std::size_t i = 0; i < p0.size(); ++i) {
    double row = 0.0;
    g(0) = p0[i];
    for (std::size_t j = 0; j < p1.size(); ++j) {
      g(1) = p1[j];
      row += w1[j] * f(g);
    }
    total += w0[i] * row;
  }
  return total;
}

double integrate_box_mc(const FieldFn& f, const Box& box, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Vec g(box.dim());
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (int i = 0; i < box.dim(); ++i) g(i) = rng.uniform(box.lo(i), box.hi(i));
    sum += f(g);
  }
  return box.volume() * sum / static_cast<double>(n);
}

double integrate_box(const FieldFn& f, const Box& box, std::uint64_t seed) {
  switch (box.dim()) {
    case 1: {
      Vec g(1);
      return integrate(
          [&](double t) {
            g(0) = t;
            return f(g);
          },
          box.lo(0), box.hi(0));
    }
    case 2:
      return integrate_box2(f, box);
    default:
      return integrate_box_mc(f, box, 100000, seed);
  }
}

std::pair<double, double> minimize_scalar(const ScalarFn& f, double a, double b, double x_tol) {
  // Brent's bits parameter is a relative precision; 1e-10 needs ~34 bits.
  const int bits = std::clamp(static_cast<int>(std::ceil(-std::log2(std::max(x_tol, 1e-15)))), 8,
                              std::numeric_limits<double>::digits / 2 + 4);
  std::uintmax_t max_iter = 500;
  auto r = boost::math::tools::brent_find_minima(f, a, b, bits, max_iter);
  return {r.first, r.second};
}

std::pair<double, double> minimize_scalar_global(const ScalarFn& f, double a, double b, int grid,
                                                 double x_tol) {
  grid = std::max(grid, 3);
  const double h = (b - a) / grid;
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= grid; ++k) {
    const double v = f(a + k * h);
    if (v < best_v) {
      best_v = v;
      best = k;
    }
  }
  const double lo = std::max(a, a + (best - 1) * h);
  const double hi = std::min(b, a + (best + 1) * h);
  auto r = minimize_scalar(f, lo, hi, x_tol);
  if (r.second <= best_v) return r;
  return {a + best * h, best_v};
}

double bisect(const ScalarFn& f, double a, double b, double tol, int max_iter) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) throw NumericError("bisect: root not bracketed");
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

namespace {
std::atomic<int> g_default_threads{0};
}

void set_default_threads(int threads) { g_default_threads = threads; }

int default_threads() { return resolve_threads(0); }

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (g_default_threads > 0) return g_default_threads;
  if (const char* env = std::getenv("GOQ_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

void for_each_chunk(std::size_t n, std::size_t chunk,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& body, int threads) {
  const std::size_t chunks = chunk_count(n, chunk);
  const int workers = std::min<int>(resolve_threads(threads), static_cast<int>(std::max<std::size_t>(chunks, 1)));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c, c * chunk, std::min(n, (c + 1) * chunk));
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < chunks; c = next++) body(c, c * chunk, std::min(n, (c + 1) * chunk));
    });
  }
}

}  // namespace goq
