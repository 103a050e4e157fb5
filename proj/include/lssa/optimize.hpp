#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

// Derivative-free minimizers. Both respect the evaluation budget exactly,
// are deterministic for a deterministic objective, and return the best point
// ever evaluated (not the final iterate).

namespace lssa {

struct OptimResult {
  std::vector<double> x;
  double f = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
};

namespace detail {

// Tracks the evaluation budget and the incumbent across an optimizer run.
template <typename F>
class BudgetedObjective {
 public:
  BudgetedObjective(F& f, std::size_t max_evals) : f_(f), max_evals_(max_evals) {}

  bool exhausted() const { return used_ >= max_evals_; }

  double operator()(const std::vector<double>& x) {
    ++used_;
    const double v = f_(std::span<const double>(x));
    if (v < best_.f) {
      best_.f = v;
      best_.x = x;
    }
    return v;
  }

  OptimResult take_best() {
    best_.evaluations = used_;
    return std::move(best_);
  }

 private:
  F& f_;
  std::size_t max_evals_;
  std::size_t used_ = 0;
  OptimResult best_;
};

// Solves A x = b by Gaussian elimination with partial pivoting.
// Returns false when A is numerically singular.
inline bool solve_linear(std::vector<std::vector<double>> a, std::vector<double> b,
                         std::vector<double>& x) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-14) return false;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double m = a[r][col] / a[col][col];
      if (m == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= m * a[col][c];
      b[r] -= m * b[col];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return true;
}

}  // namespace detail

struct NelderMeadParams {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double initial_step = 0.5;
  std::optional<std::size_t> max_iterations;  // main-loop passes, if capped
};

// Standard Nelder-Mead simplex minimization.
template <typename F>
OptimResult nelder_mead(F&& f, std::span<const double> x0, std::size_t max_evals,
                        const NelderMeadParams& params = {}) {
  if (max_evals == 0) throw std::invalid_argument("nelder_mead: max_evals must be positive");
  const std::size_t n = x0.size();
  if (n == 0) throw std::invalid_argument("nelder_mead: empty start point");
  detail::BudgetedObjective<F> obj(f, max_evals);

  std::vector<std::vector<double>> v;
  std::vector<double> fv;
  v.reserve(n + 1);
  v.emplace_back(x0.begin(), x0.end());
  for (std::size_t k = 0; k < n; ++k) {
    auto p = v[0];
    p[k] += params.initial_step;
    v.push_back(std::move(p));
  }
  for (auto& p : v) {
    if (obj.exhausted()) return obj.take_best();
    fv.push_back(obj(p));
  }

  std::size_t iterations = 0;
  while (!obj.exhausted()) {
    if (params.max_iterations && iterations >= *params.max_iterations) break;
    ++iterations;

    // Order: best, ..., second-worst, worst.
    std::vector<std::size_t> order(n + 1);
    for (std::size_t k = 0; k <= n; ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t ib = order[0], isw = order[n - 1], iw = order[n];

    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
      if (k == iw) continue;
      for (std::size_t d = 0; d < n; ++d) centroid[d] += v[k][d];
    }
    for (auto& c : centroid) c /= static_cast<double>(n);

    const auto along = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t d = 0; d < n; ++d) p[d] = centroid[d] + t * (centroid[d] - v[iw][d]);
      return p;
    };

    auto xr = along(params.reflection);
    const double fr = obj(xr);
    if (fr < fv[ib]) {
      if (!obj.exhausted()) {
        auto xe = along(params.expansion);
        const double fe = obj(xe);
        if (fe < fr) {
          v[iw] = std::move(xe);
          fv[iw] = fe;
          continue;
        }
      }
      v[iw] = std::move(xr);
      fv[iw] = fr;
      continue;
    }
    if (fr < fv[isw]) {
      v[iw] = std::move(xr);
      fv[iw] = fr;
      continue;
    }
    if (obj.exhausted()) break;
    // Contraction, outside if the reflected point improved on the worst.
    const bool outside = fr < fv[iw];
    auto xc = along(outside ? params.contraction : -params.contraction);
    const double fc = obj(xc);
    if (fc < std::min(fr, fv[iw])) {
      v[iw] = std::move(xc);
      fv[iw] = fc;
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t k = 0; k <= n; ++k) {
      if (k == ib) continue;
      for (std::size_t d = 0; d < n; ++d)
        v[k][d] = v[ib][d] + params.shrink * (v[k][d] - v[ib][d]);
      if (obj.exhausted()) break;
      fv[k] = obj(v[k]);
    }
  }
  return obj.take_best();
}

struct CobylaParams {
  double rho_begin = 1.0;  // initial trust-region radius
  double rho_end = 1e-4;   // final radius; the run stops below this
};

// Linear-interpolation trust-region minimization in the style of COBYLA,
// without the constraint machinery (nothing in this library is constrained).
// A simplex of n+1 points carries a linear model of f; each iteration takes
// a steepest-descent step of length rho on that model, or a geometry step
// re-seating the farthest vertex when the model is degenerate. The radius
// halves after n+1 consecutive non-improving evaluations.
template <typename F>
OptimResult cobyla(F&& f, std::span<const double> x0, std::size_t max_evals,
                   const CobylaParams& params = {}) {
  if (max_evals == 0) throw std::invalid_argument("cobyla: max_evals must be positive");
  const std::size_t n = x0.size();
  if (n == 0) throw std::invalid_argument("cobyla: empty start point");
  detail::BudgetedObjective<F> obj(f, max_evals);

  std::vector<std::vector<double>> v;
  std::vector<double> fv;
  v.reserve(n + 1);
  v.emplace_back(x0.begin(), x0.end());
  for (std::size_t k = 0; k < n; ++k) {
    auto p = v[0];
    p[k] += params.rho_begin;
    v.push_back(std::move(p));
  }
  for (auto& p : v) {
    if (obj.exhausted()) return obj.take_best();
    fv.push_back(obj(p));
  }

  double rho = params.rho_begin;
  std::size_t since_improve = 0;
  std::size_t geometry_cycle = 0;

  while (!obj.exhausted() && rho >= params.rho_end) {
    std::size_t ib = 0, iw = 0;
    for (std::size_t k = 1; k <= n; ++k) {
      if (fv[k] < fv[ib]) ib = k;
      if (fv[k] > fv[iw]) iw = k;
    }

    // Linear model: f(v[k]) = f(v[ib]) + g . (v[k] - v[ib]) for k != ib.
    std::vector<std::vector<double>> a;
    std::vector<double> d;
    a.reserve(n);
    for (std::size_t k = 0; k <= n; ++k) {
      if (k == ib) continue;
      std::vector<double> row(n);
      for (std::size_t c = 0; c < n; ++c) row[c] = v[k][c] - v[ib][c];
      a.push_back(std::move(row));
      d.push_back(fv[k] - fv[ib]);
    }
    std::vector<double> g;
    const bool have_model = detail::solve_linear(std::move(a), std::move(d), g);
    double gnorm = 0.0;
    if (have_model) {
      for (double gc : g) gnorm += gc * gc;
      gnorm = std::sqrt(gnorm);
    }

    std::vector<double> trial;
    std::size_t replace;
    if (have_model && gnorm > 1e-12) {
      // Trust-region step from the best vertex; replaces the worst vertex
      // when it improves on it.
      trial = v[ib];
      for (std::size_t c = 0; c < n; ++c) trial[c] -= rho * g[c] / gnorm;
      replace = iw;
      const double ft = obj(trial);
      since_improve = ft < fv[ib] ? 0 : since_improve + 1;
      if (ft < fv[replace]) {
        v[replace] = std::move(trial);
        fv[replace] = ft;
      }
    } else {
      // Degenerate or flat model: re-seat the vertex farthest from the best
      // at an axis displacement of length rho, cycling direction and sign.
      double worst_dist = -1.0;
      replace = ib == 0 ? 1 : 0;
      for (std::size_t k = 0; k <= n; ++k) {
        if (k == ib) continue;
        double dist = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
          const double dx = v[k][c] - v[ib][c];
          dist += dx * dx;
        }
        if (dist > worst_dist) {
          worst_dist = dist;
          replace = k;
        }
      }
      const std::size_t axis = geometry_cycle % n;
      const double sign = (geometry_cycle / n) % 2 == 0 ? 1.0 : -1.0;
      ++geometry_cycle;
      trial = v[ib];
      trial[axis] += sign * rho;
      const double ft = obj(trial);
      since_improve = ft < fv[ib] ? 0 : since_improve + 1;
      v[replace] = std::move(trial);
      fv[replace] = ft;
    }

    if (since_improve > n) {
      rho *= 0.5;
      since_improve = 0;
    }
  }
  return obj.take_best();
}

}  // namespace lssa
