#include "support/sweeping_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace eikfm::testing {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Classic sorted-neighbour update: add axes in increasing order of their
// upwind value until the root no longer exceeds the next one.
double godunov(std::array<double, 3> a, int dim, double hk) {
  std::sort(a.begin(), a.begin() + dim);
  double s1 = 0.0, s2 = 0.0, u = kInf;
  for (int j = 0; j < dim; ++j) {
    if (a[j] == kInf) break;
    s1 += a[j];
    s2 += a[j] * a[j];
    const double n = j + 1;
    const double disc = s1 * s1 - n * (s2 - hk * hk);
    if (disc < 0.0) break;
    u = (s1 + std::sqrt(disc)) / n;
    if (j + 1 == dim || u <= a[j + 1]) break;
  }
  return u;
}

}  // namespace

ScalarField sweep_solve(const ScalarField& m, const SourceSpec& src, int* cycles) {
  const RegularGrid& g = m.grid();
  const int dim = g.dim();
  const double h = g.spacing();
  ScalarField u(g, kInf);
  const Index s = g.linearize(src.index);
  u[s] = 0.0;

  for (int cycle = 1; cycle <= 10000; ++cycle) {
    bool changed = false;
    for (int mask = 0; mask < (1 << dim); ++mask) {
      MultiIndex idx{0, 0, 0};
      MultiIndex start{0, 0, 0};
      for (int d = 0; d < dim; ++d) {
        start[d] = (mask >> d & 1) ? g.count(d) - 1 : 0;
      }
      idx = start;
      for (Index visited = 0; visited < g.size(); ++visited) {
        const Index k = g.linearize(idx);
        if (k != s) {
          std::array<double, 3> a{kInf, kInf, kInf};
          for (int d = 0; d < dim; ++d) {
            if (idx[d] > 0) a[d] = std::min(a[d], u[k - g.stride(d)]);
            if (idx[d] + 1 < g.count(d)) a[d] = std::min(a[d], u[k + g.stride(d)]);
          }
          const double cand = godunov(a, dim, h * std::sqrt(m[k]));
          if (cand < u[k]) {
            u[k] = cand;
            changed = true;
          }
        }
        // Advance idx in this ordering, last axis fastest.
        for (int d = dim - 1; d >= 0; --d) {
          const bool rev = mask >> d & 1;
          if (rev ? idx[d] > 0 : idx[d] + 1 < g.count(d)) {
            idx[d] += rev ? -1 : 1;
            break;
          }
          idx[d] = start[d];
        }
      }
    }
    if (!changed) {
      if (cycles) *cycles = cycle;
      return u;
    }
  }
  throw std::runtime_error("sweep_solve: did not converge");
}

}  // namespace eikfm::testing
