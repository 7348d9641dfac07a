#include "eikfm/grid.hpp"

#include <cmath>
#include <string>

#include "eikfm/errors.hpp"

namespace eikfm {

RegularGrid::RegularGrid(std::span<const int> counts, double spacing,
                         std::span<const double> origin) {
  if (counts.size() != 2 && counts.size() != 3) {
    throw DomainError("RegularGrid: dimension must be 2 or 3");
  }
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw DomainError("RegularGrid: spacing must be positive");
  }
  if (!origin.empty() && origin.size() != counts.size()) {
    throw DomainError("RegularGrid: origin dimension mismatch");
  }
  dim_ = static_cast<int>(counts.size());
  h_ = spacing;
  for (int d = 0; d < dim_; ++d) {
    if (counts[d] < 3) {
      throw DomainError("RegularGrid: every axis needs at least 3 nodes");
    }
    counts_[d] = counts[d];
    origin_[d] = origin.empty() ? 0.0 : origin[d];
  }
  Index stride = 1;
  for (int d = dim_ - 1; d >= 0; --d) {
    strides_[d] = stride;
    stride *= counts_[d];
  }
  size_ = stride;
}

RegularGrid RegularGrid::make2d(int n0, int n1, double h, double o0,
                                double o1) {
  const std::array<int, 2> n{n0, n1};
  const std::array<double, 2> o{o0, o1};
  return RegularGrid(n, h, o);
}

RegularGrid RegularGrid::make3d(int n0, int n1, int n2, double h, double o0,
                                double o1, double o2) {
  const std::array<int, 3> n{n0, n1, n2};
  const std::array<double, 3> o{o0, o1, o2};
  return RegularGrid(n, h, o);
}

RegularGrid RegularGrid::from_extent(std::span<const double> extent, double h,
                                     std::span<const double> origin) {
  if (!(h > 0.0)) throw DomainError("from_extent: spacing must be positive");
  std::vector<int> counts;
  for (double len : extent) {
    const double cells = len / h;
    const double rounded = std::round(cells);
    if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells)) {
      throw DomainError("from_extent: extent " + std::to_string(len) +
                        " is not a multiple of h");
    }
    counts.push_back(static_cast<int>(rounded) + 1);
  }
  return RegularGrid(counts, h, origin);
}

bool RegularGrid::contains(const MultiIndex& idx) const {
  for (int d = 0; d < dim_; ++d) {
    if (idx[d] < 0 || idx[d] >= counts_[d]) return false;
  }
  for (int d = dim_; d < kMaxDim; ++d) {
    if (idx[d] != 0) return false;
  }
  return true;
}

ScalarField::ScalarField(const RegularGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (static_cast<Index>(values_.size()) != grid_.size()) {
    throw DomainError("ScalarField: value count does not match grid size");
  }
}

DistanceFactor build_distance_factor(const RegularGrid& grid,
                                     const SourceSpec& src) {
  if (!grid.contains(src.index)) {
    throw DomainError("build_distance_factor: source is off-grid");
  }
  DistanceFactor df;
  df.source = src;
  df.tau0 = ScalarField(grid);
  const int dim = grid.dim();
  for (int d = 0; d < dim; ++d) df.grad[d] = ScalarField(grid);

  const double h = grid.spacing();
  const Index n = grid.size();
  const Index src_lin = grid.linearize(src.index);
  for (Index k = 0; k < n; ++k) {
    const MultiIndex idx = grid.delinearize(k);
    // Offsets are formed from integer differences so the source offset is
    // exactly zero and symmetric nodes get bitwise-equal values.
    std::array<double, kMaxDim> dx{0.0, 0.0, 0.0};
    double r2 = 0.0;
    for (int d = 0; d < dim; ++d) {
      dx[d] = h * static_cast<double>(idx[d] - src.index[d]);
      r2 += dx[d] * dx[d];
    }
    const double r = std::sqrt(r2);
    df.tau0[k] = r;
    if (k == src_lin) {
      df.grad[0][k] = 1.0;
      for (int d = 1; d < dim; ++d) df.grad[d][k] = 0.0;
    } else {
      for (int d = 0; d < dim; ++d) df.grad[d][k] = dx[d] / r;
    }
  }
  return df;
}

namespace {

void require_same_grid(const ScalarField& a, const ScalarField& b,
                       const char* what) {
  if (!(a.grid() == b.grid()) || a.size() != b.size()) {
    throw DomainError(std::string(what) + ": fields live on different grids");
  }
}

}  // namespace

double linf_error(const ScalarField& approx, const ScalarField& exact) {
  require_same_grid(approx, exact, "linf_error");
  double worst = 0.0;
  for (Index k = 0; k < approx.size(); ++k) {
    worst = std::max(worst, std::abs(approx[k] - exact[k]));
  }
  return worst;
}

double mean_l2_error(const ScalarField& approx, const ScalarField& exact) {
  require_same_grid(approx, exact, "mean_l2_error");
  if (approx.size() == 0) return 0.0;
  double sum = 0.0;
  for (Index k = 0; k < approx.size(); ++k) {
    const double e = approx[k] - exact[k];
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(approx.size()));
}

SourceSpec source_at(const RegularGrid& grid, const Point& x) {
  SourceSpec src;
  const double h = grid.spacing();
  for (int d = 0; d < grid.dim(); ++d) {
    const double t = (x[d] - grid.origin(d)) / h;
    const double r = std::round(t);
    if (std::abs(t - r) > 1e-9 * std::max(1.0, std::abs(t))) {
      throw DomainError("source_at: point is not a grid node");
    }
    src.index[d] = static_cast<int>(r);
  }
  if (!grid.contains(src.index)) {
    throw DomainError("source_at: point lies outside the grid");
  }
  return src;
}

}  // namespace eikfm
