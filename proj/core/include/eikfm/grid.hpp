#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace eikfm {

inline constexpr int kMaxDim = 3;

using Index = std::int64_t;
/// Per-axis node index. Entries beyond the grid dimension are zero.
using MultiIndex = std::array<int, kMaxDim>;
/// Physical coordinates. Entries beyond the grid dimension are zero.
using Point = std::array<double, kMaxDim>;

/// Uniform Cartesian node grid in 2 or 3 dimensions with a single spacing h.
///
/// Nodes are addressed by a linear index with the LAST axis varying fastest:
///   2D: k = i0 * n1 + i1
///   3D: k = (i0 * n1 + i1) * n2 + i2
/// Node coordinates are origin + h * multi-index (node-centred, no cells).
class RegularGrid {
 public:
  RegularGrid() = default;
  /// counts.size() is the dimension (2 or 3). origin defaults to zero.
  RegularGrid(std::span<const int> counts, double spacing,
              std::span<const double> origin = {});

  static RegularGrid make2d(int n0, int n1, double h, double o0 = 0.0,
                            double o1 = 0.0);
  static RegularGrid make3d(int n0, int n1, int n2, double h, double o0 = 0.0,
                            double o1 = 0.0, double o2 = 0.0);
  /// Grid covering [origin, origin + extent] per axis; each extent must be an
  /// integer multiple of h (to 1e-9 relative).
  static RegularGrid from_extent(std::span<const double> extent, double h,
                                 std::span<const double> origin = {});

  int dim() const { return dim_; }
  int count(int axis) const { return counts_[axis]; }
  const MultiIndex& counts() const { return counts_; }
  double spacing() const { return h_; }
  double origin(int axis) const { return origin_[axis]; }
  const Point& origin() const { return origin_; }
  Index size() const { return size_; }
  Index stride(int axis) const { return strides_[axis]; }

  Index linearize(const MultiIndex& idx) const {
    Index k = 0;
    for (int d = 0; d < dim_; ++d) k += strides_[d] * idx[d];
    return k;
  }
  MultiIndex delinearize(Index k) const {
    MultiIndex idx{0, 0, 0};
    for (int d = dim_ - 1; d >= 0; --d) {
      idx[d] = static_cast<int>(k % counts_[d]);
      k /= counts_[d];
    }
    return idx;
  }
  bool contains(const MultiIndex& idx) const;
  Point coordinate(const MultiIndex& idx) const {
    Point p{0.0, 0.0, 0.0};
    for (int d = 0; d < dim_; ++d) p[d] = origin_[d] + h_ * idx[d];
    return p;
  }
  Point coordinate(Index k) const { return coordinate(delinearize(k)); }

  bool operator==(const RegularGrid& other) const = default;

 private:
  int dim_ = 0;
  MultiIndex counts_{0, 0, 0};
  std::array<Index, kMaxDim> strides_{0, 0, 0};
  Index size_ = 0;
  double h_ = 0.0;
  Point origin_{0.0, 0.0, 0.0};
};

/// Real value per grid node.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const RegularGrid& grid, double fill = 0.0)
      : grid_(grid), values_(static_cast<std::size_t>(grid.size()), fill) {}
  ScalarField(const RegularGrid& grid, std::vector<double> values);

  const RegularGrid& grid() const { return grid_; }
  Index size() const { return static_cast<Index>(values_.size()); }
  double operator[](Index k) const { return values_[static_cast<std::size_t>(k)]; }
  double& operator[](Index k) { return values_[static_cast<std::size_t>(k)]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::vector<double>& storage() { return values_; }

 private:
  RegularGrid grid_;
  std::vector<double> values_;
};

/// Point source located exactly at a grid node.
struct SourceSpec {
  MultiIndex index{0, 0, 0};
};

/// tau0(x) = |x - x0| and its analytic unit gradient per node.
/// At the source the gradient is set to e1 = (1, 0[, 0]).
struct DistanceFactor {
  ScalarField tau0;
  std::array<ScalarField, kMaxDim> grad;  // only the first dim() are populated
  SourceSpec source;
};

DistanceFactor build_distance_factor(const RegularGrid& grid,
                                     const SourceSpec& src);

/// Maximum absolute difference.
double linf_error(const ScalarField& approx, const ScalarField& exact);
/// l2 norm of the difference divided by sqrt(node count).
double mean_l2_error(const ScalarField& approx, const ScalarField& exact);

/// Source at the node nearest to a physical point. Throws DomainError when the
/// point is off-grid by more than 1e-9 h or outside the domain.
SourceSpec source_at(const RegularGrid& grid, const Point& x);

}  // namespace eikfm
