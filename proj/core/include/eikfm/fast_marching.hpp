#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "eikfm/grid.hpp"
#include "eikfm/local_solver.hpp"

namespace eikfm {

enum class FmMode {
  kFactored,  ///< march tau1 with tau = tau0 * tau1
  kPlain,     ///< march tau directly with standard upwind differences
};

struct FmConfig {
  int order = 1;  ///< 1 or 2
  FmMode mode = FmMode::kFactored;
  /// Swap a factored axis term for the plain operator on tau0*tau1 whenever
  /// their signs disagree, so accepted travel times never decrease.
  bool enforce_monotonicity = false;
};

/// Stencil used on one axis in the accepted update of a node.
struct AxisStencil {
  Direction direction = Direction::kNone;
  std::int8_t order = 0;        ///< 1 or 2 when direction != kNone
  bool plain_fallback = false;  ///< plain operator on tau0*tau1 was used
};

struct StencilRecord {
  std::array<AxisStencil, kMaxDim> axes{};

  bool used_plain_fallback() const {
    for (const auto& a : axes) {
      if (a.plain_fallback) return true;
    }
    return false;
  }
  bool operator==(const StencilRecord& o) const {
    for (int d = 0; d < kMaxDim; ++d) {
      if (axes[d].direction != o.axes[d].direction ||
          axes[d].order != o.axes[d].order ||
          axes[d].plain_fallback != o.axes[d].plain_fallback) {
        return false;
      }
    }
    return true;
  }
};

struct FmSolution {
  FmConfig config;
  /// tau1 in factored mode; tau itself in plain mode.
  ScalarField tau1;
  /// Nodes in the order they were accepted; the source comes first.
  std::vector<Index> acceptance_order;
  /// Stencil of the accepted update per node; all-none at the source.
  std::vector<StencilRecord> stencils;
  SourceSpec source;
  std::size_t heap_peak = 0;

  /// tau0 * tau1 (factored) or a copy of tau1 (plain). `tau0` is ignored in
  /// plain mode.
  ScalarField travel_time(const ScalarField& tau0) const;
};

/// Solves |grad tau|^2 = m from a point source by Fast Marching.
/// Throws DomainError for non-positive or non-finite m, or inputs on a
/// different grid than m.
FmSolution fm_solve(const ScalarField& m, const SourceSpec& src,
                    const DistanceFactor& dist, const FmConfig& cfg);

/// Convenience overload that builds the distance factor when needed.
FmSolution fm_solve(const ScalarField& m, const SourceSpec& src,
                    const FmConfig& cfg);

/// Read-only view of a march in progress, used by the per-node update.
struct MarchView {
  const RegularGrid* grid = nullptr;
  std::span<const double> m;
  std::span<const double> tau0;                      ///< empty in plain mode
  std::array<std::span<const double>, kMaxDim> grad; ///< empty in plain mode
  std::span<const double> tau1;     ///< current values (inf when unknown)
  std::span<const double> product;  ///< tau0*tau1 (factored) or tau (plain)
  std::span<const std::uint8_t> known;
  FmConfig cfg;
};

struct LocalUpdate {
  double value = 0.0;
  StencilRecord record;
};

/// Candidate value for `node` from its known neighbours. Per axis the upwind
/// side is the known neighbour with the smaller travel time (ties go
/// backward); second order is used when the next node along that side is
/// known and the upwind pair is ordered. Requires at least one known
/// neighbour.
LocalUpdate local_update(const MarchView& view, Index node);

/// The quadratic terms implied by a stencil choice at `node`, in axis order,
/// before the alpha floor is applied.
std::array<QuadraticTerm, kMaxDim> assemble_terms(const MarchView& view,
                                                  Index node,
                                                  const StencilRecord& choice);

}  // namespace eikfm
