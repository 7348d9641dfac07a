#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eikfm/analytic.hpp"
#include "eikfm/fast_marching.hpp"

namespace eikfm {

/// Residual |grad tau|^2 - m per node, gradients by central differences
/// (one-sided on the boundary). Writes into `out`, which must hold one entry
/// per node; no allocation happens here.
void eikonal_residual(const ScalarField& tau, const ScalarField& m,
                      std::span<double> out);

struct WorkUnit {
  double seconds = 0.0;  ///< median time of one eikonal_residual call
  int repetitions = 0;
};

/// Median of `repetitions` timed residual evaluations on `grid`, after one
/// untimed warm-up. Buffers are allocated before timing starts.
WorkUnit measure_work_unit(const RegularGrid& grid, int repetitions = 5);

struct ConvergenceRow {
  double h = 0.0;
  MultiIndex counts{0, 0, 0};
  int dim = 2;
  int order = 1;
  double linf = 0.0;
  double mean_l2 = 0.0;
  double seconds = 0.0;
  double work_units = 0.0;

  /// Node counts as "n0xn1[xn2]".
  std::string dims_label() const;
  bool operator==(const ConvergenceRow&) const = default;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;  ///< sorted by decreasing h, then order

  /// Least-squares slope of log2(error) against log2(h) for one order;
  /// nullopt with fewer than two distinct h values.
  std::optional<double> slope(int order, bool use_linf = false) const;
};

struct ConvergenceOptions {
  FmMode mode = FmMode::kFactored;
  bool enforce_monotonicity = false;
  bool measure_work = true;
};

/// One factored (or plain) solve per (h, order) against the exact solution.
/// Errors are on tau = tau0 * tau1 for factored solves.
ConvergenceReport run_convergence(const AnalyticCase& c, std::span<const double> hs,
                                  std::span<const int> orders,
                                  const ConvergenceOptions& opts = {});

/// Columns: h,n,order,linf,mean_l2,seconds,work_units
void write_convergence_csv(std::ostream& os, const ConvergenceReport& report);
ConvergenceReport read_convergence_csv(std::istream& is);

}  // namespace eikfm
