#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "eikfm/grid.hpp"

namespace eikfm {

/// One upwind term alpha * (t - beta) of the local equation
///   sum_k max(alpha_k (t - beta_k), 0)^2 = kappa^2.
struct QuadraticTerm {
  double alpha = 0.0;
  double beta = 0.0;
};

enum class Direction : std::int8_t { kBackward = -1, kNone = 0, kForward = 1 };

struct PiecewiseSolution {
  double value = 0.0;
  /// Bit k set when term k survives in the final solve.
  unsigned retained = 0;
};

/// Solves the piecewise quadratic with the drop-largest-beta rule: all terms
/// are assumed active, the larger root is taken, and while the root is not
/// strictly above every retained beta (or the discriminant is negative) the
/// term with the largest beta is removed and the solve repeated. With at
/// least one term and kappa > 0 this always terminates with a valid root.
PiecewiseSolution solve_piecewise_quadratic(std::span<const QuadraticTerm> terms,
                                            double kappa);

// Term constructors. `dir` selects the sign of the distance-gradient
// contribution: +p0 for backward differences, -p0 for forward ones.

/// Factored operator tau0 * D tau1 + p0 * tau1 of first or second order.
/// nb1/nb2 are tau1 at the first and second upwind neighbours.
inline QuadraticTerm factored_term(int order, Direction dir, double tau0,
                                   double p0, double h, double nb1,
                                   double nb2 = 0.0) {
  const double p = dir == Direction::kForward ? -p0 : p0;
  QuadraticTerm t;
  if (order == 2) {
    t.alpha = 1.5 * tau0 / h + p;
    t.beta = tau0 * (4.0 * nb1 - nb2) / (2.0 * h * t.alpha);
  } else {
    t.alpha = tau0 / h + p;
    t.beta = tau0 * nb1 / (h * t.alpha);
  }
  return t;
}

/// Plain (non-factored) operator on tau itself.
inline QuadraticTerm plain_term(int order, double h, double nb1,
                                double nb2 = 0.0) {
  if (order == 2) return {1.5 / h, (4.0 * nb1 - nb2) / 3.0};
  return {1.0 / h, nb1};
}

/// Plain operator applied to the product tau0 * tau1, written in terms of
/// the unknown tau1 at a node with distance tau0 > 0. nb1/nb2 are products.
inline QuadraticTerm product_term(int order, double tau0, double h, double nb1,
                                  double nb2 = 0.0) {
  if (order == 2) return {1.5 * tau0 / h, (4.0 * nb1 - nb2) / (3.0 * tau0)};
  return {tau0 / h, nb1 / tau0};
}

/// Terms with alpha at or below this threshold are not emitted.
inline double alpha_floor(double tau0, double h) {
  return 1e-14 * (tau0 / h + 1.0);
}

}  // namespace eikfm
