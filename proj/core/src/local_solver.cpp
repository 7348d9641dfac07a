#include "eikfm/local_solver.hpp"

#include <cmath>
#include <limits>

#include "eikfm/errors.hpp"

namespace eikfm {

namespace {

struct RootResult {
  double value;
  bool valid;
};

// Larger root of sum a_k^2 (t - b_k)^2 = kappa^2 over the active terms. The
// discriminant is written as S2 kappa^2 - sum_{j<k} a_j^2 a_k^2 (b_j - b_k)^2,
// which avoids cancelling S1^2 against S2 S0.
RootResult active_root(std::span<const QuadraticTerm> terms, unsigned active,
                       double kappa) {
  double s2 = 0.0;
  double s1 = 0.0;
  double cross = 0.0;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if (!(active >> j & 1u)) continue;
    const double aj2 = terms[j].alpha * terms[j].alpha;
    s2 += aj2;
    s1 += aj2 * terms[j].beta;
    for (std::size_t k = j + 1; k < terms.size(); ++k) {
      if (!(active >> k & 1u)) continue;
      const double db = terms[j].beta - terms[k].beta;
      cross += aj2 * terms[k].alpha * terms[k].alpha * db * db;
    }
  }
  const double disc = s2 * kappa * kappa - cross;
  if (disc < 0.0) return {std::numeric_limits<double>::quiet_NaN(), false};
  const double value = (s1 + std::sqrt(disc)) / s2;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if ((active >> j & 1u) && !(value > terms[j].beta)) return {value, false};
  }
  return {value, true};
}

}  // namespace

PiecewiseSolution solve_piecewise_quadratic(std::span<const QuadraticTerm> terms,
                                            double kappa) {
  if (terms.empty() || terms.size() > 8 * sizeof(unsigned)) {
    throw InternalError("solve_piecewise_quadratic: bad term count");
  }
  unsigned active = (terms.size() == 8 * sizeof(unsigned))
                        ? ~0u
                        : (1u << terms.size()) - 1u;
  for (;;) {
    const RootResult r = active_root(terms, active, kappa);
    if (r.valid) return {r.value, active};
    // Remove the active term with the largest beta; ties drop the later one.
    std::size_t worst = terms.size();
    for (std::size_t j = 0; j < terms.size(); ++j) {
      if (!(active >> j & 1u)) continue;
      if (worst == terms.size() || terms[j].beta >= terms[worst].beta) worst = j;
    }
    active &= ~(1u << worst);
    if (active == 0u) {
      throw InternalError("solve_piecewise_quadratic: no valid term set");
    }
  }
}

}  // namespace eikfm
