#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "eikfm/grid.hpp"

namespace eikfm {

/// Media with closed-form point-source travel times.
enum class CaseKind {
  kConstant,  ///< kappa = s0 everywhere
  kCgss,      ///< constant gradient of squared slowness along e1
  kCgv,       ///< constant gradient of velocity along e1
  kGauss,     ///< tau1 is a Gaussian bump; kappa follows from the factored form
};

std::string_view to_string(CaseKind kind);
CaseKind parse_case_kind(std::string_view name);

struct AnalyticCase {
  CaseKind kind = CaseKind::kConstant;
  int dim = 2;
  double a = 0.0;
  double s0 = 1.0;
  Point sigma{0.0, 0.0, 0.0};   ///< Gaussian diagonal
  Point center{0.0, 0.0, 0.0};  ///< Gaussian centre before snapping to the grid
  Point source{0.0, 0.0, 0.0};  ///< x0, must be a grid node
  Point extent{0.0, 0.0, 0.0};  ///< domain is [0, extent] per axis
};

/// Reference parameterisation for each medium in 2D and 3D.
AnalyticCase default_params(CaseKind kind, int dim);

/// Grid covering the case's domain with spacing h.
RegularGrid case_grid(const AnalyticCase& c, double h);

struct AnalyticFields {
  SourceSpec source;
  ScalarField m;           ///< squared slowness
  ScalarField tau;         ///< exact travel time
  ScalarField tau1;        ///< tau / tau0 off the source, kappa(x0) at it
  Point gaussian_center{}; ///< the grid-snapped x1 actually used (kGauss)
};

/// Evaluates the medium and its exact solution on every node. Throws
/// DomainError when the slowness would be non-positive anywhere on the grid.
AnalyticFields eval_case(const AnalyticCase& c, const RegularGrid& grid);

/// x1 floored to the grid (per axis, towards the origin).
Point snap_gaussian_center(const AnalyticCase& c, const RegularGrid& grid);

// Closed forms, written over a generic scalar so the same expressions can be
// evaluated with automatic-differentiation types. `dx` is x - x0, `dc` is
// x - x1. Callers supply `using std::sqrt` etc. for plain doubles.
namespace formulas {

/// CGSS travel time. sigma^2 uses the form that stays finite at a = 0.
template <typename T>
T cgss_tau(double a, double s0, const T* dx, int dim) {
  using std::sqrt;
  T r2 = dx[0] * dx[0];
  for (int d = 1; d < dim; ++d) r2 = r2 + dx[d] * dx[d];
  const T sbar2 = s0 * s0 + a * dx[0];
  const T root = sqrt(sbar2 * sbar2 - (a * a) * r2);
  const T sigma2 = 2.0 * r2 / (sbar2 + root);
  const T sigma = sqrt(sigma2);
  return sbar2 * sigma - (a * a / 6.0) * sigma * sigma2;
}

template <typename T>
T cgss_kappa2(double a, double s0, const T* dx) {
  return s0 * s0 + 2.0 * a * dx[0];
}

/// CGV travel time, (1/a) acosh(1 + eps) with acosh(1 + eps) evaluated as
/// log1p(eps + sqrt(eps (2 + eps))) to keep accuracy next to the source.
template <typename T>
T cgv_tau(double a, double s0, const T* dx, int dim) {
  using std::log1p;
  using std::sqrt;
  T r2 = dx[0] * dx[0];
  for (int d = 1; d < dim; ++d) r2 = r2 + dx[d] * dx[d];
  if (a == 0.0) return s0 * sqrt(r2);
  const T kappa = 1.0 / (1.0 / s0 + a * dx[0]);
  const T eps = 0.5 * s0 * a * a * kappa * r2;
  return log1p(eps + sqrt(eps * (2.0 + eps))) / a;
}

template <typename T>
T cgv_kappa(double a, double s0, const T* dx) {
  return 1.0 / (1.0 / s0 + a * dx[0]);
}

template <typename T>
T gauss_tau1(const double* sigma, const T* dc, int dim) {
  using std::exp;
  T q = sigma[0] * dc[0] * dc[0];
  for (int d = 1; d < dim; ++d) q = q + sigma[d] * dc[d] * dc[d];
  return 0.5 * exp(-q) + 0.5;
}

}  // namespace formulas

}  // namespace eikfm
