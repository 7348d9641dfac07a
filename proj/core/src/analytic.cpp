#include "eikfm/analytic.hpp"

#include <cmath>
#include <string>

#include "eikfm/errors.hpp"

namespace eikfm {

std::string_view to_string(CaseKind kind) {
  switch (kind) {
    case CaseKind::kConstant: return "const";
    case CaseKind::kCgss: return "cgss";
    case CaseKind::kCgv: return "cgv";
    case CaseKind::kGauss: return "gauss";
  }
  return "unknown";
}

CaseKind parse_case_kind(std::string_view name) {
  if (name == "const") return CaseKind::kConstant;
  if (name == "cgss") return CaseKind::kCgss;
  if (name == "cgv") return CaseKind::kCgv;
  if (name == "gauss") return CaseKind::kGauss;
  throw DomainError("unknown analytic case '" + std::string(name) + "'");
}

AnalyticCase default_params(CaseKind kind, int dim) {
  if (dim != 2 && dim != 3) throw DomainError("default_params: dim must be 2 or 3");
  AnalyticCase c;
  c.kind = kind;
  c.dim = dim;
  if (dim == 2) {
    c.extent = {4.0, 8.0, 0.0};
  } else {
    c.extent = {0.8, 1.6, 1.6};
  }
  const Point edge_source =
      dim == 2 ? Point{0.0, 4.0, 0.0} : Point{0.0, 0.8, 0.8};
  switch (kind) {
    case CaseKind::kConstant:
      c.s0 = 1.0;
      c.source = edge_source;
      break;
    case CaseKind::kCgss:
      c.a = dim == 2 ? -0.4 : -1.65;
      c.s0 = 2.0;
      c.source = edge_source;
      break;
    case CaseKind::kCgv:
      c.a = 1.0;
      c.s0 = 2.0;
      c.source = edge_source;
      break;
    case CaseKind::kGauss:
      if (dim == 2) {
        c.sigma = {0.1, 0.4, 0.0};
        c.center = {4.0 / 3.0, 2.0, 0.0};
        c.source = {1.0, 2.0, 0.0};
      } else {
        c.sigma = {0.2, 0.4, 0.1};
        c.center = {0.4, 1.6 / 3.0, 0.4};
        c.source = {0.2, 0.4, 0.4};
      }
      break;
  }
  return c;
}

RegularGrid case_grid(const AnalyticCase& c, double h) {
  return RegularGrid::from_extent(
      std::span<const double>(c.extent.data(), static_cast<std::size_t>(c.dim)),
      h);
}

Point snap_gaussian_center(const AnalyticCase& c, const RegularGrid& grid) {
  Point x1{0.0, 0.0, 0.0};
  const double h = grid.spacing();
  for (int d = 0; d < grid.dim(); ++d) {
    const double t = (c.center[d] - grid.origin(d)) / h;
    // 1e-9 guards centres that sit on a node up to rounding.
    x1[d] = grid.origin(d) + h * std::floor(t + 1e-9);
  }
  return x1;
}

AnalyticFields eval_case(const AnalyticCase& c, const RegularGrid& grid) {
  if (grid.dim() != c.dim) throw DomainError("eval_case: dimension mismatch");
  AnalyticFields out;
  out.source = source_at(grid, c.source);
  out.m = ScalarField(grid);
  out.tau = ScalarField(grid);
  out.tau1 = ScalarField(grid);

  const int dim = grid.dim();
  const double h = grid.spacing();
  const Index src = grid.linearize(out.source.index);
  const Point x1 = snap_gaussian_center(c, grid);
  out.gaussian_center = x1;

  if (c.kind == CaseKind::kGauss) {
    for (int d = 0; d < dim; ++d) {
      if (!(c.sigma[d] > 0.0)) throw DomainError("gauss: sigma must be positive");
    }
  }

  for (Index k = 0; k < grid.size(); ++k) {
    const MultiIndex idx = grid.delinearize(k);
    const Point x = grid.coordinate(idx);
    std::array<double, kMaxDim> dx{0.0, 0.0, 0.0};
    double r2 = 0.0;
    for (int d = 0; d < dim; ++d) {
      dx[d] = h * static_cast<double>(idx[d] - out.source.index[d]);
      r2 += dx[d] * dx[d];
    }
    const double r = std::sqrt(r2);

    double m = 0.0;
    double tau = 0.0;
    double tau1 = 0.0;
    switch (c.kind) {
      case CaseKind::kConstant:
        m = c.s0 * c.s0;
        tau = c.s0 * r;
        tau1 = c.s0;
        break;
      case CaseKind::kCgss: {
        m = formulas::cgss_kappa2(c.a, c.s0, dx.data());
        const double sbar2 = c.s0 * c.s0 + c.a * dx[0];
        if (!(m > 0.0) || sbar2 * sbar2 - c.a * c.a * r2 < 0.0) {
          throw DomainError("cgss: non-positive slowness on the grid");
        }
        tau = formulas::cgss_tau(c.a, c.s0, dx.data(), dim);
        tau1 = k == src ? std::sqrt(m) : tau / r;
        break;
      }
      case CaseKind::kCgv: {
        const double inv = 1.0 / c.s0 + c.a * dx[0];
        if (!(inv > 0.0)) throw DomainError("cgv: non-positive slowness on the grid");
        const double kappa = 1.0 / inv;
        m = kappa * kappa;
        tau = formulas::cgv_tau(c.a, c.s0, dx.data(), dim);
        tau1 = k == src ? kappa : tau / r;
        break;
      }
      case CaseKind::kGauss: {
        std::array<double, kMaxDim> dc{0.0, 0.0, 0.0};
        double q = 0.0;
        for (int d = 0; d < dim; ++d) {
          dc[d] = x[d] - x1[d];
          q += c.sigma[d] * dc[d] * dc[d];
        }
        const double e = std::exp(-q);
        tau1 = 0.5 * e + 0.5;
        tau = r * tau1;
        if (k == src) {
          m = tau1 * tau1;
        } else {
          for (int d = 0; d < dim; ++d) {
            const double dtau1 = -2.0 * c.sigma[d] * dc[d] * 0.5 * e;
            const double g = r * dtau1 + tau1 * dx[d] / r;
            m += g * g;
          }
        }
        if (!(m > 0.0)) throw DomainError("gauss: non-positive slowness on the grid");
        break;
      }
    }
    out.m[k] = m;
    out.tau[k] = tau;
    out.tau1[k] = tau1;
  }
  return out;
}

}  // namespace eikfm
