#include "eikfm/convergence.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "eikfm/errors.hpp"

namespace eikfm {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

void eikonal_residual(const ScalarField& tau, const ScalarField& m,
                      std::span<double> out) {
  const RegularGrid& g = tau.grid();
  const int dim = g.dim();
  const double inv_2h = 0.5 / g.spacing();
  const double inv_h = 1.0 / g.spacing();
  MultiIndex idx{0, 0, 0};
  for (Index k = 0; k < g.size(); ++k) {
    double s = 0.0;
    for (int d = 0; d < dim; ++d) {
      const Index st = g.stride(d);
      double gd;
      if (idx[d] == 0) {
        gd = (tau[k + st] - tau[k]) * inv_h;
      } else if (idx[d] + 1 == g.count(d)) {
        gd = (tau[k] - tau[k - st]) * inv_h;
      } else {
        gd = (tau[k + st] - tau[k - st]) * inv_2h;
      }
      s += gd * gd;
    }
    out[static_cast<std::size_t>(k)] = s - m[k];
    // Odometer increment, last axis fastest.
    for (int d = dim - 1; d >= 0; --d) {
      if (++idx[d] < g.count(d)) break;
      idx[d] = 0;
    }
  }
}

WorkUnit measure_work_unit(const RegularGrid& grid, int repetitions) {
  if (repetitions < 1) throw DomainError("measure_work_unit: repetitions must be >= 1");
  MultiIndex centre{0, 0, 0};
  for (int d = 0; d < grid.dim(); ++d) centre[d] = grid.count(d) / 2;
  const DistanceFactor dist = build_distance_factor(grid, {centre});
  const ScalarField m(grid, 1.0);
  std::vector<double> out(static_cast<std::size_t>(grid.size()));

  eikonal_residual(dist.tau0, m, out);
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(repetitions));
  for (int r = 0; r < repetitions; ++r) {
    const auto t0 = Clock::now();
    eikonal_residual(dist.tau0, m, out);
    times.push_back(elapsed(t0));
  }
  std::sort(times.begin(), times.end());
  const std::size_t mid = times.size() / 2;
  double median = times[mid];
  if (times.size() % 2 == 0) median = 0.5 * (times[mid - 1] + times[mid]);
  // Guard against a clock too coarse to resolve tiny grids.
  median = std::max(median, 1e-9);
  return {median, repetitions};
}

std::string ConvergenceRow::dims_label() const {
  std::string s;
  for (int d = 0; d < dim; ++d) {
    if (d) s += 'x';
    s += std::to_string(counts[d]);
  }
  return s;
}

std::optional<double> ConvergenceReport::slope(int order, bool use_linf) const {
  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    if (r.order != order) continue;
    xs.push_back(std::log2(r.h));
    ys.push_back(std::log2(use_linf ? r.linf : r.mean_l2));
  }
  if (xs.size() < 2) return std::nullopt;
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

ConvergenceReport run_convergence(const AnalyticCase& c, std::span<const double> hs,
                                  std::span<const int> orders,
                                  const ConvergenceOptions& opts) {
  std::vector<double> sorted_h(hs.begin(), hs.end());
  std::sort(sorted_h.begin(), sorted_h.end(), std::greater<>());
  std::vector<int> sorted_orders(orders.begin(), orders.end());
  std::sort(sorted_orders.begin(), sorted_orders.end());

  ConvergenceReport report;
  for (double h : sorted_h) {
    if (!(h > 0.0)) throw DomainError("run_convergence: h must be positive");
    const RegularGrid grid = case_grid(c, h);
    const AnalyticFields exact = eval_case(c, grid);
    const double unit =
        opts.measure_work ? measure_work_unit(grid).seconds : 0.0;
    for (int order : sorted_orders) {
      FmConfig cfg;
      cfg.order = order;
      cfg.mode = opts.mode;
      cfg.enforce_monotonicity = opts.enforce_monotonicity;

      ConvergenceRow row;
      row.h = h;
      row.dim = grid.dim();
      row.counts = grid.counts();
      row.order = order;

      ScalarField tau;
      if (opts.mode == FmMode::kFactored) {
        const DistanceFactor dist = build_distance_factor(grid, exact.source);
        const auto t0 = Clock::now();
        const FmSolution sol = fm_solve(exact.m, exact.source, dist, cfg);
        row.seconds = elapsed(t0);
        tau = sol.travel_time(dist.tau0);
      } else {
        const auto t0 = Clock::now();
        const FmSolution sol = fm_solve(exact.m, exact.source, cfg);
        row.seconds = elapsed(t0);
        tau = sol.tau1;
      }
      row.linf = linf_error(tau, exact.tau);
      row.mean_l2 = mean_l2_error(tau, exact.tau);
      row.work_units = unit > 0.0 ? row.seconds / unit : 0.0;
      report.rows.push_back(row);
    }
  }
  return report;
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& report) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  os << "h,n,order,linf,mean_l2,seconds,work_units\n";
  for (const auto& r : report.rows) {
    os << r.h << ',' << r.dims_label() << ',' << r.order << ',' << r.linf << ','
       << r.mean_l2 << ',' << r.seconds << ',' << r.work_units << '\n';
  }
  os.precision(old);
}

ConvergenceReport read_convergence_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "h,n,order,linf,mean_l2,seconds,work_units") {
    throw DomainError("convergence CSV: unexpected header");
  }
  ConvergenceReport report;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::vector<std::string> cells;
    for (std::string c; std::getline(row, c, ',');) cells.push_back(c);
    if (cells.size() != 7) throw DomainError("convergence CSV: expected 7 columns");
    ConvergenceRow r;
    r.h = std::stod(cells[0]);
    std::istringstream dims(cells[1]);
    r.dim = 0;
    for (std::string n; std::getline(dims, n, 'x');) {
      if (r.dim == kMaxDim) throw DomainError("convergence CSV: too many dims");
      r.counts[r.dim++] = std::stoi(n);
    }
    r.order = std::stoi(cells[2]);
    r.linf = std::stod(cells[3]);
    r.mean_l2 = std::stod(cells[4]);
    r.seconds = std::stod(cells[5]);
    r.work_units = std::stod(cells[6]);
    report.rows.push_back(r);
  }
  return report;
}

}  // namespace eikfm
