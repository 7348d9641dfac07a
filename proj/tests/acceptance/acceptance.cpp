// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eikfm/analytic.hpp"
#include "eikfm/convergence.hpp"
#include "eikfm/fast_marching.hpp"
#include "eikfm/sensitivity.hpp"
#include "eikfm/tomography.hpp"
#include "support/media.hpp"
#include "support/sweeping_oracle.hpp"

using namespace eikfm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool within_factor(double got, double ref, double factor) {
  return got <= ref * factor && got >= ref / factor;
}

FmConfig config(int order, FmMode mode = FmMode::kFactored, bool enforce = false) {
  FmConfig c;
  c.order = order;
  c.mode = mode;
  c.enforce_monotonicity = enforce;
  return c;
}

// 1. Factored FM is exact for constant slowness.
Outcome homogeneous() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  const RegularGrid grids[] = {RegularGrid::make2d(101, 101, 0.01),
                               RegularGrid::make3d(33, 33, 33, 1.0 / 32.0)};
  for (const RegularGrid& g : grids) {
    const ScalarField m(g, 1.0);
    MultiIndex centre{0, 0, 0};
    for (int d = 0; d < g.dim(); ++d) centre[d] = g.count(d) / 2;
    for (const MultiIndex& src : {centre, MultiIndex{0, 0, 0}}) {
      for (int order : {1, 2}) {
        const FmSolution sol = fm_solve(m, SourceSpec{src}, config(order));
        for (Index k = 0; k < g.size(); ++k) worst = std::max(worst, std::abs(sol.tau1[k] - 1.0));
      }
    }
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-10 && t < 2.0,
          "max|tau1-1| = " + fmt("%.2e", worst) + " (tol 1e-10), " + fmt("%.2f", t) +
              " s (limit 2 s)"};
}

// Runs a convergence table and checks mean-l2 per (h, order) within x2.
struct TableCheck {
  CaseKind kind;
  int dim;
  std::vector<double> hs;
  std::vector<double> first;
  std::vector<double> second;
};

Outcome table(const TableCheck& c, double time_limit, bool with_slopes) {
  const auto t0 = Clock::now();
  std::vector<int> orders;
  if (!c.first.empty()) orders.push_back(1);
  if (!c.second.empty()) orders.push_back(2);
  ConvergenceOptions opts;
  opts.measure_work = false;
  const ConvergenceReport r = run_convergence(default_params(c.kind, c.dim), c.hs, orders, opts);
  const double t = seconds_since(t0);
  Outcome out;
  std::string values;
  for (const auto& row : r.rows) {
    const auto& ref = row.order == 1 ? c.first : c.second;
    const auto it = std::find(c.hs.begin(), c.hs.end(), row.h);
    const double expected = ref[static_cast<std::size_t>(it - c.hs.begin())];
    const bool ok = within_factor(row.mean_l2, expected, 2.0);
    out.pass = out.pass && ok;
    values += " o" + std::to_string(row.order) + "/" + row.dims_label() + "=" +
              fmt("%.3e", row.mean_l2) + "(ref " + fmt("%.2e", expected) + ")";
  }
  if (with_slopes) {
    const double s1 = r.slope(1).value_or(0.0);
    const double s2 = r.slope(2).value_or(0.0);
    out.pass = out.pass && s1 >= 0.85 && s1 <= 1.15 && s2 >= 1.8 && s2 <= 2.2;
    values += "; slopes o1=" + fmt("%.3f", s1) + " [0.85,1.15] o2=" + fmt("%.3f", s2) +
              " [1.8,2.2]";
  }
  if (time_limit > 0.0) {
    out.pass = out.pass && t < time_limit;
    values += "; " + fmt("%.2f", t) + " s (limit " + fmt("%.0f", time_limit) + " s)";
  }
  out.detail = "mean_l2 within x2:" + values;
  return out;
}

// 5. Plain first-order FM equals the converged Gauss-Seidel sweeping solution.
Outcome sweeping() {
  std::mt19937_64 rng(5);
  double worst = 0.0;
  for (int trial = 0; trial < 60; ++trial) {
    const bool three = trial >= 50;
    std::uniform_int_distribution<int> n(3, three ? 9 : 17);
    std::uniform_real_distribution<double> h(0.05, 1.0);
    const RegularGrid g = three ? RegularGrid::make3d(n(rng), n(rng), n(rng), h(rng))
                                : RegularGrid::make2d(n(rng), n(rng), h(rng));
    const ScalarField m = testing::smooth_medium(g, rng(), 0.5);
    const SourceSpec src = testing::random_source(g, rng());
    const ScalarField oracle = testing::sweep_solve(m, src);
    const FmSolution sol = fm_solve(m, src, config(1, FmMode::kPlain));
    for (Index k = 0; k < g.size(); ++k) worst = std::max(worst, std::abs(sol.tau1[k] - oracle[k]));
  }
  return {worst <= 1e-12,
          "50 2D + 10 3D random grids, max|FM - sweeping| = " + fmt("%.2e", worst) +
              " (tol 1e-12)"};
}

// 6. Accepted travel times never decrease.
Outcome monotonicity() {
  bool plain_ok = true, factored_ok = true;
  for (CaseKind kind : {CaseKind::kCgss, CaseKind::kCgv, CaseKind::kGauss}) {
    const AnalyticCase c = default_params(kind, 2);
    const RegularGrid g = case_grid(c, 1.0 / 80.0);
    const AnalyticFields f = eval_case(c, g);
    const FmSolution plain = fm_solve(f.m, f.source, config(1, FmMode::kPlain));
    for (std::size_t i = 1; i < plain.acceptance_order.size(); ++i) {
      plain_ok = plain_ok &&
                 plain.tau1[plain.acceptance_order[i - 1]] <= plain.tau1[plain.acceptance_order[i]];
    }
    const DistanceFactor dist = build_distance_factor(g, f.source);
    for (int order : {1, 2}) {
      const FmSolution sol = fm_solve(f.m, f.source, dist, config(order, FmMode::kFactored, true));
      const ScalarField tau = sol.travel_time(dist.tau0);
      for (std::size_t i = 1; i < sol.acceptance_order.size(); ++i) {
        factored_ok = factored_ok &&
                      tau[sol.acceptance_order[i - 1]] <= tau[sol.acceptance_order[i]];
      }
    }
  }
  return {plain_ok && factored_ok,
          std::string("(a) plain o1 ") + (plain_ok ? "monotone" : "NOT monotone") +
              "; (b) factored o1/o2 with enforcement " +
              (factored_ok ? "monotone" : "NOT monotone") + " on cgss/cgv/gauss 2D h=1/80"};
}

// 7. Sensitivity: adjoint, dense oracle, directional finite differences.
Outcome sensitivity() {
  double dot_err = 0.0, dense_err = 0.0, fd_err = 0.0;
  int stable = 0, trials = 0;
  for (int order : {1, 2}) {
    {
      const RegularGrid g = RegularGrid::make2d(17, 17, 1.0 / 16.0);
      const ScalarField m = testing::smooth_medium(g, 3);
      const SourceSpec src{{5, 11, 0}};
      const DistanceFactor dist = build_distance_factor(g, src);
      const auto op = SensitivityOperator::assemble(fm_solve(m, src, dist, config(order)), dist);
      const ScalarField v = testing::random_field(g, 1), w = testing::random_field(g, 2);
      const double a = testing::dot(op.apply_jacobian(v), w);
      const double b = testing::dot(v, op.apply_jacobian_transpose(w));
      dot_err = std::max(dot_err, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
    }
    {
      const RegularGrid g = RegularGrid::make2d(9, 9, 0.125);
      const ScalarField m = testing::smooth_medium(g, 4);
      const SourceSpec src{{2, 6, 0}};
      const DistanceFactor dist = build_distance_factor(g, src);
      const auto op = SensitivityOperator::assemble(fm_solve(m, src, dist, config(order)), dist);
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.size(), g.size());
      for (const auto& e : op.entries()) a(e.row, e.col) += e.value;
      const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
      const ScalarField v = testing::random_field(g, 3);
      const Eigen::Map<const Eigen::VectorXd> vv(v.values().data(), v.size());
      const Eigen::VectorXd ref = lu.solve(vv), ref_t = lu.transpose().solve(vv);
      const ScalarField got = op.apply_jacobian(v), got_t = op.apply_jacobian_transpose(v);
      for (Index k = 0; k < g.size(); ++k) {
        dense_err = std::max(dense_err, std::abs(got[k] - ref(k)) / ref.lpNorm<Eigen::Infinity>());
        dense_err = std::max(dense_err, std::abs(got_t[k] - ref_t(k)) / ref_t.lpNorm<Eigen::Infinity>());
      }
    }
  }
  const RegularGrid g = RegularGrid::make2d(17, 17, 1.0 / 16.0);
  const double eps = 1e-6;
  for (std::uint64_t seed = 1; seed <= 20; ++seed, ++trials) {
    const int order = seed % 2 ? 1 : 2;
    const ScalarField m = testing::smooth_medium(g, seed);
    const SourceSpec src = testing::random_source(g, seed + 1000);
    const DistanceFactor dist = build_distance_factor(g, src);
    const FmSolution sol = fm_solve(m, src, dist, config(order));
    const auto op = SensitivityOperator::assemble(sol, dist);
    ScalarField delta = testing::smooth_medium(g, seed + 500);
    for (Index k = 0; k < g.size(); ++k) delta[k] -= 1.0;
    ScalarField up = m, dn = m;
    for (Index k = 0; k < g.size(); ++k) {
      up[k] += eps * delta[k];
      dn[k] -= eps * delta[k];
    }
    const FmSolution su = fm_solve(up, src, dist, config(order));
    const FmSolution sd = fm_solve(dn, src, dist, config(order));
    if (!(su.stencils == sol.stencils && sd.stencils == sol.stencils)) continue;
    ++stable;
    const ScalarField lin = op.apply_jacobian(delta);
    double num = 0.0, den = 0.0;
    for (Index k = 0; k < g.size(); ++k) {
      const double fd = (su.tau1[k] - sd.tau1[k]) / (2.0 * eps);
      num += (fd - lin[k]) * (fd - lin[k]);
      den += lin[k] * lin[k];
    }
    fd_err = std::max(fd_err, std::sqrt(num / den));
  }
  const bool pass = dot_err <= 1e-12 && dense_err <= 1e-12 && fd_err <= 1e-3 &&
                    stable * 10 >= trials * 9;
  return {pass, "dot-test " + fmt("%.2e", dot_err) + " (tol 1e-12), dense oracle " +
                    fmt("%.2e", dense_err) + " (tol 1e-12), FD " + fmt("%.2e", fd_err) +
                    " (tol 1e-3) on " + std::to_string(stable) + "/" + std::to_string(trials) +
                    " stable trials (need >= 90%)"};
}

// 8. Desk-scale tomography reaches the noise floor with a monotone objective.
Outcome desk_tomography() {
  const auto t0 = Clock::now();
  const DeskScenario desk = desk_scenario(64, 32);
  const SyntheticSurvey syn = synthesize_survey(desk.m_true, desk.geometry, 0.01, 7);
  double floor = 0.0;
  for (double e : syn.noise.values) floor += 0.5 * e * e;
  InversionConfig cfg;
  cfg.alpha = 0.5;
  cfg.n_gn = 10;
  cfg.n_cg = 8;
  cfg.bound = desk.bound;
  cfg.m_ref = desk.m_ref;
  const InversionResult res = gauss_newton(syn.survey, cfg, desk.bound.inverse(desk.m_ref));
  const double t = seconds_since(t0);
  bool monotone = true;
  for (std::size_t i = 1; i < res.history.size(); ++i) {
    monotone = monotone && res.history[i].objective <= res.history[i - 1].objective;
  }
  const double ratio = res.history.back().misfit / floor;
  const bool shape = syn.survey.sources.size() == 13 && syn.survey.receivers.size() == 64;
  return {monotone && ratio <= 2.0 && t < 120.0 && shape,
          std::string("64x32, 13 src, 64 rec, 1% noise, alpha 0.5, 10 GN x 8 CG: objective ") +
              (monotone ? "monotone" : "NOT monotone") + ", misfit/floor = " +
              fmt("%.3f", ratio) + " (limit 2), " + std::to_string(res.history.size() - 1) +
              " steps, " + fmt("%.1f", t) + " s (limit 120 s)"};
}

// 9. Large 2D solve: wall time, work units and second/first order cost ratio.
Outcome performance() {
  const AnalyticCase c = default_params(CaseKind::kCgss, 2);
  const RegularGrid g = case_grid(c, 1.0 / 320.0);
  const AnalyticFields f = eval_case(c, g);
  const DistanceFactor dist = build_distance_factor(g, f.source);
  const double unit = measure_work_unit(g).seconds;
  double best[3] = {0.0, 1e300, 1e300};
  for (int rep = 0; rep < 2; ++rep) {
    for (int order : {1, 2}) {
      const auto t0 = Clock::now();
      const FmSolution sol = fm_solve(f.m, f.source, dist, config(order));
      best[order] = std::min(best[order], seconds_since(t0));
    }
  }
  const double ratio = best[2] / best[1];
  const bool size_ok = g.count(0) == 1281 && g.count(1) == 2561;
  return {size_ok && best[1] <= 60.0 && best[2] <= 60.0 && ratio <= 1.3,
          "1281x2561: o1 " + fmt("%.2f", best[1]) + " s (" + fmt("%.0f", best[1] / unit) +
              " WU), o2 " + fmt("%.2f", best[2]) + " s (" + fmt("%.0f", best[2] / unit) +
              " WU), limit 60 s; o2/o1 = " + fmt("%.3f", ratio) + " (limit 1.3)"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "homogeneous exactness", homogeneous},
      {2, "CGSS 2D convergence table",
       [] {
         return table({CaseKind::kCgss, 2, {1.0 / 40, 1.0 / 80, 1.0 / 160},
                       {9.42e-4, 4.69e-4, 2.34e-4}, {9.26e-6, 2.21e-6, 5.32e-7}},
                      15.0, true);
       }},
      {3, "CGV/GAUSS 2D spot checks",
       [] {
         Outcome a = table({CaseKind::kCgv, 2, {1.0 / 80}, {}, {7.38e-5}}, 0.0, false);
         Outcome b = table({CaseKind::kGauss, 2, {1.0 / 80}, {}, {1.56e-5}}, 0.0, false);
         return Outcome{a.pass && b.pass, "cgv " + a.detail + "; gauss " + b.detail};
       }},
      {4, "CGSS 3D spot check",
       [] {
         return table({CaseKind::kCgss, 3, {1.0 / 20, 1.0 / 40}, {1.46e-3, 7.05e-4},
                       {1.49e-4, 3.52e-5}},
                      10.0, false);
       }},
      {5, "sweeping-oracle equivalence", sweeping},
      {6, "monotonicity", monotonicity},
      {7, "sensitivity correctness", sensitivity},
      {8, "desk-scale tomography", desk_tomography},
      {9, "performance sanity", performance},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
