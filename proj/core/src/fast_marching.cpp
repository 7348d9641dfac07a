#include "eikfm/fast_marching.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "eikfm/errors.hpp"
#include "eikfm/front_heap.hpp"

namespace eikfm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline std::size_t at(Index k) { return static_cast<std::size_t>(k); }

QuadraticTerm axis_term(const MarchView& v, Index node, int axis,
                        const AxisStencil& s) {
  const Index step = v.grid->stride(axis) * static_cast<int>(s.direction);
  const Index nb1 = node + step;
  const Index nb2 = node + 2 * step;
  const int order = s.order;
  const double h = v.grid->spacing();
  if (v.cfg.mode == FmMode::kPlain) {
    return plain_term(order, h, v.tau1[at(nb1)],
                      order == 2 ? v.tau1[at(nb2)] : 0.0);
  }
  const double tau0 = v.tau0[at(node)];
  if (s.plain_fallback) {
    return product_term(order, tau0, h, v.product[at(nb1)],
                        order == 2 ? v.product[at(nb2)] : 0.0);
  }
  return factored_term(order, s.direction, tau0, v.grad[axis][at(node)], h,
                       v.tau1[at(nb1)], order == 2 ? v.tau1[at(nb2)] : 0.0);
}

// Non-factored derivative of tau0*tau1 along the chosen side, scaled so its
// sign is the only thing that matters.
double product_slope(const MarchView& v, Index node, int axis,
                     const AxisStencil& s, double product_value) {
  const Index step = v.grid->stride(axis) * static_cast<int>(s.direction);
  const double p1 = v.product[at(node + step)];
  if (s.order == 2) {
    const double p2 = v.product[at(node + 2 * step)];
    return 3.0 * product_value - 4.0 * p1 + p2;
  }
  return product_value - p1;
}

}  // namespace

std::array<QuadraticTerm, kMaxDim> assemble_terms(const MarchView& view,
                                                  Index node,
                                                  const StencilRecord& choice) {
  std::array<QuadraticTerm, kMaxDim> terms{};
  for (int d = 0; d < view.grid->dim(); ++d) {
    if (choice.axes[d].direction == Direction::kNone) continue;
    terms[d] = axis_term(view, node, d, choice.axes[d]);
  }
  return terms;
}

LocalUpdate local_update(const MarchView& v, Index node) {
  const RegularGrid& g = *v.grid;
  const int dim = g.dim();
  const bool factored = v.cfg.mode == FmMode::kFactored;
  const MultiIndex idx = g.delinearize(node);

  // Direction and order per axis.
  StencilRecord choice;
  for (int d = 0; d < dim; ++d) {
    const Index s = g.stride(d);
    const bool back = idx[d] > 0 && v.known[at(node - s)];
    const bool fwd = idx[d] + 1 < g.count(d) && v.known[at(node + s)];
    if (!back && !fwd) continue;
    Direction dir = Direction::kBackward;
    if (back && fwd) {
      dir = v.product[at(node - s)] <= v.product[at(node + s)]
                ? Direction::kBackward
                : Direction::kForward;
    } else if (fwd) {
      dir = Direction::kForward;
    }
    AxisStencil& a = choice.axes[d];
    a.direction = dir;
    a.order = 1;
    if (v.cfg.order == 2) {
      const int far = idx[d] + 2 * static_cast<int>(dir);
      if (far >= 0 && far < g.count(d)) {
        const Index nb1 = node + s * static_cast<int>(dir);
        const Index nb2 = node + 2 * s * static_cast<int>(dir);
        if (v.known[at(nb2)]) {
          const double p1 = v.product[at(nb1)];
          const double p2 = v.product[at(nb2)];
          const bool ordered =
              dir == Direction::kBackward ? p1 >= p2 : p1 > p2;
          if (ordered) a.order = 2;
        }
      }
    }
  }

  const double kappa = std::sqrt(v.m[at(node)]);
  const double h = g.spacing();
  const double floor = alpha_floor(factored ? v.tau0[at(node)] : 1.0, h);

  std::array<QuadraticTerm, kMaxDim> terms{};
  std::array<int, kMaxDim> axis_of{};
  LocalUpdate out;

  auto solve = [&]() {
    int count = 0;
    for (int d = 0; d < dim; ++d) {
      if (choice.axes[d].direction == Direction::kNone) continue;
      const QuadraticTerm t = axis_term(v, node, d, choice.axes[d]);
      if (!(t.alpha > floor)) continue;
      terms[count] = t;
      axis_of[count] = d;
      ++count;
    }
    if (count == 0) {
      throw InternalError("local_update: no admissible upwind term at node " +
                          std::to_string(node));
    }
    const PiecewiseSolution sol = solve_piecewise_quadratic(
        std::span<const QuadraticTerm>(terms.data(), static_cast<std::size_t>(count)),
        kappa);
    out.value = sol.value;
    out.record = StencilRecord{};
    for (int j = 0; j < count; ++j) {
      if (sol.retained >> j & 1u) out.record.axes[axis_of[j]] = choice.axes[axis_of[j]];
    }
  };

  solve();

  if (factored && v.cfg.enforce_monotonicity) {
    // Each pass converts at least one axis, so this runs at most dim+1 times.
    for (;;) {
      const double product_value = v.tau0[at(node)] * out.value;
      bool changed = false;
      for (int d = 0; d < dim; ++d) {
        AxisStencil& a = out.record.axes[d];
        if (a.direction == Direction::kNone || a.plain_fallback) continue;
        if (product_slope(v, node, d, a, product_value) < 0.0) {
          choice.axes[d].plain_fallback = true;
          changed = true;
        }
      }
      if (!changed) break;
      solve();
    }
  }
  return out;
}

ScalarField FmSolution::travel_time(const ScalarField& tau0) const {
  if (config.mode == FmMode::kPlain) return tau1;
  if (!(tau0.grid() == tau1.grid())) {
    throw DomainError("travel_time: tau0 lives on a different grid");
  }
  ScalarField tau(tau1.grid());
  for (Index k = 0; k < tau.size(); ++k) tau[k] = tau0[k] * tau1[k];
  return tau;
}

FmSolution fm_solve(const ScalarField& m, const SourceSpec& src,
                    const DistanceFactor& dist, const FmConfig& cfg) {
  const RegularGrid& g = m.grid();
  if (cfg.order != 1 && cfg.order != 2) {
    throw DomainError("fm_solve: order must be 1 or 2");
  }
  if (!g.contains(src.index)) throw DomainError("fm_solve: source is off-grid");
  for (Index k = 0; k < m.size(); ++k) {
    if (!(m[k] > 0.0) || !std::isfinite(m[k])) {
      throw DomainError("fm_solve: non-positive slowness at node " +
                        std::to_string(k));
    }
  }
  const bool factored = cfg.mode == FmMode::kFactored;
  if (factored) {
    if (!(dist.tau0.grid() == g) || dist.source.index != src.index) {
      throw DomainError("fm_solve: distance factor does not match grid/source");
    }
  }

  const Index n = g.size();
  FmSolution sol;
  sol.config = cfg;
  sol.source = src;
  sol.tau1 = ScalarField(g, kInf);
  sol.stencils.assign(at(n), StencilRecord{});
  sol.acceptance_order.reserve(at(n));
  std::vector<double> product(at(n), kInf);
  std::vector<std::uint8_t> known(at(n), 0);

  MarchView view;
  view.grid = &g;
  view.m = m.values();
  if (factored) {
    view.tau0 = dist.tau0.values();
    for (int d = 0; d < g.dim(); ++d) view.grad[d] = dist.grad[d].values();
  }
  view.tau1 = sol.tau1.values();
  view.product = product;
  view.known = known;
  view.cfg = cfg;

  const Index s = g.linearize(src.index);
  sol.tau1[s] = factored ? std::sqrt(m[s]) : 0.0;
  product[at(s)] = 0.0;

  FrontHeap heap(static_cast<std::size_t>(4 * std::sqrt(static_cast<double>(n))) + 16);
  heap.insert(0.0, s);
  const int dim = g.dim();
  while (auto top = heap.extract_min(known)) {
    const Index k = top->node;
    known[at(k)] = 1;
    sol.acceptance_order.push_back(k);
    const MultiIndex idx = g.delinearize(k);
    for (int d = 0; d < dim; ++d) {
      const Index stride = g.stride(d);
      for (int side = -1; side <= 1; side += 2) {
        const int j = idx[d] + side;
        if (j < 0 || j >= g.count(d)) continue;
        const Index nb = k + side * stride;
        if (known[at(nb)]) continue;
        const LocalUpdate upd = local_update(view, nb);
        if (upd.value < sol.tau1[nb]) {
          sol.tau1[nb] = upd.value;
          product[at(nb)] = factored ? dist.tau0[nb] * upd.value : upd.value;
          sol.stencils[at(nb)] = upd.record;
          heap.insert(product[at(nb)], nb);
        }
      }
    }
  }
  sol.heap_peak = heap.peak_size();
  if (static_cast<Index>(sol.acceptance_order.size()) != n) {
    throw InternalError("fm_solve: march did not reach every node");
  }
  return sol;
}

FmSolution fm_solve(const ScalarField& m, const SourceSpec& src,
                    const FmConfig& cfg) {
  if (cfg.mode == FmMode::kPlain) return fm_solve(m, src, DistanceFactor{}, cfg);
  return fm_solve(m, src, build_distance_factor(m.grid(), src), cfg);
}

}  // namespace eikfm
