#include "eikfm/sensitivity.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

#include "eikfm/errors.hpp"

namespace eikfm {

namespace {

inline std::size_t at(Index k) { return static_cast<std::size_t>(k); }

}  // namespace

SensitivityOperator SensitivityOperator::assemble(const FmSolution& sol,
                                                  const DistanceFactor& dist) {
  if (sol.config.mode != FmMode::kFactored) {
    throw DomainError("SensitivityOperator: requires a factored solve");
  }
  const RegularGrid& g = sol.tau1.grid();
  if (!(dist.tau0.grid() == g) || dist.source.index != sol.source.index) {
    throw DomainError("SensitivityOperator: distance factor does not match");
  }
  const Index n = g.size();
  const int dim = g.dim();
  const double h = g.spacing();

  SensitivityOperator op;
  op.grid_ = g;
  op.order_ = sol.acceptance_order;
  op.diag_.assign(at(n), 0.0);
  op.off_ptr_.assign(at(n) + 1, 0);
  op.deriv_ptr_.assign(at(n) + 1, 0);
  op.off_cols_.reserve(at(n) * static_cast<std::size_t>(2 * dim));
  op.off_vals_.reserve(at(n) * static_cast<std::size_t>(2 * dim));
  op.deriv_rows_.reserve(at(n) * static_cast<std::size_t>(dim));

  std::vector<Index> position(at(n), -1);
  for (std::size_t p = 0; p < op.order_.size(); ++p) {
    position[at(op.order_[p])] = static_cast<Index>(p);
  }
  const Index src = g.linearize(sol.source.index);
  const auto& tau1 = sol.tau1;
  const auto& tau0 = dist.tau0;

  // Scratch for merging the contributions of up to three axes into one row.
  std::array<Index, 3 * kMaxDim> cols{};
  std::array<double, 3 * kMaxDim> vals{};

  for (Index k = 0; k < n; ++k) {
    op.deriv_ptr_[at(k)] = static_cast<Index>(op.deriv_rows_.size());
    int nnz = 0;
    double diag = 0.0;

    auto add_row = [&](const DerivativeRow& row) {
      double t = 0.0;
      for (int j = 0; j < row.count; ++j) t += row.coef[j] * tau1[row.cols[j]];
      for (int j = 0; j < row.count; ++j) {
        const double a = 2.0 * t * row.coef[j];
        if (row.cols[j] == k) {
          diag += a;
          continue;
        }
        int slot = 0;
        while (slot < nnz && cols[slot] != row.cols[j]) ++slot;
        if (slot == nnz) {
          cols[slot] = row.cols[j];
          vals[slot] = 0.0;
          ++nnz;
        }
        vals[slot] += a;
      }
      op.deriv_rows_.push_back(row);
    };

    if (k == src) {
      // One diagonal entry per axis carrying the distance gradient.
      for (int d = 0; d < dim; ++d) {
        const double p = dist.grad[d][k];
        if (p == 0.0) continue;
        DerivativeRow row;
        row.cols[0] = k;
        row.coef[0] = p;
        row.count = 1;
        add_row(row);
      }
    } else {
      const StencilRecord& rec = sol.stencils[at(k)];
      for (int d = 0; d < dim; ++d) {
        const AxisStencil& a = rec.axes[d];
        if (a.direction == Direction::kNone) continue;
        const Index step = g.stride(d) * static_cast<int>(a.direction);
        const Index nb1 = k + step;
        const Index nb2 = k + 2 * step;
        const double p =
            a.direction == Direction::kForward ? -dist.grad[d][k] : dist.grad[d][k];
        const double t0 = tau0[k];
        DerivativeRow row;
        if (a.order == 2) {
          row.count = 3;
          row.cols = {k, nb1, nb2};
          if (a.plain_fallback) {
            row.coef = {1.5 * t0 / h, -2.0 * tau0[nb1] / h, 0.5 * tau0[nb2] / h};
          } else {
            row.coef = {1.5 * t0 / h + p, -2.0 * t0 / h, 0.5 * t0 / h};
          }
        } else {
          row.count = 2;
          row.cols[0] = k;
          row.cols[1] = nb1;
          if (a.plain_fallback) {
            row.coef[0] = t0 / h;
            row.coef[1] = -tau0[nb1] / h;
          } else {
            row.coef[0] = t0 / h + p;
            row.coef[1] = -t0 / h;
          }
        }
        for (int j = 1; j < row.count; ++j) {
          if (position[at(row.cols[j])] >= position[at(k)]) {
            throw InternalError("SensitivityOperator: stencil of node " +
                                std::to_string(k) +
                                " references a node accepted later");
          }
        }
        add_row(row);
      }
    }

    if (!(diag > 0.0)) {
      throw InternalError("SensitivityOperator: non-positive diagonal at node " +
                          std::to_string(k));
    }
    op.diag_[at(k)] = diag;
    for (int j = 0; j < nnz; ++j) {
      op.off_cols_.push_back(cols[j]);
      op.off_vals_.push_back(vals[j]);
    }
    op.off_ptr_[at(k) + 1] = static_cast<Index>(op.off_cols_.size());
  }
  op.deriv_ptr_[at(n)] = static_cast<Index>(op.deriv_rows_.size());
  return op;
}

void SensitivityOperator::check_grid(const ScalarField& v, const char* what) const {
  if (!(v.grid() == grid_)) {
    throw DomainError(std::string(what) + ": field lives on a different grid");
  }
}

ScalarField SensitivityOperator::apply_jacobian(const ScalarField& v) const {
  check_grid(v, "apply_jacobian");
  ScalarField e(grid_);
  for (const Index k : order_) {
    double acc = v[k];
    for (Index p = off_ptr_[at(k)]; p < off_ptr_[at(k) + 1]; ++p) {
      acc -= off_vals_[at(p)] * e[off_cols_[at(p)]];
    }
    e[k] = acc / diag_[at(k)];
  }
  return e;
}

ScalarField SensitivityOperator::apply_jacobian_transpose(const ScalarField& v) const {
  check_grid(v, "apply_jacobian_transpose");
  // Column sweep in reverse acceptance order: once y_k is final its
  // contribution is pushed to the (earlier) nodes of row k.
  ScalarField y(v);
  for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
    const Index k = *it;
    const double yk = y[k] / diag_[at(k)];
    y[k] = yk;
    for (Index p = off_ptr_[at(k)]; p < off_ptr_[at(k) + 1]; ++p) {
      y[off_cols_[at(p)]] -= off_vals_[at(p)] * yk;
    }
  }
  return y;
}

ScalarField SensitivityOperator::multiply(const ScalarField& x) const {
  check_grid(x, "multiply");
  ScalarField out(grid_);
  for (Index k = 0; k < grid_.size(); ++k) {
    double acc = diag_[at(k)] * x[k];
    for (Index p = off_ptr_[at(k)]; p < off_ptr_[at(k) + 1]; ++p) {
      acc += off_vals_[at(p)] * x[off_cols_[at(p)]];
    }
    out[k] = acc;
  }
  return out;
}

ScalarField SensitivityOperator::squared_gradient(const ScalarField& x) const {
  check_grid(x, "squared_gradient");
  ScalarField out(grid_);
  for (Index k = 0; k < grid_.size(); ++k) {
    double acc = 0.0;
    for (Index r = deriv_ptr_[at(k)]; r < deriv_ptr_[at(k) + 1]; ++r) {
      const DerivativeRow& row = deriv_rows_[at(r)];
      double t = 0.0;
      for (int j = 0; j < row.count; ++j) t += row.coef[j] * x[row.cols[j]];
      acc += t * t;
    }
    out[k] = acc;
  }
  return out;
}

std::vector<SensitivityOperator::Entry> SensitivityOperator::entries() const {
  std::vector<Entry> out;
  out.reserve(nonzeros());
  for (Index k = 0; k < grid_.size(); ++k) {
    out.push_back({k, k, diag_[at(k)]});
    for (Index p = off_ptr_[at(k)]; p < off_ptr_[at(k) + 1]; ++p) {
      out.push_back({k, off_cols_[at(p)], off_vals_[at(p)]});
    }
  }
  return out;
}

void SensitivityOperator::write_coordinate(std::ostream& os) const {
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const Entry& e : entries()) os << e.row << ' ' << e.col << ' ' << e.value << '\n';
}

}  // namespace eikfm
