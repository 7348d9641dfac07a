#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

#include "eikfm/fast_marching.hpp"
#include "eikfm/grid.hpp"

namespace eikfm {

/// Linearisation of a factored Fast Marching solve with respect to the
/// squared slowness m.
///
/// Writing the discrete equations as f(m, tau1) = sum_axes (Dhat tau1)^2 - m,
/// where Dhat holds exactly the stencils the march used, the Jacobian is
/// J = A^{-1} with A = sum_axes diag(2 Dhat tau1) Dhat. Every off-diagonal
/// entry in the row of a node references a node accepted earlier, so A is
/// lower triangular in acceptance order and J (and J^T) are applied by one
/// substitution sweep.
class SensitivityOperator {
 public:
  struct Entry {
    Index row;
    Index col;
    double value;
  };

  /// Builds A from a factored solve. Throws DomainError for plain-mode
  /// solutions and InternalError if a stencil references a node that was not
  /// accepted before the row's node.
  static SensitivityOperator assemble(const FmSolution& sol,
                                      const DistanceFactor& dist);

  const RegularGrid& grid() const { return grid_; }
  std::span<const Index> acceptance_order() const { return order_; }
  std::span<const double> diagonal() const { return diag_; }
  std::size_t nonzeros() const { return diag_.size() + off_cols_.size(); }

  /// e = J v, i.e. solves A e = v by forward substitution.
  ScalarField apply_jacobian(const ScalarField& v) const;
  /// y = J^T v, i.e. solves A^T y = v by backward substitution.
  ScalarField apply_jacobian_transpose(const ScalarField& v) const;
  /// A x.
  ScalarField multiply(const ScalarField& x) const;
  /// sum_axes (Dhat x)^2 per node; equals m when x is the solved tau1.
  ScalarField squared_gradient(const ScalarField& x) const;

  /// All entries of A, diagonal included, row-major.
  std::vector<Entry> entries() const;
  /// Coordinate text dump: one "row col value" line per entry.
  void write_coordinate(std::ostream& os) const;

 private:
  struct DerivativeRow {
    std::array<Index, 3> cols{};
    std::array<double, 3> coef{};
    int count = 0;
  };

  void check_grid(const ScalarField& v, const char* what) const;

  RegularGrid grid_;
  std::vector<Index> order_;
  std::vector<double> diag_;
  // Off-diagonal part of A in CSR form.
  std::vector<Index> off_ptr_;
  std::vector<Index> off_cols_;
  std::vector<double> off_vals_;
  // Rows of the chosen derivative operators, grouped per node.
  std::vector<Index> deriv_ptr_;
  std::vector<DerivativeRow> deriv_rows_;
};

}  // namespace eikfm
