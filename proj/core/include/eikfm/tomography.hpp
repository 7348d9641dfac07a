#pragma once

#include <cstdint>
#include <vector>

#include "eikfm/fast_marching.hpp"
#include "eikfm/grid.hpp"
#include "eikfm/sensitivity.hpp"

namespace eikfm {

/// Dense n_src x n_rec matrix of travel times, row-major.
struct DataMatrix {
  std::size_t sources = 0;
  std::size_t receivers = 0;
  std::vector<double> values;

  DataMatrix() = default;
  DataMatrix(std::size_t ns, std::size_t nr, double fill = 0.0)
      : sources(ns), receivers(nr), values(ns * nr, fill) {}
  double& operator()(std::size_t s, std::size_t r) { return values[s * receivers + r]; }
  double operator()(std::size_t s, std::size_t r) const { return values[s * receivers + r]; }
};

struct AcquisitionGeometry {
  std::vector<SourceSpec> sources;
  /// Linear node indices, shared by every source.
  std::vector<Index> receivers;
};

/// Sources every `source_every` nodes and receivers every `receiver_every`
/// nodes along the surface, i.e. the nodes whose LAST index is 0 (the last
/// axis is depth).
AcquisitionGeometry surface_geometry(const RegularGrid& grid, int source_every,
                                     int receiver_every = 1);

struct Survey {
  RegularGrid grid;
  std::vector<SourceSpec> sources;
  std::vector<Index> receivers;
  DataMatrix d_obs;

  /// Throws DomainError when indices are off-grid or data are not finite and
  /// non-negative or the matrix shape does not match.
  void validate() const;
};

/// tau0 * tau1 sampled at the receivers, one row per source.
DataMatrix forward_data(const ScalarField& m, const Survey& survey,
                        const FmConfig& cfg = {});

struct SyntheticSurvey {
  Survey survey;
  DataMatrix clean;
  DataMatrix noise;  ///< d_obs - clean
};

/// Clean data from m_true plus white Gaussian noise with standard deviation
/// noise_rel * mean(|clean|), drawn from a seeded mt19937_64.
SyntheticSurvey synthesize_survey(const ScalarField& m_true,
                                  const AcquisitionGeometry& geometry,
                                  double noise_rel, std::uint64_t seed,
                                  const FmConfig& cfg = {});

/// Smooth bijection from R onto (low, high):
///   m = (high - low)/2 * (tanh(2/(high - low) * (m' - (high + low)/2)) + 1) + low
/// The midpoint is fixed and the slope there is 1.
struct BoundMap {
  double low = 0.0;
  double high = 1.0;

  double apply(double mp) const;
  double deriv(double mp) const;
  /// Inverse on (low, high); values outside are clamped just inside.
  double inverse(double m) const;

  ScalarField apply(const ScalarField& mp) const;
  ScalarField deriv(const ScalarField& mp) const;
  ScalarField inverse(const ScalarField& m) const;
};

/// Negative 5-point (2D) / 7-point (3D) Laplacian with Neumann boundaries in
/// grid units (no 1/h^2): (L v)_k = sum over in-grid neighbours (v_k - v_nb).
/// Symmetric positive semi-definite; constants span its null space.
ScalarField apply_neumann_laplacian(const ScalarField& v);

struct RegularizationValue {
  double value = 0.0;    ///< 1/2 (m' - ref)^T L (m' - ref)
  ScalarField gradient;  ///< L (m' - ref)
};

RegularizationValue regularization(const ScalarField& mp,
                                   const ScalarField& mp_ref);

struct InversionConfig {
  double alpha = 0.5;
  int n_gn = 10;
  int n_cg = 8;
  double ls_factor = 0.5;
  int ls_max = 10;
  double armijo = 1e-4;
  BoundMap bound{0.05, 1.0};
  FmConfig fm{};
  /// Reference squared slowness; also the starting model when no other
  /// initial model is given.
  ScalarField m_ref;

  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double misfit = 0.0;          ///< 1/2 sum ||P^T tau - d_obs||^2
  double regularization = 0.0;  ///< R(m'), before the alpha weight
  double objective = 0.0;       ///< misfit + alpha R
  double step = 0.0;            ///< accepted line-search length (0 at start)
  int cg_iterations = 0;
  bool line_search_failed = false;
};

struct InversionResult {
  ScalarField m_final;   ///< squared slowness, bound map applied
  ScalarField mp_final;  ///< optimisation variable m'
  std::vector<IterationRecord> history;
  DataMatrix predicted;
  bool stopped_early = false;
};

/// Misfit, gradient and Gauss-Newton Hessian products for the bounded
/// travel-time tomography problem in the variable m'.
class TomographyProblem {
 public:
  TomographyProblem(Survey survey, InversionConfig cfg);

  struct Evaluation {
    ScalarField mp;
    ScalarField m;
    ScalarField bound_deriv;
    double misfit = 0.0;
    double regularization = 0.0;
    double objective = 0.0;
    DataMatrix predicted;
    ScalarField gradient;  ///< empty unless requested
    std::vector<SensitivityOperator> jacobians;
  };

  const Survey& survey() const { return survey_; }
  const InversionConfig& config() const { return cfg_; }
  const ScalarField& mp_ref() const { return mp_ref_; }

  Evaluation evaluate(const ScalarField& mp, bool with_gradient) const;

  /// Gauss-Newton Hessian product at the evaluation point:
  ///   Jt^T diag(tau0) P P^T diag(tau0) Jt v + alpha L v
  /// with Jt = J diag(bound'(m')), summed over sources in source order.
  ScalarField hessian_apply(const Evaluation& at, const ScalarField& v) const;

  /// Data-misfit part of the gradient only (no regularization), in m'.
  ScalarField data_gradient(const Evaluation& at) const;

 private:
  Survey survey_;
  InversionConfig cfg_;
  ScalarField mp_ref_;
  std::vector<DistanceFactor> distances_;
};

/// Objective value and gradient in m'.
struct ObjectiveValue {
  double value = 0.0;
  ScalarField gradient;
};
ObjectiveValue objective(const ScalarField& mp, const Survey& survey,
                         const InversionConfig& cfg);

/// n_gn Gauss-Newton steps, each with n_cg conjugate-gradient iterations on
/// H dm = -grad (zero start, no preconditioner) and Armijo backtracking.
/// Stops before n_gn when the gradient vanishes, the objective is below
/// 1e-24 of the data energy 1/2 ||d_obs||^2, or the line search fails.
InversionResult gauss_newton(const Survey& survey, const InversionConfig& cfg,
                             const ScalarField& mp_init);

/// Desk-scale synthetic setting: smoothed two-layer medium with velocity
/// increasing with depth, a constant-gradient reference model, surface
/// sources every 5 nodes and receivers at every surface node.
struct DeskScenario {
  RegularGrid grid;
  ScalarField m_true;
  ScalarField m_ref;
  AcquisitionGeometry geometry;
  BoundMap bound;
};
DeskScenario desk_scenario(int nx = 64, int nz = 32);

}  // namespace eikfm
