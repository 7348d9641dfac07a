#include "eikfm/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "eikfm/errors.hpp"
#include "eikfm/parallel.hpp"

namespace eikfm {

namespace {

inline std::size_t at(Index k) { return static_cast<std::size_t>(k); }

double dot(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (Index k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void axpy(double a, const ScalarField& x, ScalarField& y) {
  for (Index k = 0; k < y.size(); ++k) y[k] += a * x[k];
}

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* what) {
  if (!(a.grid() == b.grid())) {
    throw DomainError(std::string(what) + ": fields live on different grids");
  }
}

}  // namespace

AcquisitionGeometry surface_geometry(const RegularGrid& grid, int source_every,
                                     int receiver_every) {
  if (source_every < 1 || receiver_every < 1) {
    throw DomainError("surface_geometry: spacings must be >= 1");
  }
  AcquisitionGeometry geo;
  const int dim = grid.dim();
  MultiIndex idx{0, 0, 0};
  if (dim == 2) {
    for (int i = 0; i < grid.count(0); ++i) {
      idx = {i, 0, 0};
      if (i % source_every == 0) geo.sources.push_back({idx});
      if (i % receiver_every == 0) geo.receivers.push_back(grid.linearize(idx));
    }
  } else {
    for (int i = 0; i < grid.count(0); ++i) {
      for (int j = 0; j < grid.count(1); ++j) {
        idx = {i, j, 0};
        if (i % source_every == 0 && j % source_every == 0) geo.sources.push_back({idx});
        if (i % receiver_every == 0 && j % receiver_every == 0) {
          geo.receivers.push_back(grid.linearize(idx));
        }
      }
    }
  }
  return geo;
}

void Survey::validate() const {
  for (const auto& s : sources) {
    if (!grid.contains(s.index)) throw DomainError("survey: source off-grid");
  }
  for (Index r : receivers) {
    if (r < 0 || r >= grid.size()) throw DomainError("survey: receiver off-grid");
  }
  if (d_obs.sources != sources.size() || d_obs.receivers != receivers.size() ||
      d_obs.values.size() != sources.size() * receivers.size()) {
    throw DomainError("survey: data shape does not match sources x receivers");
  }
  for (double d : d_obs.values) {
    if (!std::isfinite(d) || d < 0.0) {
      throw DomainError("survey: observed travel times must be finite and >= 0");
    }
  }
}

DataMatrix forward_data(const ScalarField& m, const Survey& survey,
                        const FmConfig& cfg) {
  if (!(m.grid() == survey.grid)) {
    throw DomainError("forward_data: model and survey grids differ");
  }
  FmConfig fm = cfg;
  fm.mode = FmMode::kFactored;
  DataMatrix out(survey.sources.size(), survey.receivers.size());
  parallel_for(survey.sources.size(), [&](std::size_t i) {
    const DistanceFactor dist = build_distance_factor(m.grid(), survey.sources[i]);
    const FmSolution sol = fm_solve(m, survey.sources[i], dist, fm);
    for (std::size_t r = 0; r < survey.receivers.size(); ++r) {
      const Index k = survey.receivers[r];
      out(i, r) = dist.tau0[k] * sol.tau1[k];
    }
  });
  return out;
}

SyntheticSurvey synthesize_survey(const ScalarField& m_true,
                                  const AcquisitionGeometry& geometry,
                                  double noise_rel, std::uint64_t seed,
                                  const FmConfig& cfg) {
  SyntheticSurvey out;
  out.survey.grid = m_true.grid();
  out.survey.sources = geometry.sources;
  out.survey.receivers = geometry.receivers;
  out.clean = forward_data(m_true, out.survey, cfg);
  out.noise = DataMatrix(out.clean.sources, out.clean.receivers);
  out.survey.d_obs = out.clean;
  if (noise_rel > 0.0 && !out.clean.values.empty()) {
    double mean_abs = 0.0;
    for (double d : out.clean.values) mean_abs += std::abs(d);
    mean_abs /= static_cast<double>(out.clean.values.size());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, noise_rel * mean_abs);
    for (std::size_t j = 0; j < out.clean.values.size(); ++j) {
      out.noise.values[j] = normal(rng);
      // Negative times are unphysical; the survey contract requires d >= 0.
      out.survey.d_obs.values[j] =
          std::max(0.0, out.clean.values[j] + out.noise.values[j]);
      out.noise.values[j] = out.survey.d_obs.values[j] - out.clean.values[j];
    }
  }
  return out;
}

double BoundMap::apply(double mp) const {
  const double half = 0.5 * (high - low);
  return half * (std::tanh((mp - 0.5 * (high + low)) / half) + 1.0) + low;
}

double BoundMap::deriv(double mp) const {
  const double half = 0.5 * (high - low);
  const double c = std::cosh((mp - 0.5 * (high + low)) / half);
  return 1.0 / (c * c);
}

double BoundMap::inverse(double m) const {
  const double half = 0.5 * (high - low);
  const double y = std::clamp((m - low) / half - 1.0, -1.0 + 1e-15, 1.0 - 1e-15);
  return half * std::atanh(y) + 0.5 * (high + low);
}

ScalarField BoundMap::apply(const ScalarField& mp) const {
  ScalarField out(mp.grid());
  for (Index k = 0; k < mp.size(); ++k) out[k] = apply(mp[k]);
  return out;
}

ScalarField BoundMap::deriv(const ScalarField& mp) const {
  ScalarField out(mp.grid());
  for (Index k = 0; k < mp.size(); ++k) out[k] = deriv(mp[k]);
  return out;
}

ScalarField BoundMap::inverse(const ScalarField& m) const {
  ScalarField out(m.grid());
  for (Index k = 0; k < m.size(); ++k) out[k] = inverse(m[k]);
  return out;
}

ScalarField apply_neumann_laplacian(const ScalarField& v) {
  const RegularGrid& g = v.grid();
  ScalarField out(g);
  for (Index k = 0; k < g.size(); ++k) {
    const MultiIndex idx = g.delinearize(k);
    double acc = 0.0;
    for (int d = 0; d < g.dim(); ++d) {
      const Index s = g.stride(d);
      if (idx[d] > 0) acc += v[k] - v[k - s];
      if (idx[d] + 1 < g.count(d)) acc += v[k] - v[k + s];
    }
    out[k] = acc;
  }
  return out;
}

RegularizationValue regularization(const ScalarField& mp, const ScalarField& mp_ref) {
  require_same_grid(mp, mp_ref, "regularization");
  ScalarField diff(mp.grid());
  for (Index k = 0; k < mp.size(); ++k) diff[k] = mp[k] - mp_ref[k];
  RegularizationValue out;
  out.gradient = apply_neumann_laplacian(diff);
  out.value = 0.5 * dot(diff, out.gradient);
  return out;
}

void InversionConfig::validate() const {
  if (!(alpha >= 0.0)) throw DomainError("inversion: alpha must be >= 0");
  if (n_gn < 1 || n_cg < 1) throw DomainError("inversion: n_gn and n_cg must be >= 1");
  if (!(ls_factor > 0.0 && ls_factor < 1.0)) {
    throw DomainError("inversion: ls_factor must lie in (0, 1)");
  }
  if (ls_max < 0) throw DomainError("inversion: ls_max must be >= 0");
  if (!(bound.low > 0.0 && bound.low < bound.high)) {
    throw DomainError("inversion: need 0 < m_low < m_high");
  }
}

TomographyProblem::TomographyProblem(Survey survey, InversionConfig cfg)
    : survey_(std::move(survey)), cfg_(std::move(cfg)) {
  survey_.validate();
  cfg_.validate();
  cfg_.fm.mode = FmMode::kFactored;
  if (cfg_.m_ref.size() == 0) throw DomainError("inversion: m_ref is required");
  if (!(cfg_.m_ref.grid() == survey_.grid)) {
    throw DomainError("inversion: m_ref grid does not match the survey");
  }
  mp_ref_ = cfg_.bound.inverse(cfg_.m_ref);
  distances_.resize(survey_.sources.size());
  parallel_for(survey_.sources.size(), [&](std::size_t i) {
    distances_[i] = build_distance_factor(survey_.grid, survey_.sources[i]);
  });
}

TomographyProblem::Evaluation TomographyProblem::evaluate(const ScalarField& mp,
                                                          bool with_gradient) const {
  if (!(mp.grid() == survey_.grid)) {
    throw DomainError("evaluate: model grid does not match the survey");
  }
  const std::size_t ns = survey_.sources.size();
  const std::size_t nr = survey_.receivers.size();
  Evaluation ev;
  ev.mp = mp;
  ev.m = cfg_.bound.apply(mp);
  ev.bound_deriv = cfg_.bound.deriv(mp);
  ev.predicted = DataMatrix(ns, nr);
  if (with_gradient) ev.jacobians.resize(ns);

  std::vector<ScalarField> partial(with_gradient ? ns : 0);
  parallel_for(ns, [&](std::size_t i) {
    const DistanceFactor& dist = distances_[i];
    const FmSolution sol = fm_solve(ev.m, survey_.sources[i], dist, cfg_.fm);
    for (std::size_t r = 0; r < nr; ++r) {
      const Index k = survey_.receivers[r];
      ev.predicted(i, r) = dist.tau0[k] * sol.tau1[k];
    }
    if (with_gradient) {
      ev.jacobians[i] = SensitivityOperator::assemble(sol, dist);
      ScalarField w(survey_.grid);
      for (std::size_t r = 0; r < nr; ++r) {
        const Index k = survey_.receivers[r];
        w[k] += dist.tau0[k] * (ev.predicted(i, r) - survey_.d_obs(i, r));
      }
      partial[i] = ev.jacobians[i].apply_jacobian_transpose(w);
    }
  });

  double misfit = 0.0;
  for (std::size_t j = 0; j < ev.predicted.values.size(); ++j) {
    const double res = ev.predicted.values[j] - survey_.d_obs.values[j];
    misfit += res * res;
  }
  ev.misfit = 0.5 * misfit;
  const RegularizationValue reg = regularization(mp, mp_ref_);
  ev.regularization = reg.value;
  ev.objective = ev.misfit + cfg_.alpha * reg.value;

  if (with_gradient) {
    ScalarField g(survey_.grid);
    for (const ScalarField& p : partial) axpy(1.0, p, g);
    for (Index k = 0; k < g.size(); ++k) {
      g[k] = ev.bound_deriv[k] * g[k] + cfg_.alpha * reg.gradient[k];
    }
    ev.gradient = std::move(g);
  }
  return ev;
}

ScalarField TomographyProblem::data_gradient(const Evaluation& at) const {
  if (at.jacobians.size() != survey_.sources.size()) {
    throw DomainError("data_gradient: evaluation carries no Jacobians");
  }
  const std::size_t nr = survey_.receivers.size();
  std::vector<ScalarField> partial(survey_.sources.size());
  parallel_for(survey_.sources.size(), [&](std::size_t i) {
    ScalarField w(survey_.grid);
    for (std::size_t r = 0; r < nr; ++r) {
      const Index k = survey_.receivers[r];
      w[k] += distances_[i].tau0[k] * (at.predicted(i, r) - survey_.d_obs(i, r));
    }
    partial[i] = at.jacobians[i].apply_jacobian_transpose(w);
  });
  ScalarField g(survey_.grid);
  for (const ScalarField& p : partial) axpy(1.0, p, g);
  for (Index k = 0; k < g.size(); ++k) g[k] *= at.bound_deriv[k];
  return g;
}

ScalarField TomographyProblem::hessian_apply(const Evaluation& at,
                                             const ScalarField& v) const {
  if (at.jacobians.size() != survey_.sources.size()) {
    throw DomainError("hessian_apply: evaluation carries no Jacobians");
  }
  ScalarField u(v.grid());
  for (Index k = 0; k < u.size(); ++k) u[k] = at.bound_deriv[k] * v[k];
  const std::size_t nr = survey_.receivers.size();
  std::vector<ScalarField> partial(survey_.sources.size());
  parallel_for(survey_.sources.size(), [&](std::size_t i) {
    const ScalarField z = at.jacobians[i].apply_jacobian(u);
    ScalarField w(survey_.grid);
    for (std::size_t r = 0; r < nr; ++r) {
      const Index k = survey_.receivers[r];
      const double t0 = distances_[i].tau0[k];
      w[k] += t0 * t0 * z[k];
    }
    partial[i] = at.jacobians[i].apply_jacobian_transpose(w);
  });
  ScalarField out(v.grid());
  for (const ScalarField& p : partial) axpy(1.0, p, out);
  const ScalarField lv = apply_neumann_laplacian(v);
  for (Index k = 0; k < out.size(); ++k) {
    out[k] = at.bound_deriv[k] * out[k] + cfg_.alpha * lv[k];
  }
  return out;
}

ObjectiveValue objective(const ScalarField& mp, const Survey& survey,
                         const InversionConfig& cfg) {
  const TomographyProblem problem(survey, cfg);
  TomographyProblem::Evaluation ev = problem.evaluate(mp, true);
  return {ev.objective, std::move(ev.gradient)};
}

namespace {

struct CgResult {
  ScalarField x;
  int iterations = 0;
};

// Plain CG from a zero start. Stops early on non-positive curvature or a
// vanishing residual.
CgResult conjugate_gradient(const TomographyProblem& problem,
                            const TomographyProblem::Evaluation& at,
                            const ScalarField& rhs, int max_iter) {
  CgResult out{ScalarField(rhs.grid()), 0};
  ScalarField r = rhs;
  ScalarField p = rhs;
  double rr = dot(r, r);
  const double rr0 = rr;
  if (rr0 == 0.0) return out;
  for (int it = 0; it < max_iter; ++it) {
    const ScalarField hp = problem.hessian_apply(at, p);
    const double php = dot(p, hp);
    if (!(php > 0.0)) break;
    const double step = rr / php;
    axpy(step, p, out.x);
    axpy(-step, hp, r);
    ++out.iterations;
    const double rr_new = dot(r, r);
    if (rr_new <= 1e-28 * rr0) break;
    const double beta = rr_new / rr;
    for (Index k = 0; k < p.size(); ++k) p[k] = r[k] + beta * p[k];
    rr = rr_new;
  }
  return out;
}

}  // namespace

InversionResult gauss_newton(const Survey& survey, const InversionConfig& cfg,
                             const ScalarField& mp_init) {
  const TomographyProblem problem(survey, cfg);
  const InversionConfig& c = problem.config();

  InversionResult result;
  TomographyProblem::Evaluation current = problem.evaluate(mp_init, true);
  result.history.push_back(
      {0, current.misfit, current.regularization, current.objective, 0.0, 0, false});

  // An objective this far below the data energy is roundoff; no step can
  // decrease it reliably.
  double data_energy = 0.0;
  for (double d : survey.d_obs.values) data_energy += 0.5 * d * d;
  const double converged_below = 1e-24 * data_energy;

  for (int it = 1; it <= c.n_gn; ++it) {
    const ScalarField& g = current.gradient;
    if (dot(g, g) == 0.0 || current.objective <= converged_below) break;

    ScalarField rhs(g.grid());
    for (Index k = 0; k < rhs.size(); ++k) rhs[k] = -g[k];
    const CgResult cg = conjugate_gradient(problem, current, rhs, c.n_cg);
    const double slope = dot(g, cg.x);
    if (cg.iterations == 0 || !(slope < 0.0)) break;

    double mu = 1.0;
    bool accepted = false;
    TomographyProblem::Evaluation trial;
    for (int attempt = 0; attempt <= c.ls_max; ++attempt) {
      ScalarField mp = current.mp;
      axpy(mu, cg.x, mp);
      trial = problem.evaluate(mp, true);
      if (trial.objective <= current.objective + c.armijo * mu * slope) {
        accepted = true;
        break;
      }
      mu *= c.ls_factor;
    }
    if (!accepted) {
      IterationRecord rec{it, current.misfit, current.regularization,
                          current.objective, 0.0, cg.iterations, true};
      result.history.push_back(rec);
      result.stopped_early = true;
      break;
    }
    current = std::move(trial);
    result.history.push_back({it, current.misfit, current.regularization,
                              current.objective, mu, cg.iterations, false});
  }

  result.mp_final = current.mp;
  result.m_final = current.m;
  result.predicted = current.predicted;
  return result;
}

DeskScenario desk_scenario(int nx, int nz) {
  // Lengths in km, velocities in km/s, m = 1/v^2 in s^2/km^2. Depth is the
  // last axis, increasing away from the surface row.
  constexpr double h = 0.1;
  DeskScenario s;
  s.grid = RegularGrid::make2d(nx, nz, h);
  s.m_true = ScalarField(s.grid);
  s.m_ref = ScalarField(s.grid);
  const double width = (nx - 1) * h;
  const double depth = (nz - 1) * h;
  for (Index k = 0; k < s.grid.size(); ++k) {
    const Point x = s.grid.coordinate(k);
    const double z = x[1];
    const double interface_z =
        0.45 * depth + 0.1 * depth * std::sin(2.0 * std::numbers::pi * x[0] / width);
    const double upper = 1.6 + 0.5 * z;
    const double lower = 2.6 + 0.3 * (z - interface_z);
    const double blend = 0.5 * (1.0 + std::tanh((z - interface_z) / 0.15));
    const double v_true = (1.0 - blend) * upper + blend * lower;
    const double v_ref = 1.6 + 0.8 * z;
    s.m_true[k] = 1.0 / (v_true * v_true);
    s.m_ref[k] = 1.0 / (v_ref * v_ref);
  }
  s.geometry = surface_geometry(s.grid, 5, 1);
  s.bound = BoundMap{1.0 / (4.5 * 4.5), 1.0 / (1.2 * 1.2)};
  return s;
}

}  // namespace eikfm
