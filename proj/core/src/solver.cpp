#include "nspf/solver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <chrono>
#include <cmath>

#include "nspf/error.hpp"
#include "nspf/geometry.hpp"
#include "nspf/stencil.hpp"

namespace nspf {

std::string to_string(SolverMethod m) { return m == SolverMethod::newton ? "newton" : "pseudo_time"; }

SolverMethod solver_method_from_string(const std::string& name) {
  if (name == "newton") return SolverMethod::newton;
  if (name == "pseudo_time") return SolverMethod::pseudo_time;
  throw ValidationError("unknown solver method '" + name + "' (expected newton or pseudo_time)");
}

std::vector<std::string> SolverConfig::violations() const {
  std::vector<std::string> v;
  if (!(tol > 0.0)) v.push_back("tol: must be > 0");
  if (!(damping > 0.0 && damping <= 1.0)) v.push_back("damping: must be in (0, 1]");
  if (max_iters < 0) v.push_back("max_iters: must be >= 0");
  if (pseudo_iters < 0) v.push_back("pseudo_iters: must be >= 0");
  if (pseudo_dt < 0.0) v.push_back("pseudo_dt: must be >= 0");
  if (!(divergence_growth > 1.0)) v.push_back("divergence_growth: must be > 1");
  if (!(continuation_start == 0.0 || continuation_start > 1.0)) {
    v.push_back("continuation_start: must be 0 (off) or > 1");
  }
  if (!(continuation_ratio > 0.0 && continuation_ratio < 1.0)) v.push_back("continuation_ratio: must be in (0, 1)");
  if (max_continuation_stages < 1) v.push_back("max_continuation_stages: must be >= 1");
  if (stencil_order != 2 && stencil_order != 6) v.push_back("stencil_order: must be 2 or 6");
  return v;
}

NsProblem channel_problem(const GeometryImage& geom, const FluidConstants& consts, const ChannelSpec& spec) {
  NsProblem p;
  p.bnd = encode_boundary(geom);
  p.boundary_values = FieldSet(geom.width(), geom.height());
  enforce_bcs_inplace(p.boundary_values, p.bnd, consts);
  p.h = spec.h();
  p.nu = consts.nu;
  return p;
}

NsOperators::Residual system_residual(const NsProblem& problem, const NsOperators& ops, const FieldSet& f) {
  auto r = ops.residual(as_vector(f.u), as_vector(f.v), as_vector(f.p), problem.nu);
  if (problem.pressure_pin) {
    const auto& pin = *problem.pressure_pin;
    const int k = pin.j * f.width() + pin.i;
    r.d[k] = f.p(pin.i, pin.j) - pin.value;
  }
  return r;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Unknowns {
  std::vector<int> col_of;  // 3N entries: reduced column of (channel, pixel) or -1
  std::vector<int> row_of;  // 3N entries: reduced row of (equation, pixel) or -1
  std::vector<int> cols;    // reduced -> full
  int size = 0;
};

Unknowns index_unknowns(const NsProblem& pb) {
  const int n = static_cast<int>(pb.bnd.size());
  Unknowns u;
  u.col_of.assign(static_cast<std::size_t>(3 * n), -1);
  u.row_of.assign(static_cast<std::size_t>(3 * n), -1);
  int col = 0;
  int row = 0;
  for (int ch = 0; ch < 3; ++ch) {
    for (int k = 0; k < n; ++k) {
      const auto c = pb.bnd[static_cast<std::size_t>(k)];
      if (!bc_overwritten(c, ch)) {
        u.col_of[static_cast<std::size_t>(ch * n + k)] = col++;
        u.cols.push_back(ch * n + k);
      }
      const bool has_row = ch < 2 ? code::momentum_row(c) : code::divergence_row(c);
      if (has_row) u.row_of[static_cast<std::size_t>(ch * n + k)] = row++;
    }
  }
  if (row != col) {
    throw ValidationError("discrete system is not square: " + std::to_string(row) + " equations, " +
                          std::to_string(col) + " unknowns");
  }
  u.size = col;
  return u;
}

double inf_norm(const NsOperators::Residual& r) {
  return std::max({r.mx.lpNorm<Eigen::Infinity>(), r.my.lpNorm<Eigen::Infinity>(), r.d.lpNorm<Eigen::Infinity>()});
}

Vector gather_residual(const Unknowns& idx, const NsOperators::Residual& r, int n) {
  Vector f(idx.size);
  for (int k = 0; k < n; ++k) {
    const int rows[3] = {idx.row_of[static_cast<std::size_t>(k)], idx.row_of[static_cast<std::size_t>(n + k)],
                         idx.row_of[static_cast<std::size_t>(2 * n + k)]};
    if (rows[0] >= 0) f[rows[0]] = r.mx[k];
    if (rows[1] >= 0) f[rows[1]] = r.my[k];
    if (rows[2] >= 0) f[rows[2]] = r.d[k];
  }
  return f;
}

SparseMatrix reduced_jacobian(const NsProblem& pb, const NsOperators& ops, const Unknowns& idx, const FieldSet& f) {
  const int n = ops.size();
  const SparseMatrix full = ops.jacobian(as_vector(f.u), as_vector(f.v), pb.nu);
  const int pin_row = pb.pressure_pin ? 2 * n + pb.pressure_pin->j * f.width() + pb.pressure_pin->i : -1;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(full.nonZeros()));
  for (int r = 0; r < 3 * n; ++r) {
    const int rr = idx.row_of[static_cast<std::size_t>(r)];
    if (rr < 0) continue;
    if (r == pin_row) {
      t.emplace_back(rr, idx.col_of[static_cast<std::size_t>(r)], 1.0);
      continue;
    }
    for (SparseMatrix::InnerIterator it(full, r); it; ++it) {
      const int cc = idx.col_of[static_cast<std::size_t>(it.col())];
      if (cc >= 0) t.emplace_back(rr, cc, it.value());
    }
  }
  SparseMatrix j(idx.size, idx.size);
  j.setFromTriplets(t.begin(), t.end());
  return j;
}

void apply_update(FieldSet& f, const Unknowns& idx, const Vector& delta, double alpha) {
  const int n = static_cast<int>(f.u.size());
  for (int c = 0; c < idx.size; ++c) {
    const int full = idx.cols[static_cast<std::size_t>(c)];
    f.channel(full / n)[static_cast<std::size_t>(full % n)] += alpha * delta[c];
  }
}

// Explicit artificial-compressibility iterations. Returns steps taken.
int pseudo_time(const NsProblem& pb, const NsOperators& ops, const SolverConfig& cfg, FieldSet& f, double& norm) {
  const int n = ops.size();
  double u_in = 1.0;
  for (int ch = 0; ch < 2; ++ch) {
    for (double x : pb.boundary_values.channel(ch).values()) u_in = std::max(u_in, std::fabs(x));
  }
  const double beta = 4.0 * u_in * u_in;
  // Forward Euler with central convection needs dt <= 2 nu / |u|^2 besides
  // the diffusive and acoustic limits, so the step follows the current speed.
  auto step_size = [&] {
    if (cfg.pseudo_dt > 0.0) return cfg.pseudo_dt;
    double q = 4.0 * u_in * u_in;
    for (std::size_t k = 0; k < f.u.size(); ++k) q = std::max(q, f.u[k] * f.u[k] + f.v[k] * f.v[k]);
    const double umax = std::sqrt(q);
    const double c = umax + std::sqrt(umax * umax + beta);
    return 0.2 * std::min({pb.h * pb.h / (4.0 * pb.nu), pb.h / c, 2.0 * pb.nu / q});
  };
  int steps = 0;
  const double initial = inf_norm(system_residual(pb, ops, f));
  for (; steps < cfg.pseudo_iters; ++steps) {
    const auto r = system_residual(pb, ops, f);
    norm = inf_norm(r);
    if (norm <= cfg.tol || !(norm <= cfg.divergence_growth * initial)) break;
    const double dt = step_size();
    for (int k = 0; k < n; ++k) {
      const auto c = pb.bnd[static_cast<std::size_t>(k)];
      if (!bc_overwritten(c, 0)) f.u[static_cast<std::size_t>(k)] -= dt * r.mx[k];
      if (!bc_overwritten(c, 1)) f.v[static_cast<std::size_t>(k)] -= dt * r.my[k];
      if (!bc_overwritten(c, 2)) f.p[static_cast<std::size_t>(k)] -= dt * beta * r.d[k];
    }
  }
  norm = inf_norm(system_residual(pb, ops, f));
  return steps;
}

struct Outcome {
  bool converged = false;
  int iterations = 0;
};

// Newton iterations with backtracking for one viscosity. The sparsity
// pattern of the reduced Jacobian does not depend on the state or on nu.
class Newton {
 public:
  Newton(const NsProblem& pb, const NsOperators& ops, const Unknowns& idx, const SolverConfig& cfg)
      : pb_(pb), ops_(ops), idx_(idx), cfg_(cfg) {}

  // On return `norm` holds the residual infinity norm of `f` at viscosity nu.
  // With stop_on_growth, a first full step that inflates the residual by
  // cfg.divergence_growth ends the attempt.
  Outcome run(double nu, FieldSet& f, double& norm, int max_iters, bool stop_on_growth) {
    NsProblem pb = pb_;
    pb.nu = nu;
    const int n = ops_.size();
    norm = inf_norm(system_residual(pb, ops_, f));
    Outcome out;
    for (; out.iterations < max_iters && norm > cfg_.tol; ++out.iterations) {
      const auto r = system_residual(pb, ops_, f);
      const Vector rhs = gather_residual(idx_, r, n);
      const Eigen::SparseMatrix<double> jac = reduced_jacobian(pb, ops_, idx_, f);
      if (!pattern_ready_) {
        lu_.analyzePattern(jac);
        pattern_ready_ = true;
      }
      lu_.factorize(jac);
      if (lu_.info() != Eigen::Success) break;
      const Vector delta = lu_.solve(-rhs);
      if (lu_.info() != Eigen::Success || !delta.allFinite()) break;

      // Full step if it reduces the residual, otherwise backtrack by `damping`.
      double alpha = 1.0;
      FieldSet trial = f;
      apply_update(trial, idx_, delta, alpha);
      double trial_norm = inf_norm(system_residual(pb, ops_, trial));
      if (stop_on_growth && out.iterations == 0 &&
          !(trial_norm <= cfg_.divergence_growth * norm)) {
        ++out.iterations;
        break;
      }
      for (int back = 0; back < 30 && !(trial_norm < norm); ++back) {
        alpha *= cfg_.damping;
        trial = f;
        apply_update(trial, idx_, delta, alpha);
        trial_norm = inf_norm(system_residual(pb, ops_, trial));
      }
      if (!(trial_norm < norm)) {
        ++out.iterations;
        break;  // stagnated
      }
      f = std::move(trial);
      norm = trial_norm;
    }
    out.converged = norm <= cfg_.tol;
    return out;
  }

 private:
  const NsProblem& pb_;
  const NsOperators& ops_;
  const Unknowns& idx_;
  const SolverConfig& cfg_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  bool pattern_ready_ = false;
};

void finish(const NsProblem& pb, const NsOperators& ops, const SolverConfig& cfg, SolveResult& res,
            Clock::time_point start) {
  const auto r = system_residual(pb, ops, res.fields);
  res.report.momentum_residual = std::max(r.mx.lpNorm<Eigen::Infinity>(), r.my.lpNorm<Eigen::Infinity>());
  res.report.divergence_residual = r.d.lpNorm<Eigen::Infinity>();
  const double norm = std::max(res.report.momentum_residual, res.report.divergence_residual);
  res.report.converged = std::isfinite(norm) && norm <= cfg.tol;
  res.report.wall_seconds =
      cfg.record_timing ? std::chrono::duration<double>(Clock::now() - start).count() : 0.0;
}

}  // namespace

SolveResult solve_discrete_ns(const NsProblem& pb, const SolverConfig& cfg, const FieldSet* initial) {
  if (auto v = cfg.violations(); !v.empty()) throw ValidationError(v);
  const auto start = Clock::now();
  const int w = pb.bnd.width();
  const int h = pb.bnd.height();
  const NsOperators ops(NsScheme(pb.bnd, pb.h, cfg.stencil_order));

  SolveResult res;
  res.fields = initial ? *initial : FieldSet(w, h);
  if (res.fields.width() != w || res.fields.height() != h) throw ValidationError("initial guess resolution differs from the problem");
  enforce_bcs_inplace(res.fields, pb.bnd, pb.boundary_values);
  if (pb.pressure_pin) res.fields.p(pb.pressure_pin->i, pb.pressure_pin->j) = pb.pressure_pin->value;

  double norm = inf_norm(system_residual(pb, ops, res.fields));
  if (cfg.method == SolverMethod::pseudo_time) {
    res.report.iterations = pseudo_time(pb, ops, cfg, res.fields, norm);
    finish(pb, ops, cfg, res, start);
    return res;
  }

  const Unknowns idx = index_unknowns(pb);
  Newton newton(pb, ops, idx, cfg);
  const FieldSet start_fields = res.fields;
  const Outcome first = newton.run(pb.nu, res.fields, norm, cfg.max_iters, true);
  res.report.iterations = first.iterations;
  if (!first.converged && cfg.continuation_start > 1.0) {
    // Follow the steady branch from a more viscous flow down to nu.
    res.report.used_fallback = true;
    FieldSet f = start_fields;
    double nu = pb.nu * cfg.continuation_start;
    double ratio = cfg.continuation_ratio;
    double nu_done = 0.0;
    for (int stage = 0; stage < cfg.max_continuation_stages; ++stage) {
      FieldSet trial = f;
      double trial_norm = 0.0;
      const Outcome o = newton.run(nu, trial, trial_norm, cfg.max_iters, false);
      res.report.iterations += o.iterations;
      if (o.converged) {
        f = std::move(trial);
        nu_done = nu;
        if (nu == pb.nu) break;
        nu = std::max(pb.nu, nu * ratio);
      } else {
        if (nu_done == 0.0) break;  // not even the most viscous stage converged
        ratio = std::sqrt(ratio);
        if (ratio > 0.99) break;
        nu = std::max(pb.nu, nu_done * ratio);
      }
    }
    if (nu_done == pb.nu) {
      res.fields = std::move(f);
    } else if (nu_done > 0.0) {
      // Best available approximation: the last converged stage, polished at nu.
      double f_norm = inf_norm(system_residual(pb, ops, f));
      if (f_norm < norm) {
        res.fields = std::move(f);
        norm = f_norm;
      }
    }
  }
  finish(pb, ops, cfg, res, start);
  return res;
}

SolveResult solve_discrete_ns(const GeometryImage& geom, const FluidConstants& consts, const ChannelSpec& spec,
                              const SolverConfig& config, const FieldSet* initial) {
  if (geom.width() != spec.res_w || geom.height() != spec.res_h) {
    throw ValidationError("geometry resolution does not match the channel resolution");
  }
  return solve_discrete_ns(channel_problem(geom, consts, spec), config, initial);
}

Field solve_diffusion(const GeometryImage& mask, const Field& rhs, double h, double tol, int max_iters,
                      const Field* dirichlet) {
  const int w = rhs.width();
  const int ht = rhs.height();
  if (mask.width() != w || mask.height() != ht) throw ValidationError("mask and rhs resolutions differ");
  if (dirichlet && !dirichlet->same_shape(rhs)) throw ValidationError("Dirichlet data resolution differs");
  const Stencil lap = make_stencil(Derivative::laplacian, 2, h);
  std::vector<char> free(rhs.size(), 0);
  for (int j = 1; j < ht - 1; ++j) {
    for (int i = 1; i < w - 1; ++i) free[mask.index(i, j)] = mask(i, j) ? 1 : 0;
  }
  Field u = dirichlet ? *dirichlet : Field(w, ht);
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (free[k]) u[k] = 0.0;
  }
  // A = -h^2 Lap on free pixels (SPD); b = -h^2 (f - Lap u_fixed).
  const double s = h * h;
  auto apply = [&](const Field& x) {
    Field y = cross_correlate(x, lap);
    for (std::size_t k = 0; k < y.size(); ++k) y[k] = free[k] ? -s * y[k] : 0.0;
    return y;
  };
  Field b = cross_correlate(u, lap);
  for (std::size_t k = 0; k < b.size(); ++k) b[k] = free[k] ? -s * (rhs[k] - b[k]) : 0.0;

  Field x(w, ht);
  Field r = b;
  Field p = r;
  double rr = 0.0;
  for (double v : r.values()) rr += v * v;
  auto inf = [&](const Field& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::fabs(v));
    return m;
  };
  int it = 0;
  while (inf(r) / s > 0.5 * tol) {
    if (it++ >= max_iters) throw NumericalError("solve_diffusion: no convergence within " + std::to_string(max_iters) + " iterations");
    const Field ap = apply(p);
    double pap = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) pap += p[k] * ap[k];
    const double alpha = rr / pap;
    double rr_new = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * ap[k];
      rr_new += r[k] * r[k];
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = r[k] + beta * p[k];
  }
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (free[k]) u[k] = x[k];
  }
  return u;
}

}  // namespace nspf
