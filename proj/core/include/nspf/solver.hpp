#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nspf/fields.hpp"
#include "nspf/grid.hpp"
#include "nspf/operators.hpp"

namespace nspf {

enum class SolverMethod { newton, pseudo_time };

std::string to_string(SolverMethod m);
SolverMethod solver_method_from_string(const std::string& name);

struct SolverConfig {
  SolverMethod method = SolverMethod::newton;
  double tol = 1e-8;          // residual infinity-norm target
  int max_iters = 60;         // Newton iterations
  double damping = 0.7;       // backtracking factor for rejected Newton steps
  double pseudo_dt = 0.0;     // 0 picks a stable explicit step
  int pseudo_iters = 20000;   // explicit pseudo-time steps
  double divergence_growth = 10.0;  // growth factor treated as divergence
  // Fallback when Newton from the initial guess fails: solve at
  // nu * continuation_start, then lower nu by continuation_ratio per stage,
  // halving the log-step after a failed stage. 0 disables the fallback.
  double continuation_start = 8.0;
  double continuation_ratio = 0.7;
  int max_continuation_stages = 60;
  int stencil_order = 2;
  bool record_timing = true;  // false reports wall_seconds = 0

  std::vector<std::string> violations() const;
  bool operator==(const SolverConfig&) const = default;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double momentum_residual = 0.0;    // infinity norm of (Rmx, Rmy)
  double divergence_residual = 0.0;  // infinity norm of Rd
  double wall_seconds = 0.0;
  bool used_fallback = false;
};

struct SolveResult {
  FieldSet fields;
  SolveReport report;
};

/// A discrete Navier-Stokes system: boundary codes, Dirichlet values for the
/// overwritten pixels, and an optional pressure pin replacing one divergence
/// row (needed when no pixel carries a pressure Dirichlet value).
struct NsProblem {
  BoundaryImage bnd;
  FieldSet boundary_values;
  double h = 0.0;
  double nu = 0.05;
  struct Pin {
    int i;
    int j;
    double value;
  };
  std::optional<Pin> pressure_pin;
};

/// Problem with the channel boundary conditions (inflow, no-slip, outflow p = 0).
NsProblem channel_problem(const GeometryImage& geom, const FluidConstants& consts, const ChannelSpec& spec);

/// Solves the discrete residual equations. Unknowns are u, v on codes 0, 3,
/// >= 4 and p on codes 0, >= 4. Newton uses a sparse LU factorization and
/// backtracking, with viscosity continuation as fallback; the pseudo-time
/// method is explicit artificial compressibility. Non-convergence is
/// reported, not thrown.
SolveResult solve_discrete_ns(const NsProblem& problem, const SolverConfig& config,
                              const FieldSet* initial = nullptr);
SolveResult solve_discrete_ns(const GeometryImage& geom, const FluidConstants& consts, const ChannelSpec& spec,
                              const SolverConfig& config, const FieldSet* initial = nullptr);

/// Residual vector of the solver's system (pin applied).
NsOperators::Residual system_residual(const NsProblem& problem, const NsOperators& ops, const FieldSet& f);

/// Solves Laplacian(u) = rhs with the 5-point stencil by conjugate gradients
/// on pixels where mask is 1 and the pixel is not on the image border; all
/// other pixels keep the values of `dirichlet` (zero if null).
/// Throws NumericalError when max_iters is exceeded.
Field solve_diffusion(const GeometryImage& mask, const Field& rhs, double h, double tol = 1e-10,
                      int max_iters = 100000, const Field* dirichlet = nullptr);

}  // namespace nspf
