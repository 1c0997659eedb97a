#pragma once

#include <string>
#include <vector>

#include "nspf/fields.hpp"
#include "nspf/grid.hpp"
#include "nspf/operators.hpp"
#include "nspf/residual.hpp"

namespace nspf {

struct LossWeights {
  double w_momentum = 1.0;
  double w_divergence = 1.0;
  double w_data = 0.0;
  double w_pde = 1.0;

  std::vector<std::string> violations() const;
  bool operator==(const LossWeights&) const = default;
};

/// How per-geometry weights are resolved from data availability.
///  physics           w_pde everywhere, no data term
///  data              data term only; every case needs a reference
///  hybrid_exclusive  data term where a reference exists, physics elsewhere
///  hybrid_additive   physics everywhere plus data where a reference exists
enum class LossScheme { physics, data, hybrid_exclusive, hybrid_additive };

std::string to_string(LossScheme s);
LossScheme loss_scheme_from_string(const std::string& name);

/// Weights for one geometry. A data weight of 0 under a scheme that uses data
/// is read as 1.
LossWeights resolve_weights(LossScheme scheme, const LossWeights& base, bool has_reference);

/// Mean over fluid pixels and the three channels of the squared difference.
double data_loss(const FieldSet& pred, const FieldSet& ref, const GeometryImage& geom);

/// w_M * mean(Rmx^2 + Rmy^2) over momentum rows + w_D * mean(Rd^2) over
/// divergence rows.
double physics_loss(const NsResidual& r, const NsScheme& scheme, const LossWeights& w);
double physics_loss(const FieldSet& pred, const BoundaryImage& bnd, const FluidConstants& consts,
                    const LossWeights& w, double h, int order = 2);

/// w_pde * physics_loss + w_data * data_loss. `ref` may be null when w_data == 0.
double hybrid_loss(const FieldSet& pred, const FieldSet* ref, const BoundaryImage& bnd, const GeometryImage& geom,
                   const FluidConstants& consts, const LossWeights& w, double h, int order = 2);

struct LossTerms {
  double total = 0.0;
  double physics = 0.0;  // unweighted by w_pde
  double data = 0.0;     // unweighted by w_data
};

/// Loss of a BC-enforced prediction and its gradient with respect to the
/// prediction. Pixels overwritten by enforce_bcs get zero gradient.
LossTerms loss_with_gradient(const FieldSet& pred, const FieldSet* ref, const GeometryImage& geom,
                             const NsOperators& ops, double nu, const LossWeights& w, FieldSet* grad);

}  // namespace nspf
