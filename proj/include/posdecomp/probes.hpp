#pragma once

#include "posdecomp/domain.hpp"
#include "posdecomp/fields.hpp"
#include "posdecomp/params.hpp"
#include "posdecomp/quadrature.hpp"

namespace posdecomp {

/// H(u) = int |u|^p d^(-mp+s) of an analytic field at spacing h and h/2.
DivergenceProbe hardy_probe_by_refinement(const DomainSpec& spec, const FieldSpec& field,
                                          const SobolevParams& params,
                                          double factor = kDefaultDivergenceFactor);

/// ||grad^m u||^p_{L^p(d^s)} at spacing h and h/2.
DivergenceProbe gradient_probe_by_refinement(const DomainSpec& spec, const FieldSpec& field,
                                             const SobolevParams& params,
                                             double factor = kDefaultDivergenceFactor);

/// ||grad^m u||^p_{L^p(d^s)} on u's grid and on the grid coarsened by injection.
DivergenceProbe gradient_probe_by_coarsening(const GridFunction& u, const SobolevParams& params,
                                             double factor = kDefaultDivergenceFactor);

}  // namespace posdecomp
