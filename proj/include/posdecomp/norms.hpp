#pragma once

#include <vector>

#include "posdecomp/grid.hpp"
#include "posdecomp/params.hpp"
#include "posdecomp/quadrature.hpp"

namespace posdecomp {

/// Weighted Sobolev seminorms ||grad^k u||_{L^p(d^s)}, k = 0..m, their sum, and the Hardy
/// functional H(u) = int |u|^p d^(-mp+s).
struct NormBundle {
  SobolevParams params;
  std::vector<double> seminorms;
  double total = 0.0;
  double hardy = 0.0;
  DivergenceProbe hardy_probe;

  bool hardy_diverging() const noexcept { return hardy_probe.diverging(); }
};

/// Seminorms via gradient + weighted_lp. The Hardy probe is the given one, or the
/// coarsening probe when none is passed.
NormBundle norm_bundle(const GridFunction& u, const SobolevParams& params);
NormBundle norm_bundle(const GridFunction& u, const SobolevParams& params,
                       const DivergenceProbe& hardy_probe);

/// Weighted W^{m,p}(d^s) norm (sum of the seminorms) without the Hardy probe.
double weighted_sobolev_norm(const GridFunction& u, const SobolevParams& params);
std::vector<double> weighted_seminorms(const GridFunction& u, const SobolevParams& params);

/// Unweighted W^{m,p} norm of u over the interior points of `subdomain`, a domain on the
/// same grid. The subdomain must stay more than one cell away from the boundary of u's
/// domain (every point at distance > h); otherwise InvalidArgument.
double loc_norm(const GridFunction& u, const GridDomain& subdomain, int m, double p);

/// H(u)^(1/p) / ||grad^m u||_{L^p(d^s)}. Throws InvalidArgument on a zero denominator.
double hardy_ratio(const GridFunction& u, const SobolevParams& params);

/// int |u|^p d^(-mp+s) (the p-power, not its root).
double hardy_functional(const GridFunction& u, const SobolevParams& params);

}  // namespace posdecomp
