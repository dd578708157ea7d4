#include "posdecomp/norms.hpp"

#include <cmath>

#include "posdecomp/derivatives.hpp"
#include "posdecomp/error.hpp"
#include "posdecomp/numeric.hpp"

namespace posdecomp {

std::vector<double> weighted_seminorms(const GridFunction& u, const SobolevParams& params) {
  params.validate();
  const auto& dom = u.domain();
  std::vector<double> out(params.m + 1);
  for (int k = 0; k <= params.m; ++k)
    out[k] = weighted_lp(gradient_magnitude(u.values(), dom.geometry(), k), dom, params.p, params.s);
  return out;
}

double weighted_sobolev_norm(const GridFunction& u, const SobolevParams& params) {
  const auto parts = weighted_seminorms(u, params);
  double total = 0.0;
  for (double v : parts) total += v;
  return total;
}

double hardy_functional(const GridFunction& u, const SobolevParams& params) {
  params.validate();
  return weighted_power_sum(u.values(), u.domain(), params.p, params.hardy_exponent());
}

NormBundle norm_bundle(const GridFunction& u, const SobolevParams& params,
                       const DivergenceProbe& hardy_probe) {
  NormBundle b;
  b.params = params;
  b.seminorms = weighted_seminorms(u, params);
  for (double v : b.seminorms) b.total += v;
  b.hardy = hardy_functional(u, params);
  b.hardy_probe = hardy_probe;
  return b;
}

NormBundle norm_bundle(const GridFunction& u, const SobolevParams& params) {
  params.validate();
  return norm_bundle(u, params, probe_by_coarsening(u, params.p, params.hardy_exponent()));
}

double loc_norm(const GridFunction& u, const GridDomain& subdomain, int m, double p) {
  const auto& dom = u.domain();
  if (!(subdomain.geometry() == dom.geometry()))
    throw InvalidArgument("loc_norm: subdomain lives on a different grid");
  if (m < 0) throw InvalidArgument("loc_norm: m must be >= 0");
  const double h = dom.spacing();
  const auto d = dom.distance();
  for (std::size_t i = 0; i < dom.size(); ++i)
    if (subdomain.interior(i) && (!dom.interior(i) || !(d[i] > h)))
      throw InvalidArgument("loc_norm: subdomain must stay more than one cell inside the domain");
  double total = 0.0;
  for (int k = 0; k <= m; ++k) {
    const auto gk = gradient_magnitude(u.values(), dom.geometry(), k);
    total += weighted_lp(gk, subdomain, p, 0.0);
  }
  return total;
}

double hardy_ratio(const GridFunction& u, const SobolevParams& params) {
  params.validate();
  const auto& dom = u.domain();
  const double den = weighted_lp(gradient_magnitude(u.values(), dom.geometry(), params.m), dom, params.p, params.s);
  if (!(den > 0.0)) throw InvalidArgument("hardy_ratio: ||grad^m u|| vanishes");
  return std::pow(hardy_functional(u, params), 1.0 / params.p) / den;
}

}  // namespace posdecomp
