#include "posdecomp/probes.hpp"

#include "posdecomp/derivatives.hpp"
#include "posdecomp/error.hpp"

namespace posdecomp {

namespace {

double gradient_power(const GridFunction& u, const SobolevParams& params) {
  const auto& dom = u.domain();
  return weighted_power_sum(gradient_magnitude(u.values(), dom.geometry(), params.m), dom, params.p, params.s);
}

template <class Measure>
DivergenceProbe by_refinement(const DomainSpec& spec, const FieldSpec& field, double factor, Measure&& measure) {
  DivergenceProbe probe;
  probe.factor = factor;
  const auto coarse_dom = build_domain(spec);
  probe.coarse = measure(sample_field(field, spec, coarse_dom));
  const auto fine_spec = spec.refined();
  const auto fine_dom = build_domain(fine_spec);
  probe.fine = measure(sample_field(field, fine_spec, fine_dom));
  probe.available = true;
  return probe;
}

}  // namespace

DivergenceProbe hardy_probe_by_refinement(const DomainSpec& spec, const FieldSpec& field,
                                          const SobolevParams& params, double factor) {
  params.validate();
  return by_refinement(spec, field, factor, [&](const GridFunction& u) {
    return weighted_power_sum(u.values(), u.domain(), params.p, params.hardy_exponent());
  });
}

DivergenceProbe gradient_probe_by_refinement(const DomainSpec& spec, const FieldSpec& field,
                                             const SobolevParams& params, double factor) {
  params.validate();
  return by_refinement(spec, field, factor, [&](const GridFunction& u) { return gradient_power(u, params); });
}

DivergenceProbe gradient_probe_by_coarsening(const GridFunction& u, const SobolevParams& params, double factor) {
  params.validate();
  DivergenceProbe probe;
  probe.factor = factor;
  probe.fine = gradient_power(u, params);
  const auto& g = u.domain().geometry();
  for (int a = 0; a < g.ndim; ++a)
    if (g.shape[a] % 2 == 0 || g.shape[a] < 5) return probe;
  try {
    probe.coarse = gradient_power(coarsen(u), params);
    probe.available = true;
  } catch (const InvalidArgument&) {
  }
  return probe;
}

}  // namespace posdecomp
