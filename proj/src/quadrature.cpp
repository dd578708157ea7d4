#include "posdecomp/quadrature.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include "posdecomp/error.hpp"
#include "posdecomp/numeric.hpp"

namespace posdecomp {

double weighted_power_sum(std::span<const double> f, const GridDomain& domain, double p,
                          double weight_exponent) {
  if (!(p >= 1.0)) throw InvalidArgument("L^p exponent must satisfy p >= 1");
  if (f.size() != domain.size()) throw InvalidArgument("field size does not match domain");
  const auto d = domain.distance();
  std::vector<double> terms;
  terms.reserve(domain.interior_count());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!domain.interior(i)) continue;
    const double a = std::abs(f[i]);
    if (a == 0.0) {
      terms.push_back(0.0);
      continue;
    }
    const double w = weight_exponent == 0.0 ? 1.0 : std::pow(d[i], weight_exponent);
    terms.push_back(std::pow(a, p) * w);
  }
  return pairwise_sum(terms) * domain.geometry().cell_volume();
}

double weighted_lp(std::span<const double> f, const GridDomain& domain, double p,
                   double weight_exponent) {
  return std::pow(weighted_power_sum(f, domain, p, weight_exponent), 1.0 / p);
}

double weighted_lp(const GridFunction& f, double p, double weight_exponent) {
  return weighted_lp(f.values(), f.domain(), p, weight_exponent);
}

double plain_lp(std::span<const double> f, double cell_volume, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("L^p exponent must satisfy p >= 1");
  std::vector<double> terms(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) terms[i] = f[i] == 0.0 ? 0.0 : std::pow(std::abs(f[i]), p);
  return std::pow(pairwise_sum(terms) * cell_volume, 1.0 / p);
}

double DivergenceProbe::ratio() const noexcept {
  if (coarse > 0.0) return fine / coarse;
  return fine > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
}

bool DivergenceProbe::diverging() const noexcept {
  if (!available) return false;
  if (!std::isfinite(fine) || !std::isfinite(coarse)) return true;
  return ratio() > factor;
}

GridFunction coarsen(const GridFunction& u) {
  const auto& g = u.domain().geometry();
  GridGeometry cg = g;
  cg.spacing = 2.0 * g.spacing;
  for (int a = 0; a < g.ndim; ++a) {
    if (g.shape[a] % 2 == 0 || g.shape[a] < 5)
      throw InvalidArgument("coarsening needs odd grid extents of at least 5");
    cg.shape[a] = (g.shape[a] + 1) / 2;
  }
  std::vector<std::uint8_t> mask(cg.size());
  std::vector<double> vals(cg.size());
  for (std::size_t c = 0; c < cg.size(); ++c) {
    Index3 i = cg.unravel(c);
    for (int a = 0; a < g.ndim; ++a) i[a] *= 2;
    const std::size_t f = g.linear(i);
    mask[c] = u.domain().mask()[f];
    vals[c] = u[f];
  }
  auto dom = std::make_shared<const GridDomain>(cg, std::move(mask), u.domain().label() + "/coarse");
  return GridFunction(dom, std::move(vals));
}

DivergenceProbe probe_by_coarsening(const GridFunction& u, double p, double weight_exponent,
                                    double factor) {
  DivergenceProbe probe;
  probe.factor = factor;
  probe.fine = weighted_power_sum(u.values(), u.domain(), p, weight_exponent);
  const auto& g = u.domain().geometry();
  for (int a = 0; a < g.ndim; ++a)
    if (g.shape[a] % 2 == 0 || g.shape[a] < 5) return probe;
  try {
    const GridFunction c = coarsen(u);
    probe.coarse = weighted_power_sum(c.values(), c.domain(), p, weight_exponent);
    probe.available = true;
  } catch (const InvalidArgument&) {
    // Coarse mask lost its interior; nothing to compare against.
  }
  return probe;
}

}  // namespace posdecomp
