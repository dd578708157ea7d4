#pragma once

#include <span>

#include "posdecomp/grid.hpp"

namespace posdecomp {

/// Sum over interior points of |f|^p d^t h^N (midpoint rule, pairwise summation).
/// Throws InvalidArgument for p < 1.
double weighted_power_sum(std::span<const double> f, const GridDomain& domain, double p,
                          double weight_exponent);

/// (sum_interior |f|^p d^t h^N)^(1/p): the L^p norm with weight d^t.
double weighted_lp(const GridFunction& f, double p, double weight_exponent);
double weighted_lp(std::span<const double> f, const GridDomain& domain, double p,
                   double weight_exponent);

/// Unweighted (sum |f|^p h^N)^(1/p) over all points of a raw array.
double plain_lp(std::span<const double> f, double cell_volume, double p);

/// Two-resolution comparison of a p-power integral. `coarse` is the value on the grid of
/// spacing 2h (or h), `fine` on the grid of spacing h (or h/2).
struct DivergenceProbe {
  double coarse = 0.0;
  double fine = 0.0;
  double factor = 1.5;
  bool available = false;

  double ratio() const noexcept;
  /// Growth by more than `factor` under refinement.
  bool diverging() const noexcept;
};

inline constexpr double kDefaultDivergenceFactor = 1.5;

/// Compares sum |u|^p d^t h^N on u's grid with the same quantity on the grid coarsened by
/// injection (every other point). Unavailable (diverging() == false) when any grid extent
/// is even, since injection would then not keep the outer layer.
DivergenceProbe probe_by_coarsening(const GridFunction& u, double p, double weight_exponent,
                                    double factor = kDefaultDivergenceFactor);

/// Injection of u onto the grid with doubled spacing (extents must be odd).
GridFunction coarsen(const GridFunction& u);

}  // namespace posdecomp
