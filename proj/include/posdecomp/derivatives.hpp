#pragma once

#include <span>
#include <vector>

#include "posdecomp/grid.hpp"

namespace posdecomp {

/// Multi-index alpha = (alpha_0, ..., alpha_{N-1}) for a partial derivative.
using MultiIndex = Index3;

/// All multi-indices of total order k in `ndim` dimensions, lexicographically descending
/// in the first component (e.g. k=2, N=2: (2,0), (1,1), (0,2)).
std::vector<MultiIndex> multi_indices(int ndim, int k);

/// k! / alpha!, the multiplicity of alpha among ordered k-tuples of axes.
double multinomial(const MultiIndex& alpha, int ndim);

/// The collection of k-th order partial derivatives of a GridFunction.
struct MultiIndexGradient {
  int order = 0;
  std::vector<MultiIndex> indices;
  std::vector<GridFunction> components;

  /// Frobenius magnitude of the derivative tensor:
  /// |grad^k u| = sqrt(sum_alpha k!/alpha! |d^alpha u|^2).
  GridFunction magnitude() const;
};

/// Partial derivative d^alpha of a zero-extended array. Along each axis the centered
/// second-order stencil of the required order is used: [-1,0,1]/2h for first derivatives,
/// [1,-2,1]/h^2 for second, and their compositions for higher orders.
std::vector<double> partial_derivative(std::span<const double> values, const GridGeometry& g,
                                       const MultiIndex& alpha);

/// |grad^k u| for a zero-extended array on geometry g (k = 0 gives |u|).
std::vector<double> gradient_magnitude(std::span<const double> values, const GridGeometry& g, int k);

/// All k-th order partials of u. Throws InvalidArgument for k < 0.
MultiIndexGradient gradient(const GridFunction& u, int k);

}  // namespace posdecomp
