#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "posdecomp/grid.hpp"

namespace posdecomp {

/// Exact squared Euclidean distance (grid-index units) from every grid point to the nearest
/// exterior point of `mask` (mask value 0). Exterior points get 0.
///
/// Separable lower-envelope transform (one pass of parabola envelopes per axis); all
/// arithmetic is on integers represented exactly in double, so results are exact.
/// Throws InvalidArgument if the mask has no exterior point or no interior point.
std::vector<std::int64_t> squared_distance_transform(std::span<const std::uint8_t> mask,
                                                     const GridGeometry& geometry);

/// Physical distance field: sqrt(squared index distance) * spacing, 0 on exterior points.
std::vector<double> distance_transform(std::span<const std::uint8_t> mask,
                                       const GridGeometry& geometry);

}  // namespace posdecomp
