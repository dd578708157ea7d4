#pragma once

#include <cstdint>
#include <vector>

#include "posdecomp/grid.hpp"

namespace posdecomp {

/// Closed-form check diam <= dist <= 4 diam.
constexpr bool satisfies_whitney(double diam, double dist) noexcept {
  return diam <= dist && dist <= 4.0 * diam;
}

/// Axis-aligned dyadic cube [first, first + cells)^N in grid-index units (half-open for
/// point assignment). Side length l = cells * h = L0 * 2^-generation.
struct WhitneyCube {
  int generation = 0;
  Index3 first{0, 0, 0};
  int cells = 0;
  double side = 0.0;
  Point3 centre{0.0, 0.0, 0.0};
  /// Min of the distance field over the cube's grid points.
  double dist = 0.0;
  std::int64_t dist_sq_index = 0;
  int ndim = 1;

  double diam() const noexcept;
  /// Index of the centre point (first + cells/2 per axis).
  Index3 centre_index() const noexcept;
  bool contains(const Index3& i) const noexcept;
  /// diam Q <= dist(Q) <= 4 diam Q, evaluated in exact integer arithmetic.
  bool whitney_ok() const noexcept;
};

enum class Dilation { one, four_thirds, five_thirds };

/// Dilated cube membership. `one` uses the half-open cube; the dilated cubes are open
/// (they are the supports of the cutoffs).
bool in_dilated_cube(const WhitneyCube& q, const Index3& i, Dilation d) noexcept;

/// Index box covering the open dilated cube, clipped to the grid.
struct IndexBox {
  Index3 first{0, 0, 0};
  Index3 shape{1, 1, 1};
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(shape[0]) * shape[1] * shape[2];
  }
};
IndexBox dilated_box(const WhitneyCube& q, Dilation d, const GridGeometry& g) noexcept;

struct WhitneyDecomposition {
  DomainPtr domain;
  std::vector<WhitneyCube> cubes;
  /// Cube id covering each grid point (-1 when uncovered or exterior).
  std::vector<int> owner;
  std::size_t uncovered_points = 0;
  double uncovered_fraction = 0.0;
  /// Root cube side in cells (power of two >= every grid extent minus one).
  int root_cells = 0;
  int min_side_cells = 2;
  int overlap_four_thirds = 0;
  int overlap_five_thirds = 0;

  int max_generation() const noexcept;
};

/// Recursive dyadic subdivision of the bounding cube anchored at the grid origin. A cube is
/// accepted when all of its points are interior and diam <= dist <= 4 diam; otherwise it is
/// split, unless its children would fall below `min_side_cells`, in which case its interior
/// points are left uncovered. Cubes come out sorted by (generation, centre).
/// Throws InvalidArgument if min_side_cells < 2.
WhitneyDecomposition whitney_decompose(const DomainPtr& domain, int min_side_cells = 2);

/// Max over grid points of the number of dilated cubes containing the point.
int overlap_count(const WhitneyDecomposition& decomp, Dilation dilation);

}  // namespace posdecomp
