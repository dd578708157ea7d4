#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace posdecomp {

using Index3 = std::array<int, 3>;
using Point3 = std::array<double, 3>;

/// Uniform tensor grid in 1, 2 or 3 dimensions. Storage is row-major (last axis fastest);
/// unused trailing axes have extent 1.
struct GridGeometry {
  int ndim = 1;
  Index3 shape{1, 1, 1};
  double spacing = 1.0;
  Point3 origin{0.0, 0.0, 0.0};

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(shape[0]) * shape[1] * shape[2];
  }
  std::size_t linear(const Index3& i) const noexcept {
    return (static_cast<std::size_t>(i[0]) * shape[1] + i[1]) * shape[2] + i[2];
  }
  Index3 unravel(std::size_t idx) const noexcept {
    Index3 i{};
    i[2] = static_cast<int>(idx % shape[2]);
    idx /= shape[2];
    i[1] = static_cast<int>(idx % shape[1]);
    i[0] = static_cast<int>(idx / shape[1]);
    return i;
  }
  Point3 coords(const Index3& i) const noexcept {
    Point3 x{0.0, 0.0, 0.0};
    for (int a = 0; a < ndim; ++a) x[a] = origin[a] + spacing * i[a];
    return x;
  }
  bool in_bounds(const Index3& i) const noexcept {
    for (int a = 0; a < 3; ++a)
      if (i[a] < 0 || i[a] >= shape[a]) return false;
    return true;
  }
  bool on_border(const Index3& i) const noexcept {
    for (int a = 0; a < ndim; ++a)
      if (i[a] == 0 || i[a] == shape[a] - 1) return true;
    return false;
  }
  /// Volume element h^N.
  double cell_volume() const noexcept;

  bool operator==(const GridGeometry&) const = default;

  /// Throws InvalidArgument unless ndim is 1..3, extents positive and spacing > 0.
  void validate() const;
};

/// An open set discretized on a grid together with its distance-to-boundary field.
///
/// The boundary is realized by the exterior grid points: for an interior point x,
/// distance(x) is the Euclidean distance to the nearest exterior grid point. The
/// outermost layer of the grid must be exterior so that zero-extension is well defined.
class GridDomain {
public:
  /// Builds the domain and its exact distance field. Throws InvalidArgument on an empty
  /// interior or an interior point on the grid border.
  GridDomain(GridGeometry geometry, std::vector<std::uint8_t> mask, std::string label = "mask");

  const GridGeometry& geometry() const noexcept { return geometry_; }
  int ndim() const noexcept { return geometry_.ndim; }
  double spacing() const noexcept { return geometry_.spacing; }
  std::size_t size() const noexcept { return geometry_.size(); }
  const std::string& label() const noexcept { return label_; }

  std::span<const std::uint8_t> mask() const noexcept { return mask_; }
  bool interior(std::size_t idx) const noexcept { return mask_[idx] != 0; }
  /// Squared distance in grid-index units (exact integer arithmetic).
  std::span<const std::int64_t> distance_sq_index() const noexcept { return dist_sq_; }
  std::span<const double> distance() const noexcept { return distance_; }
  double width() const noexcept { return width_; }
  std::size_t interior_count() const noexcept { return interior_count_; }
  /// Always true: a domain stored on a finite grid has bounded inscribed balls.
  bool finite_width() const noexcept { return true; }

private:
  GridGeometry geometry_;
  std::vector<std::uint8_t> mask_;
  std::vector<std::int64_t> dist_sq_;
  std::vector<double> distance_;
  double width_ = 0.0;
  std::size_t interior_count_ = 0;
  std::string label_;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

/// Scalar field sampled on the points of a GridDomain.
class GridFunction {
public:
  explicit GridFunction(DomainPtr domain);
  GridFunction(DomainPtr domain, std::vector<double> values);

  const GridDomain& domain() const noexcept { return *domain_; }
  const DomainPtr& domain_ptr() const noexcept { return domain_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

  double max_abs() const noexcept;
  /// Minimum over all grid points.
  double min() const noexcept;
  bool all_finite() const noexcept;
  /// True when the function vanishes on every exterior point.
  bool vanishes_outside() const noexcept;
  void zero_exterior() noexcept;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(double c) noexcept;

private:
  DomainPtr domain_;
  std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double c, GridFunction a);

/// max |a - b| over all grid points; domains must share geometry.
double max_abs_difference(const GridFunction& a, const GridFunction& b);

}  // namespace posdecomp
