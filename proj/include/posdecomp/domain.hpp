#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "posdecomp/grid.hpp"

namespace posdecomp {

enum class DomainKind {
  interval,
  box,
  ball,
  annulus,
  l_shape,
  cusp,
  punctured_box,
  slit_box,
  from_mask_file,
};

std::string_view to_string(DomainKind kind) noexcept;
/// Throws InvalidArgument on an unknown name.
DomainKind parse_domain_kind(std::string_view name);

/// Describes a domain from the gallery, all living in the cube [0, scale]^N:
///
///   interval       (0,1)                               (N = 1)
///   box            (0,1)^N
///   ball           |y - c| < 1/2, c = (1/2, ...)
///   annulus        1/5 < |y - c| < 1/2                  (N >= 2)
///   l_shape        (0,1)^N minus [1/2,1)^N               (N >= 2)
///   cusp           0 < y_0 < 1, |y' - c'| < y_0^2 / 2    (N >= 2; outward cusp at y_0 = 0)
///   punctured_box  (0,1)^N minus its centre point
///   slit_box       (0,1)^N minus {y_1 = 1/2, y_0 >= 1/2} (N >= 2)
///
/// with y = x / scale. The grid has spacing h and scale/h + 1 points per axis, so the
/// outer layer of grid points lies on the boundary of the cube and is exterior.
struct DomainSpec {
  DomainKind kind = DomainKind::box;
  int ndim = 1;
  double spacing = 1.0 / 64;
  double scale = 1.0;
  std::string mask_path;  // from_mask_file only

  /// Same domain at half the spacing.
  DomainSpec refined() const;
  /// Points per axis (scale / spacing + 1); throws if not an integer.
  int points_per_axis() const;
};

/// Rasterizes the domain and computes its distance field. Errors: empty interior,
/// parameters that do not fit the grid (non-integer scale/h, too few points, wrong N).
DomainPtr build_domain(const DomainSpec& spec);

/// Smooth nonnegative function on the gallery domain that vanishes on its boundary
/// (polynomial in y, at most C^{1,1} across the re-entrant pieces). Evaluated at the
/// normalized coordinates y = x / scale. Returns nullopt for from_mask_file.
std::optional<double> domain_envelope(const DomainSpec& spec, const Point3& x);

}  // namespace posdecomp
