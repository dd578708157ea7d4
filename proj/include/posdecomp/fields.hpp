#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "posdecomp/domain.hpp"
#include "posdecomp/grid.hpp"

namespace posdecomp {

/// Reproducible analytic test fields, sampled onto any resolution of a DomainSpec.
///
/// Textual forms (used by the CLI):
///   zero                     u = 0
///   const:C                  u = C on the domain (zero-extended)
///   env:A                    u = E^A with E the domain envelope
///   dpow:A                   u = d^A, d the distance to the boundary
///   bump                     one smooth compactly supported bump at the domain centre
///   sin:A                    u = sin(2 pi y_0) E^A
///   random:SEED[:A]          sum of 3..6 seeded Gaussians with mixed signs, times E^A
///
/// For from_mask_file domains E is replaced by a smooth step of d.
struct FieldSpec {
  enum class Kind { zero, constant, envelope_power, distance_power, bump, sine, random };
  Kind kind = Kind::random;
  double value = 1.0;      // constant value or exponent A
  std::uint64_t seed = 1;  // random only

  std::string to_string() const;
};

/// Throws InvalidArgument on malformed text.
FieldSpec parse_field_spec(std::string_view text);

/// Default random field for a smoothness order m: exponent A = m + 1.
FieldSpec random_field(std::uint64_t seed, int m);

/// Samples `field` on the domain built from `spec` (exterior points are 0).
GridFunction sample_field(const FieldSpec& field, const DomainSpec& spec, const DomainPtr& domain);

/// One Gaussian of a random field, in normalized coordinates.
struct GaussianTerm {
  Point3 centre;
  double width;
  double amplitude;
};

/// The Gaussian terms a seed expands to (portable: built from raw 64-bit engine output).
std::vector<GaussianTerm> random_gaussians(std::uint64_t seed, int ndim);

}  // namespace posdecomp
