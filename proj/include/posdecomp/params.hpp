#pragma once

namespace posdecomp {

/// Smoothness order m, integrability p and weight exponent s.
struct SobolevParams {
  int m = 1;
  double p = 2.0;
  double s = 0.0;

  /// Exponent of the Hardy functional int |u|^p d^(-mp+s).
  double hardy_exponent() const noexcept { return -m * p + s; }

  /// m >= 0, p >= 1, finite s. Throws InvalidArgument.
  void validate() const;
  /// Bessel route: additionally m >= 1 and p > 1.
  void validate_bessel_route() const;
};

}  // namespace posdecomp
