#include "posdecomp/params.hpp"

#include <cmath>

#include "posdecomp/error.hpp"

namespace posdecomp {

void SobolevParams::validate() const {
  if (m < 0) throw InvalidArgument("smoothness order m must be >= 0");
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("exponent p must be finite and >= 1");
  if (!std::isfinite(s)) throw InvalidArgument("weight exponent s must be finite");
}

void SobolevParams::validate_bessel_route() const {
  validate();
  if (m < 1) throw InvalidArgument("the Bessel route needs m >= 1");
  if (!(p > 1.0)) throw InvalidArgument("the Bessel route needs p > 1");
}

}  // namespace posdecomp
