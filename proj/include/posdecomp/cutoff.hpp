#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "posdecomp/grid.hpp"
#include "posdecomp/whitney.hpp"

namespace posdecomp {

/// Transition profile on [0,1]: value 1 at t = 0 falling to 0 at t = 1.
struct CutoffProfile {
  std::string name;
  std::function<double(double)> transition;

  /// C-infinity smooth step psi(1-t) / (psi(1-t) + psi(t)), psi(x) = exp(-1/x).
  static CutoffProfile smooth_step();
  /// exp(1 - 1/(1 - t^2)); continuous and C^1 at t = 0, flat to all orders at t = 1.
  static CutoffProfile exp_shell();
  /// Throws InvalidArgument on an unknown name.
  static CutoffProfile by_name(const std::string& name);
};

/// Radial-in-max-norm reference cutoff: 1 for r <= r_in, profile((r - r_in)/(r_out - r_in))
/// in between, 0 for r >= r_out. r is measured in units of half the cube side.
double reference_cutoff(const CutoffProfile& profile, double r, double r_in, double r_out);

/// Cutoffs for every cube of a decomposition.
///
/// inner(Q) is the eta_Q of the construction: 1 on the closed cube, 0 outside (4/3)Q.
/// outer(Q) is 1 on (4/3)Q and 0 outside (5/3)Q; it localizes the majorant pieces.
class CutoffFamily {
public:
  /// Validates the profile (values in [0,1], endpoints 1 and 0). Throws InvalidArgument.
  CutoffFamily(std::shared_ptr<const WhitneyDecomposition> decomp, CutoffProfile profile);

  const WhitneyDecomposition& decomposition() const noexcept { return *decomp_; }
  const CutoffProfile& profile() const noexcept { return profile_; }

  /// Max-norm radius of grid point i from the centre of cube q, in units of l(Q)/2.
  static double radius(const WhitneyCube& q, const Index3& i) noexcept;

  double inner(int cube, const Index3& i) const;
  double outer(int cube, const Index3& i) const;

  /// inner cutoff sampled on the whole grid.
  GridFunction inner_function(int cube) const;
  GridFunction outer_function(int cube) const;

private:
  std::shared_ptr<const WhitneyDecomposition> decomp_;
  CutoffProfile profile_;
};

inline constexpr double kInnerRadius = 1.0;
inline constexpr double kMiddleRadius = 4.0 / 3.0;
inline constexpr double kOuterRadius = 5.0 / 3.0;

/// Copies the decomposition into the family. Default profile is the smooth step.
CutoffFamily build_cutoffs(const WhitneyDecomposition& decomp,
                           CutoffProfile profile = CutoffProfile::smooth_step());

/// eta_Q * u.
GridFunction cube_restrict(const GridFunction& u, int cube, const CutoffFamily& cutoffs);

}  // namespace posdecomp
