#include "posdecomp/cutoff.hpp"

#include <algorithm>
#include <cmath>

#include "posdecomp/error.hpp"

namespace posdecomp {

namespace {

double psi(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

// Integer max-norm offset from the cube centre.
int offset(const WhitneyCube& q, const Index3& i) noexcept {
  const Index3 c = q.centre_index();
  int m = 0;
  for (int a = 0; a < q.ndim; ++a) m = std::max(m, std::abs(i[a] - c[a]));
  return m;
}

}  // namespace

CutoffProfile CutoffProfile::smooth_step() {
  return {"smooth_step", [](double t) {
            if (t <= 0.0) return 1.0;
            if (t >= 1.0) return 0.0;
            const double a = psi(1.0 - t), b = psi(t);
            return a / (a + b);
          }};
}

CutoffProfile CutoffProfile::exp_shell() {
  return {"exp_shell", [](double t) {
            if (t <= 0.0) return 1.0;
            if (t >= 1.0) return 0.0;
            return std::exp(1.0 - 1.0 / (1.0 - t * t));
          }};
}

CutoffProfile CutoffProfile::by_name(const std::string& name) {
  if (name == "smooth_step") return smooth_step();
  if (name == "exp_shell") return exp_shell();
  throw InvalidArgument("unknown cutoff profile '" + name + "'");
}

double reference_cutoff(const CutoffProfile& profile, double r, double r_in, double r_out) {
  if (r <= r_in) return 1.0;
  if (r >= r_out) return 0.0;
  return profile.transition((r - r_in) / (r_out - r_in));
}

CutoffFamily::CutoffFamily(std::shared_ptr<const WhitneyDecomposition> decomp, CutoffProfile profile)
    : decomp_(std::move(decomp)), profile_(std::move(profile)) {
  if (!decomp_) throw InvalidArgument("cutoff family needs a decomposition");
  if (decomp_->cubes.empty()) throw InvalidArgument("cutoff family needs a nonempty decomposition");
  if (!profile_.transition) throw InvalidArgument("cutoff profile has no transition function");
  if (profile_.transition(0.0) != 1.0 || profile_.transition(1.0) != 0.0)
    throw InvalidArgument("cutoff profile must equal 1 at t=0 and 0 at t=1");
  constexpr int samples = 1000;
  for (int k = 0; k <= samples; ++k) {
    const double v = profile_.transition(double(k) / samples);
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("cutoff profile leaves [0,1]");
  }
}

double CutoffFamily::radius(const WhitneyCube& q, const Index3& i) noexcept {
  return 2.0 * offset(q, i) / q.cells;
}

double CutoffFamily::inner(int cube, const Index3& i) const {
  const auto& q = decomp_->cubes.at(cube);
  const int m = offset(q, i), n = q.cells;
  if (2 * m <= n) return 1.0;
  if (3 * m >= 2 * n) return 0.0;
  return profile_.transition(3.0 * (2 * m - n) / n);
}

double CutoffFamily::outer(int cube, const Index3& i) const {
  const auto& q = decomp_->cubes.at(cube);
  const int m = offset(q, i), n = q.cells;
  if (3 * m <= 2 * n) return 1.0;
  if (6 * m >= 5 * n) return 0.0;
  return profile_.transition(double(6 * m - 4 * n) / n);
}

namespace {

GridFunction sample(const CutoffFamily& f, int cube, Dilation d, bool use_inner) {
  const auto& decomp = f.decomposition();
  const auto& g = decomp.domain->geometry();
  std::vector<double> vals(g.size(), 0.0);
  const auto box = dilated_box(decomp.cubes.at(cube), d, g);
  Index3 i;
  for (i[0] = box.first[0]; i[0] < box.first[0] + box.shape[0]; ++i[0])
    for (i[1] = box.first[1]; i[1] < box.first[1] + box.shape[1]; ++i[1])
      for (i[2] = box.first[2]; i[2] < box.first[2] + box.shape[2]; ++i[2])
        vals[g.linear(i)] = use_inner ? f.inner(cube, i) : f.outer(cube, i);
  return GridFunction(decomp.domain, std::move(vals));
}

}  // namespace

GridFunction CutoffFamily::inner_function(int cube) const {
  return sample(*this, cube, Dilation::four_thirds, true);
}

GridFunction CutoffFamily::outer_function(int cube) const {
  return sample(*this, cube, Dilation::five_thirds, false);
}

CutoffFamily build_cutoffs(const WhitneyDecomposition& decomp, CutoffProfile profile) {
  return CutoffFamily(std::make_shared<const WhitneyDecomposition>(decomp), std::move(profile));
}

GridFunction cube_restrict(const GridFunction& u, int cube, const CutoffFamily& cutoffs) {
  const auto& decomp = cutoffs.decomposition();
  if (u.domain_ptr() != decomp.domain && !(u.domain().geometry() == decomp.domain->geometry()))
    throw InvalidArgument("cube_restrict: field and decomposition live on different grids");
  const auto& g = u.domain().geometry();
  std::vector<double> vals(g.size(), 0.0);
  const auto box = dilated_box(decomp.cubes.at(cube), Dilation::four_thirds, g);
  const auto src = u.values();
  Index3 i;
  for (i[0] = box.first[0]; i[0] < box.first[0] + box.shape[0]; ++i[0])
    for (i[1] = box.first[1]; i[1] < box.first[1] + box.shape[1]; ++i[1])
      for (i[2] = box.first[2]; i[2] < box.first[2] + box.shape[2]; ++i[2]) {
        const std::size_t idx = g.linear(i);
        vals[idx] = cutoffs.inner(cube, i) * src[idx];
      }
  return GridFunction(u.domain_ptr(), std::move(vals));
}

}  // namespace posdecomp
