#include "posdecomp/domain.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "posdecomp/afld.hpp"
#include "posdecomp/error.hpp"

namespace posdecomp {

namespace {

struct KindName {
  DomainKind kind;
  std::string_view name;
};

constexpr std::array<KindName, 9> kKindNames{{
    {DomainKind::interval, "interval"},
    {DomainKind::box, "box"},
    {DomainKind::ball, "ball"},
    {DomainKind::annulus, "annulus"},
    {DomainKind::l_shape, "l_shape"},
    {DomainKind::cusp, "cusp"},
    {DomainKind::punctured_box, "punctured_box"},
    {DomainKind::slit_box, "slit_box"},
    {DomainKind::from_mask_file, "from_mask_file"},
}};

constexpr double kAnnulusInner = 0.2;
constexpr double kAnnulusOuter = 0.5;

int min_ndim(DomainKind k) {
  switch (k) {
    case DomainKind::annulus:
    case DomainKind::l_shape:
    case DomainKind::cusp:
    case DomainKind::slit_box:
      return 2;
    default:
      return 1;
  }
}

// Interior predicate in integer index arithmetic; n - 1 = intervals per axis.
bool interior_point(DomainKind kind, int ndim, const Index3& i, std::int64_t n1) {
  for (int a = 0; a < ndim; ++a)
    if (i[a] <= 0 || i[a] >= n1) return false;
  // Offsets from the centre, doubled so they stay integral: 2 i - (n - 1).
  std::int64_t r2 = 0;
  for (int a = 0; a < ndim; ++a) {
    const std::int64_t o = 2 * std::int64_t(i[a]) - n1;
    r2 += o * o;
  }
  switch (kind) {
    case DomainKind::interval:
    case DomainKind::box:
      return true;
    case DomainKind::ball:
      return r2 < n1 * n1;
    case DomainKind::annulus: {
      const double r = std::sqrt(double(r2)) / (2.0 * n1);
      return r > kAnnulusInner && r < kAnnulusOuter;
    }
    case DomainKind::l_shape: {
      for (int a = 0; a < ndim; ++a)
        if (2 * std::int64_t(i[a]) < n1) return true;
      return false;
    }
    case DomainKind::cusp: {
      // |y' - c'| < y0^2 / 2  <=>  (sum_{a>0} (2 i_a - n1)^2) n1^2 < i_0^4
      std::int64_t rho2 = 0;
      for (int a = 1; a < ndim; ++a) {
        const std::int64_t o = 2 * std::int64_t(i[a]) - n1;
        rho2 += o * o;
      }
      const std::int64_t i0 = i[0];
      return rho2 * n1 * n1 < i0 * i0 * i0 * i0;
    }
    case DomainKind::punctured_box:
      return r2 != 0;
    case DomainKind::slit_box:
      return !(2 * std::int64_t(i[1]) == n1 && 2 * std::int64_t(i[0]) >= n1);
    case DomainKind::from_mask_file:
      break;
  }
  return false;
}

double box_envelope(const Point3& y, int ndim) {
  double e = 1.0;
  for (int a = 0; a < ndim; ++a) e *= 4.0 * y[a] * (1.0 - y[a]);
  return e;
}

}  // namespace

std::string_view to_string(DomainKind kind) noexcept {
  for (const auto& kn : kKindNames)
    if (kn.kind == kind) return kn.name;
  return "unknown";
}

DomainKind parse_domain_kind(std::string_view name) {
  for (const auto& kn : kKindNames)
    if (kn.name == name) return kn.kind;
  throw InvalidArgument("unknown domain kind '" + std::string(name) + "'");
}

DomainSpec DomainSpec::refined() const {
  if (kind == DomainKind::from_mask_file) throw InvalidArgument("a mask-file domain cannot be refined");
  DomainSpec r = *this;
  r.spacing = spacing / 2.0;
  return r;
}

int DomainSpec::points_per_axis() const {
  if (!(spacing > 0.0) || !(scale > 0.0)) throw InvalidArgument("spacing and scale must be positive");
  const double intervals = scale / spacing;
  const double rounded = std::round(intervals);
  if (std::abs(intervals - rounded) > 1e-9 * std::max(1.0, rounded))
    throw InvalidArgument("scale / spacing must be an integer");
  if (rounded < 4) throw InvalidArgument("grid too coarse: need at least 4 intervals per axis");
  if (rounded > 4096) throw InvalidArgument("grid too fine: at most 4096 intervals per axis");
  return static_cast<int>(rounded) + 1;
}

DomainPtr build_domain(const DomainSpec& spec) {
  if (spec.kind == DomainKind::from_mask_file) {
    auto dom = read_mask_domain(spec.mask_path);
    if (spec.ndim != 0 && dom->ndim() != spec.ndim)
      throw InvalidArgument("mask file dimension does not match ndim");
    return dom;
  }
  if (spec.ndim < 1 || spec.ndim > 3) throw InvalidArgument("ndim must be 1, 2 or 3");
  if (spec.kind == DomainKind::interval && spec.ndim != 1)
    throw InvalidArgument("interval is one-dimensional; use box for N > 1");
  if (spec.ndim < min_ndim(spec.kind))
    throw InvalidArgument(std::string(to_string(spec.kind)) + " needs ndim >= 2");

  const int n = spec.points_per_axis();
  const std::int64_t n1 = n - 1;
  if ((spec.kind == DomainKind::punctured_box || spec.kind == DomainKind::slit_box) && n1 % 2 != 0)
    throw InvalidArgument("the puncture/slit must lie on grid points: use an even number of intervals");

  GridGeometry g;
  g.ndim = spec.ndim;
  for (int a = 0; a < spec.ndim; ++a) g.shape[a] = n;
  g.spacing = spec.spacing;
  std::vector<std::uint8_t> mask(g.size());
  for (std::size_t idx = 0; idx < g.size(); ++idx)
    mask[idx] = interior_point(spec.kind, spec.ndim, g.unravel(idx), n1) ? 1 : 0;
  return std::make_shared<const GridDomain>(g, std::move(mask), std::string(to_string(spec.kind)));
}

std::optional<double> domain_envelope(const DomainSpec& spec, const Point3& x) {
  const int N = spec.ndim;
  Point3 y{0.0, 0.0, 0.0};
  for (int a = 0; a < N; ++a) y[a] = x[a] / spec.scale;
  double r2 = 0.0;
  for (int a = 0; a < N; ++a) r2 += (y[a] - 0.5) * (y[a] - 0.5);
  switch (spec.kind) {
    case DomainKind::interval:
    case DomainKind::box:
      return box_envelope(y, N);
    case DomainKind::ball:
      return std::max(0.0, 1.0 - 4.0 * r2);
    case DomainKind::annulus: {
      const double a = kAnnulusInner * kAnnulusInner, b = kAnnulusOuter * kAnnulusOuter;
      const double peak = 0.25 * (b - a) * (b - a);
      return std::max(0.0, (r2 - a) * (b - r2) / peak);
    }
    case DomainKind::l_shape: {
      double q = 0.0;
      for (int a = 0; a < N; ++a) {
        const double t = std::max(0.0, 0.5 - y[a]);
        q += t * t;
      }
      return box_envelope(y, N) * 4.0 * q;
    }
    case DomainKind::cusp: {
      double rho2 = 0.0;
      for (int a = 1; a < N; ++a) rho2 += (y[a] - 0.5) * (y[a] - 0.5);
      const double w = 0.5 * y[0] * y[0];
      return std::max(0.0, 16.0 * y[0] * (1.0 - y[0]) * (w * w - rho2));
    }
    case DomainKind::punctured_box:
      return box_envelope(y, N) * 4.0 * r2;
    case DomainKind::slit_box: {
      const double t = std::max(0.0, 0.5 - y[0]);
      return box_envelope(y, N) * 4.0 * ((y[1] - 0.5) * (y[1] - 0.5) + t * t);
    }
    case DomainKind::from_mask_file:
      break;
  }
  return std::nullopt;
}

}  // namespace posdecomp
