#include "posdecomp/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "posdecomp/derivatives.hpp"
#include "posdecomp/error.hpp"
#include "posdecomp/fft.hpp"
#include "posdecomp/quadrature.hpp"

namespace posdecomp {

namespace {

// Wrapped torus offset |k| for k in [0, n).
int wrapped(int k, int n) noexcept { return std::min(k, n - k); }

template <class F>
void for_each_index(int ndim, const Index3& shape, F&& f) {
  Index3 i{0, 0, 0};
  (void)ndim;
  std::size_t idx = 0;
  for (i[0] = 0; i[0] < shape[0]; ++i[0])
    for (i[1] = 0; i[1] < shape[1]; ++i[1])
      for (i[2] = 0; i[2] < shape[2]; ++i[2]) f(i, idx++);
}

}  // namespace

BesselMultiplier::BesselMultiplier(int ndim, const Index3& shape, double spacing, int order,
                                   MultiplierOptions options)
    : ndim_(ndim), shape_(shape), spacing_(spacing), order_(order), options_(options) {
  if (ndim < 1 || ndim > 3) throw InvalidArgument("multiplier: ndim must be 1, 2 or 3");
  if (order < 1) throw InvalidArgument("multiplier: order m must be >= 1");
  if (!(spacing > 0.0)) throw InvalidArgument("multiplier: spacing must be positive");
  for (int a = 0; a < 3; ++a) {
    if (shape_[a] < 1) throw InvalidArgument("multiplier: extents must be positive");
    if (a >= ndim && shape_[a] != 1) throw InvalidArgument("multiplier: unused axes must have extent 1");
  }
  if (options_.min_pad_cells < 1 || !(options_.decay_lengths_per_order > 0.0) ||
      !(options_.tail_threshold > 0.0) || options_.max_doublings < 0)
    throw InvalidArgument("multiplier: invalid padding options");
  build(options_);
}

BesselMultiplier::BesselMultiplier(const GridGeometry& geometry, int order, MultiplierOptions options)
    : BesselMultiplier(geometry.ndim, geometry.shape, geometry.spacing, order, options) {}

std::size_t BesselMultiplier::padded_size() const noexcept {
  return static_cast<std::size_t>(padded_[0]) * padded_[1] * padded_[2];
}

std::size_t BesselMultiplier::padded_index(const Index3& i) const noexcept {
  return (static_cast<std::size_t>(i[0]) * padded_[1] + i[1]) * padded_[2] + i[2];
}

namespace {

std::size_t volume(const Index3& s) { return static_cast<std::size_t>(s[0]) * s[1] * s[2]; }

std::vector<double> make_symbol(int ndim, const Index3& shape, double h, int order, SymbolKind kind) {
  std::vector<double> sym(volume(shape), 0.0);
  const double half_m = 0.5 * order;
  for_each_index(ndim, shape, [&](const Index3& k, std::size_t idx) {
    double lam = 0.0;
    for (int a = 0; a < ndim; ++a) {
      const int n = shape[a];
      if (kind == SymbolKind::discrete_laplacian) {
        const double s = 2.0 / h * std::sin(std::numbers::pi * k[a] / n);
        lam += s * s;
      } else {
        const int kw = k[a] <= n / 2 ? k[a] : k[a] - n;
        const double xi = 2.0 * std::numbers::pi * kw / (n * h);
        lam += xi * xi;
      }
    }
    sym[idx] = idx == 0 ? 1.0 : std::pow(1.0 + lam, -half_m);
  });
  return sym;
}

std::vector<double> multiply_on(int ndim, const Index3& shape, std::span<const double> symbol,
                                std::span<const double> in, bool inverse, double* imag_residue) {
  const std::size_t n = volume(shape);
  if (in.size() != n) throw InvalidArgument("multiplier: input is not in padded layout");
  FftBuffer buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = in[i];
  fft_forward(buf, ndim, shape);
  const double scale = 1.0 / double(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] *= (inverse ? 1.0 / symbol[i] : symbol[i]) * scale;
  fft_backward(buf, ndim, shape);
  std::vector<double> out(n);
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = buf[i].real();
    re = std::max(re, std::abs(buf[i].real()));
    im = std::max(im, std::abs(buf[i].imag()));
  }
  if (imag_residue) *imag_residue = re > 0.0 ? im / re : 0.0;
  return out;
}

std::vector<double> kernel_on(int ndim, const Index3& shape, std::span<const double> symbol, double h) {
  std::vector<double> delta(volume(shape), 0.0);
  delta[0] = std::pow(h, -ndim);
  return multiply_on(ndim, shape, symbol, delta, false, nullptr);
}

}  // namespace

// The tail is certified on a torus wide enough to observe offsets >= pad; fields are then
// transformed on the smaller torus of extent n + pad, which already keeps every image of a
// grid-supported field at least pad cells away.
void BesselMultiplier::build(const MultiplierOptions& opt) {
  const double h = spacing_;
  int pad = std::max(opt.min_pad_cells, static_cast<int>(std::ceil(opt.decay_lengths_per_order * order_ / h)));
  for (int doubling = 0;; ++doubling) {
    Index3 probe_shape{1, 1, 1};
    for (int a = 0; a < ndim_; ++a) probe_shape[a] = fft_friendly_size(std::max(shape_[a] + pad, 2 * pad + 2));
    const auto kernel = kernel_on(ndim_, probe_shape, make_symbol(ndim_, probe_shape, h, order_, opt.symbol), h);
    KernelCertificate c;
    c.doublings = doubling;
    double mn = 0.0, tail = 0.0;
    for_each_index(ndim_, probe_shape, [&](const Index3& k, std::size_t idx) {
      const double v = kernel[idx];
      c.peak = std::max(c.peak, v);
      mn = std::min(mn, v);
      int off = 0;
      for (int a = 0; a < ndim_; ++a) off = std::max(off, wrapped(k[a], probe_shape[a]));
      if (off >= pad) tail = std::max(tail, std::abs(v));
    });
    c.tail_ratio = c.peak > 0.0 ? tail / c.peak : 0.0;
    if (c.tail_ratio <= opt.tail_threshold) {
      pad_ = pad;
      padded_ = {1, 1, 1};
      for (int a = 0; a < ndim_; ++a) padded_[a] = fft_friendly_size(shape_[a] + pad);
      symbol_ = make_symbol(ndim_, padded_, h, order_, opt.symbol);
      for (double v : kernel_on(ndim_, padded_, symbol_, h)) mn = std::min(mn, v);
      c.negative_abs = -mn;
      c.tau_ker = c.peak > 0.0 ? c.negative_abs / c.peak : 0.0;
      cert_ = c;
      return;
    }
    if (doubling >= opt.max_doublings)
      throw InvariantViolation("multiplier: kernel tail not below threshold after maximum padding doublings");
    pad *= 2;
  }
}

std::vector<double> BesselMultiplier::multiply(std::span<const double> in, bool inverse,
                                               double* imag_residue) const {
  return multiply_on(ndim_, padded_, symbol_, in, inverse, imag_residue);
}

std::vector<double> BesselMultiplier::apply(std::span<const double> v, double* imag_residue) const {
  return multiply(v, false, imag_residue);
}

std::vector<double> BesselMultiplier::invert(std::span<const double> v, double* imag_residue) const {
  return multiply(v, true, imag_residue);
}

std::pair<std::vector<double>, std::vector<double>> BesselMultiplier::apply_pair(
    std::span<const double> a, std::span<const double> b) const {
  const std::size_t n = padded_size();
  if (a.size() != n || b.size() != n) throw InvalidArgument("multiplier: input is not in padded layout");
  FftBuffer buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = {a[i], b[i]};
  fft_forward(buf, ndim_, padded_);
  const double scale = 1.0 / double(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] *= symbol_[i] * scale;
  fft_backward(buf, ndim_, padded_);
  std::pair<std::vector<double>, std::vector<double>> out;
  out.first.resize(n);
  out.second.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.first[i] = buf[i].real();
    out.second[i] = buf[i].imag();
  }
  return out;
}

std::vector<double> BesselMultiplier::embed(std::span<const double> values) const {
  const GridGeometry g{ndim_, shape_, spacing_, {0.0, 0.0, 0.0}};
  if (values.size() != g.size()) throw InvalidArgument("multiplier: array does not match the grid");
  std::vector<double> out(padded_size(), 0.0);
  Index3 i;
  std::size_t idx = 0;
  for (i[0] = 0; i[0] < shape_[0]; ++i[0])
    for (i[1] = 0; i[1] < shape_[1]; ++i[1])
      for (i[2] = 0; i[2] < shape_[2]; ++i[2], ++idx) {
        const double v = values[idx];
        if (v != 0.0 && g.on_border(i))
          throw InvalidArgument("support touches the padding margin (nonzero on the grid's outer layer)");
        out[padded_index(i)] = v;
      }
  return out;
}

std::vector<double> BesselMultiplier::restrict_to_grid(std::span<const double> padded_values) const {
  if (padded_values.size() != padded_size()) throw InvalidArgument("multiplier: input is not in padded layout");
  std::vector<double> out(static_cast<std::size_t>(shape_[0]) * shape_[1] * shape_[2]);
  Index3 i;
  std::size_t idx = 0;
  for (i[0] = 0; i[0] < shape_[0]; ++i[0])
    for (i[1] = 0; i[1] < shape_[1]; ++i[1])
      for (i[2] = 0; i[2] < shape_[2]; ++i[2]) out[idx++] = padded_values[padded_index(i)];
  return out;
}

std::vector<double> BesselMultiplier::delta_response() const {
  return kernel_on(ndim_, padded_, symbol_, spacing_);
}

namespace {

void check_grid(const GridGeometry& g, const BesselMultiplier& mult) {
  if (g.ndim != mult.ndim() || g.shape != mult.shape() || g.spacing != mult.spacing())
    throw InvalidArgument("multiplier was built for a different grid");
}

}  // namespace

GridFunction bessel_apply(const GridFunction& f, const BesselMultiplier& mult) {
  check_grid(f.domain().geometry(), mult);
  return GridFunction(f.domain_ptr(), mult.restrict_to_grid(mult.apply(mult.embed(f.values()))));
}

PeriodicField bessel_apply(const PeriodicField& f) {
  if (!f.multiplier) throw InvalidArgument("periodic field without a multiplier");
  return {f.multiplier, f.multiplier->apply(f.values)};
}

PeriodicField bessel_invert(const GridFunction& u, std::shared_ptr<const BesselMultiplier> mult) {
  if (!mult) throw InvalidArgument("bessel_invert: null multiplier");
  check_grid(u.domain().geometry(), *mult);
  auto vals = mult->invert(mult->embed(u.values()));
  return {std::move(mult), std::move(vals)};
}

GridFunction restrict_to(const PeriodicField& f, const DomainPtr& domain) {
  if (!f.multiplier || !domain) throw InvalidArgument("restrict_to: null argument");
  check_grid(domain->geometry(), *f.multiplier);
  return GridFunction(domain, f.multiplier->restrict_to_grid(f.values));
}

std::vector<double> positive_part(std::span<const double> f) {
  std::vector<double> out(f.size());
  std::transform(f.begin(), f.end(), out.begin(), [](double v) { return std::max(v, 0.0); });
  return out;
}

GridFunction positive_part(const GridFunction& f) { return GridFunction(f.domain_ptr(), positive_part(f.values())); }

PeriodicField positive_part(const PeriodicField& f) { return {f.multiplier, positive_part(f.values)}; }

std::pair<double, double> norm_equivalence_report(const GridFunction& u,
                                                  std::shared_ptr<const BesselMultiplier> mult, double p) {
  if (!(p > 1.0)) throw InvalidArgument("norm equivalence needs p > 1");
  if (u.max_abs() == 0.0) throw InvalidArgument("norm equivalence is undefined for u = 0");
  const auto& g = u.domain().geometry();
  double sob = 0.0;
  for (int k = 0; k <= mult->order(); ++k) sob += plain_lp(gradient_magnitude(u.values(), g, k), g.cell_volume(), p);
  const auto f = bessel_invert(u, mult);
  const double fl = plain_lp(f.values, g.cell_volume(), p);
  if (!(fl > 0.0)) throw InvariantViolation("norm equivalence: inverse transform vanished");
  return {sob / fl, fl / sob};
}

}  // namespace posdecomp
