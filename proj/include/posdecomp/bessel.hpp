#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "posdecomp/grid.hpp"

namespace posdecomp {

/// Which |xi|^2 the multiplier (1 + |xi|^2)^(-m/2) uses.
enum class SymbolKind {
  /// sum_i (2/h sin(xi_i h / 2))^2, the symbol of minus the 2N+1 point Laplacian. The
  /// resulting kernel is (I - Delta_h)^(-m/2), an exactly nonnegative matrix.
  discrete_laplacian,
  /// Continuum |xi|^2 at the DFT frequencies; its kernel rings slightly negative.
  spectral,
};

struct MultiplierOptions {
  SymbolKind symbol = SymbolKind::discrete_laplacian;
  int min_pad_cells = 8;
  /// Initial padding in decay lengths of G_m (one length unit) per order: pad >= factor*m/h.
  double decay_lengths_per_order = 4.0;
  /// The delta probe must fall below tail_threshold * peak beyond the padding width.
  double tail_threshold = 1e-12;
  int max_doublings = 8;
};

/// Nonnegativity certificate measured with a delta probe.
struct KernelCertificate {
  double peak = 0.0;
  /// Most negative kernel value per unit mass, as a positive number (0 if none).
  double negative_abs = 0.0;
  /// negative_abs / peak.
  double tau_ker = 0.0;
  /// max |kernel| beyond the padding width, relative to peak.
  double tail_ratio = 0.0;
  int doublings = 0;
};

/// Bessel potential (1 + |xi|^2)^(-m/2) as a Fourier multiplier on a zero-padded periodic
/// grid. Immutable after construction.
class BesselMultiplier {
public:
  /// `shape`/`spacing`: the unpadded grid the fields live on. The padding width grows by
  /// doubling until the delta probe certifies the kernel tail (see MultiplierOptions).
  BesselMultiplier(int ndim, const Index3& shape, double spacing, int order,
                   MultiplierOptions options = {});
  /// Multiplier for the grid of a domain.
  BesselMultiplier(const GridGeometry& geometry, int order, MultiplierOptions options = {});

  int order() const noexcept { return order_; }
  int ndim() const noexcept { return ndim_; }
  double spacing() const noexcept { return spacing_; }
  const Index3& shape() const noexcept { return shape_; }
  const Index3& padded_shape() const noexcept { return padded_; }
  int pad() const noexcept { return pad_; }
  std::size_t padded_size() const noexcept;
  const KernelCertificate& certificate() const noexcept { return cert_; }
  SymbolKind symbol_kind() const noexcept { return options_.symbol; }
  /// Symbol values in DFT order over the padded grid.
  std::span<const double> symbol() const noexcept { return symbol_; }

  /// Linear index into the padded grid of unpadded index i.
  std::size_t padded_index(const Index3& i) const noexcept;

  /// Convolution with G_m / G_m^{-1} on the padded torus (values in padded layout).
  /// If `imag_residue` is given it receives max |Im| / max |Re| of the inverse transform
  /// (the imaginary part is discarded).
  std::vector<double> apply(std::span<const double> padded_values,
                            double* imag_residue = nullptr) const;
  std::vector<double> invert(std::span<const double> padded_values,
                             double* imag_residue = nullptr) const;
  /// G_m * a and G_m * b from a single complex transform (a + i b). Returns them in order.
  std::pair<std::vector<double>, std::vector<double>> apply_pair(std::span<const double> a,
                                                                 std::span<const double> b) const;

  /// Copies an unpadded array into the padded layout. Throws InvalidArgument if the
  /// array does not vanish on the outermost layer (its support would touch the padding).
  std::vector<double> embed(std::span<const double> values) const;
  /// Extracts the unpadded region.
  std::vector<double> restrict_to_grid(std::span<const double> padded_values) const;

  /// The sampled kernel: response to a unit-mass delta at torus index 0 (padded layout).
  std::vector<double> delta_response() const;

private:
  void build(const MultiplierOptions& options);
  std::vector<double> multiply(std::span<const double> padded_values, bool inverse,
                               double* imag_residue) const;

  int ndim_ = 1;
  Index3 shape_{1, 1, 1};
  Index3 padded_{1, 1, 1};
  double spacing_ = 1.0;
  int order_ = 1;
  int pad_ = 0;
  MultiplierOptions options_;
  std::vector<double> symbol_;
  KernelCertificate cert_;
};

/// A function on the padded torus of a multiplier (houses f_Q, which is not compactly
/// supported when m is odd).
struct PeriodicField {
  std::shared_ptr<const BesselMultiplier> multiplier;
  std::vector<double> values;
};

/// G_m * f restricted to the grid. Errors if f does not vanish on the grid's outer layer.
GridFunction bessel_apply(const GridFunction& f, const BesselMultiplier& mult);
PeriodicField bessel_apply(const PeriodicField& f);
/// f with G_m * f = u, on the whole padded torus.
PeriodicField bessel_invert(const GridFunction& u, std::shared_ptr<const BesselMultiplier> mult);
GridFunction restrict_to(const PeriodicField& f, const DomainPtr& domain);

GridFunction positive_part(const GridFunction& f);
PeriodicField positive_part(const PeriodicField& f);
std::vector<double> positive_part(std::span<const double> f);

/// (||u||_{W^{m,p}} / ||f||_{L^p}, its reciprocal) with f = bessel_invert(u). The Sobolev
/// norm is the unweighted sum of ||grad^k u||_{L^p} on the grid; ||f|| is taken over the
/// torus. Throws InvalidArgument for u = 0 or p <= 1.
std::pair<double, double> norm_equivalence_report(const GridFunction& u,
                                                  std::shared_ptr<const BesselMultiplier> mult,
                                                  double p);

}  // namespace posdecomp
