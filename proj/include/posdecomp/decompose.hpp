#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "posdecomp/bessel.hpp"
#include "posdecomp/cutoff.hpp"
#include "posdecomp/grid.hpp"
#include "posdecomp/norms.hpp"
#include "posdecomp/params.hpp"
#include "posdecomp/quadrature.hpp"
#include "posdecomp/whitney.hpp"

namespace posdecomp {

/// Majorant of one cube: u_Q = eta_Q u and v_Q = outer_Q (G_m * f_{Q,+}), f_Q = G_m^{-1} u_Q.
///
/// The Bessel step runs at unit scale: the window around (5/3)Q is dilated by 1/l(Q), so the
/// multiplier spacing is 1/cells. Both arrays live on `window`, the index box of (5/3)Q.
struct MajorantPiece {
  int cube = -1;
  IndexBox window;
  std::vector<double> u_piece;
  std::vector<double> v_piece;
  /// Pointwise budget for v_Q >= max(0, u_Q): kernel negativity times ||f_Q||_1, plus the
  /// measured round-trip error and a rounding allowance for the transforms.
  double tau_pos = 0.0;
  /// min over the window of v_Q - max(0, u_Q).
  double margin = 0.0;
  double roundtrip_error = 0.0;
  double f_l1 = 0.0;
  bool f_nonnegative = false;
  bool zero = false;
};

/// Unit-scale multiplier for cubes with the given side (in cells) and window shape. Its grid
/// is the window plus one zero layer per side. Thread-safe; built once and shared.
class MultiplierCache {
public:
  MultiplierCache(int ndim, int order, MultiplierOptions options = {});

  std::shared_ptr<const BesselMultiplier> get(int cells, const Index3& window_shape);
  int order() const noexcept { return order_; }
  /// Largest certified tau_ker (relative to peak) over the multipliers built so far.
  double max_tau_ker() const;
  std::vector<std::shared_ptr<const BesselMultiplier>> all() const;

private:
  int ndim_;
  int order_;
  MultiplierOptions options_;
  mutable std::mutex mutex_;
  std::map<std::array<int, 4>, std::shared_ptr<const BesselMultiplier>> cache_;
};

/// u_q must be eta_Q u (zero outside (4/3)Q; otherwise InvalidArgument). `mult` must be
/// the unit-scale multiplier for the cube's window (MultiplierCache::get).
MajorantPiece majorant_piece(const GridFunction& u_q, int cube, const CutoffFamily& cutoffs,
                             const BesselMultiplier& mult);

/// Window-local arrays placed on the full grid.
GridFunction embed_piece(std::span<const double> piece, const IndexBox& window,
                         const DomainPtr& domain);

struct PieceBound {
  double grad_m_u = 0.0;
  double grad_m_v = 0.0;
  double ratio = 0.0;
  bool skipped = false;
};

/// ||grad^m v_Q||_{L^p} / ||grad^m u_Q||_{L^p}; skipped when u_Q vanishes.
PieceBound piece_norm_bound(const MajorantPiece& piece, const GridGeometry& g, int m, double p);

/// Sum of all majorant pieces, before the uncovered ring is handled.
struct MajorantField {
  std::vector<MajorantPiece> pieces;
  GridFunction v;
  int order = 1;
  double tau_ker = 0.0;
  double tau_pos_max = 0.0;
  int overlap = 0;
  double tau_glob = 0.0;
};

struct MajorantOptions {
  MultiplierOptions multiplier;
  unsigned workers = 0;
};

/// Builds every v_Q and v = sum v_Q (cube order, sequential accumulation). Independent of
/// p and s. Requires m >= 1.
std::shared_ptr<const MajorantField> build_majorant(const GridFunction& u, int m,
                                                   const CutoffFamily& cutoffs,
                                                   const MajorantOptions& options = {});

struct CubeRecord {
  int cube = -1;
  int generation = 0;
  PieceBound bound;
  double tau_pos = 0.0;
  double margin = 0.0;
};

struct DecompositionReport {
  SobolevParams params;
  GridFunction u1;
  GridFunction u2;
  GridFunction v;
  std::vector<CubeRecord> cubes{};
  NormBundle norms_u{};
  NormBundle norms_u1{};
  NormBundle norms_u2{};
  /// max(||u1||, ||u2||) / ||u|| in W^{m,p}(d^s); 0 when u = 0.
  double c = 0.0;
  double min_u1 = 0.0;
  double min_u2 = 0.0;
  /// min over covered points of u1 - max(0, u).
  double majorization_margin = 0.0;
  double identity_residual = 0.0;
  double tau_ker = 0.0;
  double tau_pos_max = 0.0;
  double tau_glob = 0.0;
  int overlap_five_thirds = 0;
  double uncovered_fraction = 0.0;
  std::size_t ring_points = 0;
  double max_piece_ratio = 0.0;
  DivergenceProbe hardy_probe{};
  std::vector<std::string> warnings{};
  std::shared_ptr<const MajorantField> majorant{};

  bool nonnegative_within_tolerance() const noexcept {
    return min_u1 >= -tau_glob && min_u2 >= -tau_glob;
  }
};

struct DecomposeOptions {
  MajorantOptions majorant;
  /// Hardy probe to gate on; the coarsening probe of u is used when absent.
  std::optional<DivergenceProbe> hardy_probe;
  double divergence_factor = kDefaultDivergenceFactor;
  double uncovered_warn_threshold = 0.05;
  /// Extra absolute slack added to tau_glob (>= 0).
  double tau_slack = 0.0;
};

/// u = u1 - u2 with u1 = sum_Q v_Q + max(0, u) on uncovered points and u2 = u1 - u.
/// Throws HypothesisViolation when the Hardy functional diverges, InvalidArgument when
/// p <= 1, m < 1 or u does not vanish outside the domain.
DecompositionReport ancona_decompose(const GridFunction& u, const SobolevParams& params,
                                     const CutoffFamily& cutoffs,
                                     const DecomposeOptions& options = {});

/// Same as ancona_decompose but reuses a majorant built for the same u and m (p and s only
/// enter the norms).
DecompositionReport decompose_with_majorant(const GridFunction& u, const SobolevParams& params,
                                            const CutoffFamily& cutoffs,
                                            std::shared_ptr<const MajorantField> majorant,
                                            const DecomposeOptions& options = {});

/// One row of the global seminorm estimate, for a fixed k. Lines (all p-th powers):
///   0  ||grad^k v||_{L^p(d^s)}
///   1  sum_Q ||grad^k v_Q||_{L^p} l(Q)^s
///   2  sum_Q ||grad^m v_Q||_{L^p} l(Q)^((m-k)p+s)
///   3  sum_Q ||grad^m v_Q||_{L^p} l(Q)^s
///   4  sum_Q ||grad^m u_Q||_{L^p} l(Q)^s
///   5  sum_{r<=m} sum_Q ||grad^r u||_{L^p((4/3)Q)} l(Q)^(-(m-r)p+s)
///   6  ||u||_{L^p(d^(-mp+s))} + ||grad^m u||_{L^p(d^s)}
/// steps[i] = line[i] / line[i+1]; implied = line[0] / line[6].
struct ChainRow {
  int k = 0;
  std::array<double, 7> lines{};
  std::array<double, 6> steps{};
  double implied = 0.0;
};

std::vector<ChainRow> seminorm_chain_report(const GridFunction& u, const DecompositionReport& report,
                                            const CutoffFamily& cutoffs);

/// ||grad^k u_Q||_{L^p} / (l(Q)^(m-k) ||grad^m u_Q||_{L^p}); nullopt when the denominator
/// vanishes. `u_piece` lives on `window` with spacing h.
std::optional<double> interpolation_check(std::span<const double> u_piece, const IndexBox& window,
                                          const GridGeometry& g, double side, double p, int k, int m);
std::optional<double> interpolation_check(const MajorantPiece& piece, const CutoffFamily& cutoffs,
                                          double p, int k, int m);

struct ApproximationResult {
  GridFunction u_n;
  /// ||u - u_n|| in W^{m,p}(d^s).
  double error = 0.0;
  double relative_error = 0.0;
  /// Hardy mass of u on points not covered by cubes of generation <= n.
  double tail_hardy_mass = 0.0;
  int generation_cutoff = 0;
};

struct ApproximationOptions {
  std::optional<DivergenceProbe> hardy_probe;
  std::optional<DivergenceProbe> gradient_probe;
  double divergence_factor = kDefaultDivergenceFactor;
};

/// u_n = sum over cubes of generation <= n of phi_Q u, with phi_Q = eta_Q / sum_Q' eta_Q'
/// the normalized cutoffs. Needs p >= 1 and finite hypothesis norms (HypothesisViolation).
ApproximationResult approximate_compact_support(const GridFunction& u, const SobolevParams& params,
                                                const CutoffFamily& cutoffs, int generation_cutoff,
                                                const ApproximationOptions& options = {});

}  // namespace posdecomp
