#include "posdecomp/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "posdecomp/derivatives.hpp"
#include "posdecomp/error.hpp"
#include "posdecomp/numeric.hpp"
#include "posdecomp/probes.hpp"

namespace posdecomp {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::size_t volume(const Index3& s) { return static_cast<std::size_t>(s[0]) * s[1] * s[2]; }

Index3 grown_shape(const Index3& s, int ndim, int layers) {
  Index3 out = s;
  for (int a = 0; a < ndim; ++a) out[a] += 2 * layers;
  return out;
}

// Surrounds a row-major array with `layers` zero layers on every active axis.
std::vector<double> grow(std::span<const double> src, const Index3& shape, int ndim, int layers) {
  const Index3 gs = grown_shape(shape, ndim, layers);
  std::vector<double> out(volume(gs), 0.0);
  Index3 i;
  std::size_t idx = 0;
  for (i[0] = 0; i[0] < shape[0]; ++i[0])
    for (i[1] = 0; i[1] < shape[1]; ++i[1])
      for (i[2] = 0; i[2] < shape[2]; ++i[2], ++idx) {
        Index3 j = i;
        for (int a = 0; a < ndim; ++a) j[a] += layers;
        out[(static_cast<std::size_t>(j[0]) * gs[1] + j[1]) * gs[2] + j[2]] = src[idx];
      }
  return out;
}

// Inverse of grow: the central block of shape `shape`.
std::vector<double> shrink(std::span<const double> src, const Index3& shape, int ndim, int layers) {
  const Index3 gs = grown_shape(shape, ndim, layers);
  std::vector<double> out(volume(shape));
  Index3 i;
  std::size_t idx = 0;
  for (i[0] = 0; i[0] < shape[0]; ++i[0])
    for (i[1] = 0; i[1] < shape[1]; ++i[1])
      for (i[2] = 0; i[2] < shape[2]; ++i[2], ++idx) {
        Index3 j = i;
        for (int a = 0; a < ndim; ++a) j[a] += layers;
        out[idx] = src[(static_cast<std::size_t>(j[0]) * gs[1] + j[1]) * gs[2] + j[2]];
      }
  return out;
}

template <class F>
void for_each_in_box(const IndexBox& box, F&& f) {
  Index3 i;
  std::size_t local = 0;
  for (i[0] = box.first[0]; i[0] < box.first[0] + box.shape[0]; ++i[0])
    for (i[1] = box.first[1]; i[1] < box.first[1] + box.shape[1]; ++i[1])
      for (i[2] = box.first[2]; i[2] < box.first[2] + box.shape[2]; ++i[2]) f(i, local++);
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

IndexBox full_window(const WhitneyCube& q, const GridGeometry& g) {
  const IndexBox w = dilated_box(q, Dilation::five_thirds, g);
  const int expected = 2 * ((5 * q.cells - 1) / 6) + 1;
  for (int a = 0; a < g.ndim; ++a)
    if (w.shape[a] != expected) throw InvariantViolation("the (5/3)-dilated cube leaves the grid");
  return w;
}

// ||grad^k a||_{L^p}^p of a window-local array, zero-extended far enough for the stencils.
double local_gradient_power(std::span<const double> a, const IndexBox& w, const GridGeometry& g, int k,
                            int reach, double p) {
  const int layers = std::max(1, reach);
  GridGeometry lg;
  lg.ndim = g.ndim;
  lg.shape = grown_shape(w.shape, g.ndim, layers);
  lg.spacing = g.spacing;
  const auto grown = grow(a, w.shape, g.ndim, layers);
  const double n = plain_lp(gradient_magnitude(grown, lg, k), g.cell_volume(), p);
  return std::pow(n, p);
}

double local_gradient_norm(std::span<const double> a, const IndexBox& w, const GridGeometry& g, int k,
                           int reach, double p) {
  return std::pow(local_gradient_power(a, w, g, k, reach, p), 1.0 / p);
}

MajorantPiece majorant_core(std::vector<double> u_local, int cube, const IndexBox& window,
                            const CutoffFamily& cutoffs, const BesselMultiplier& mult) {
  const int N = mult.ndim();
  MajorantPiece pc;
  pc.cube = cube;
  pc.window = window;
  pc.u_piece = std::move(u_local);
  pc.v_piece.assign(pc.u_piece.size(), 0.0);
  if (max_abs(pc.u_piece) == 0.0) {
    pc.zero = true;
    pc.f_nonnegative = true;
    return pc;
  }
  const Index3 local = grown_shape(window.shape, N, 1);
  if (mult.shape() != local) throw InvalidArgument("majorant: multiplier does not match the cube window");

  const auto f = mult.invert(mult.embed(grow(pc.u_piece, window.shape, N, 1)));
  std::vector<double> fp(f.size()), fm(f.size());
  double fmin = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    fp[i] = std::max(f[i], 0.0);
    fm[i] = std::max(-f[i], 0.0);
    fmin = std::min(fmin, f[i]);
    l1 += std::abs(f[i]);
  }
  pc.f_l1 = l1 * std::pow(mult.spacing(), N);
  pc.f_nonnegative = fmin >= 0.0;

  const auto [gp_t, gm_t] = mult.apply_pair(fp, fm);
  const auto gp = shrink(mult.restrict_to_grid(gp_t), window.shape, N, 1);
  const auto gm = shrink(mult.restrict_to_grid(gm_t), window.shape, N, 1);

  double rt = 0.0;
  for (std::size_t i = 0; i < gp.size(); ++i) rt = std::max(rt, std::abs(gp[i] - gm[i] - pc.u_piece[i]));
  pc.roundtrip_error = rt;
  const double rounding =
      16.0 * kEps * std::log2(double(mult.padded_size()) + 2.0) * (max_abs(gp) + max_abs(gm) + max_abs(pc.u_piece));
  pc.tau_pos = mult.certificate().negative_abs * pc.f_l1 + rt + rounding;

  double margin = std::numeric_limits<double>::infinity();
  for_each_in_box(window, [&](const Index3& i, std::size_t k) {
    pc.v_piece[k] = cutoffs.outer(cube, i) * gp[k];
    margin = std::min(margin, pc.v_piece[k] - std::max(0.0, pc.u_piece[k]));
  });
  pc.margin = margin;
  return pc;
}

void check_same_grid(const GridFunction& u, const CutoffFamily& cutoffs) {
  if (!(u.domain().geometry() == cutoffs.decomposition().domain->geometry()))
    throw InvalidArgument("field and decomposition live on different grids");
}

// Returns the probe or throws when the Hardy hypothesis fails.
DivergenceProbe hardy_gate(const GridFunction& u, const SobolevParams& params,
                           const std::optional<DivergenceProbe>& given, double factor) {
  DivergenceProbe probe = given ? *given : probe_by_coarsening(u, params.p, params.hardy_exponent(), factor);
  if (probe.diverging())
    throw HypothesisViolation(
        "Hardy hypothesis violated: the integral of |u|^p d^(-mp+s) grows by a factor " + std::to_string(probe.ratio()) +
        " under refinement (threshold " + std::to_string(probe.factor) + ")");
  return probe;
}

}  // namespace

MultiplierCache::MultiplierCache(int ndim, int order, MultiplierOptions options)
    : ndim_(ndim), order_(order), options_(options) {
  if (ndim < 1 || ndim > 3) throw InvalidArgument("multiplier cache: ndim must be 1, 2 or 3");
  if (order < 1) throw InvalidArgument("multiplier cache: order must be >= 1");
}

std::shared_ptr<const BesselMultiplier> MultiplierCache::get(int cells, const Index3& window_shape) {
  const std::array<int, 4> key{cells, window_shape[0], window_shape[1], window_shape[2]};
  std::lock_guard lock(mutex_);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  auto m = std::make_shared<const BesselMultiplier>(ndim_, grown_shape(window_shape, ndim_, 1), 1.0 / cells,
                                                    order_, options_);
  cache_.emplace(key, m);
  return m;
}

double MultiplierCache::max_tau_ker() const {
  std::lock_guard lock(mutex_);
  double t = 0.0;
  for (const auto& [k, m] : cache_) t = std::max(t, m->certificate().tau_ker);
  return t;
}

std::vector<std::shared_ptr<const BesselMultiplier>> MultiplierCache::all() const {
  std::lock_guard lock(mutex_);
  std::vector<std::shared_ptr<const BesselMultiplier>> out;
  for (const auto& [k, m] : cache_) out.push_back(m);
  return out;
}

MajorantPiece majorant_piece(const GridFunction& u_q, int cube, const CutoffFamily& cutoffs,
                             const BesselMultiplier& mult) {
  check_same_grid(u_q, cutoffs);
  const auto& decomp = cutoffs.decomposition();
  const auto& q = decomp.cubes.at(cube);
  const auto& g = u_q.domain().geometry();
  for (std::size_t idx = 0; idx < g.size(); ++idx)
    if (u_q[idx] != 0.0 && !in_dilated_cube(q, g.unravel(idx), Dilation::four_thirds))
      throw InvalidArgument("majorant_piece: u_Q is not supported in the (4/3)-dilated cube");
  const IndexBox w = full_window(q, g);
  std::vector<double> local(w.size());
  for_each_in_box(w, [&](const Index3& i, std::size_t k) { local[k] = u_q[g.linear(i)]; });
  return majorant_core(std::move(local), cube, w, cutoffs, mult);
}

GridFunction embed_piece(std::span<const double> piece, const IndexBox& window, const DomainPtr& domain) {
  if (piece.size() != window.size()) throw InvalidArgument("embed_piece: size mismatch");
  const auto& g = domain->geometry();
  std::vector<double> vals(g.size(), 0.0);
  for_each_in_box(window, [&](const Index3& i, std::size_t k) { vals[g.linear(i)] = piece[k]; });
  return GridFunction(domain, std::move(vals));
}

PieceBound piece_norm_bound(const MajorantPiece& piece, const GridGeometry& g, int m, double p) {
  PieceBound b;
  b.grad_m_u = local_gradient_norm(piece.u_piece, piece.window, g, m, m, p);
  if (!(b.grad_m_u > 0.0)) {
    b.skipped = true;
    return b;
  }
  b.grad_m_v = local_gradient_norm(piece.v_piece, piece.window, g, m, m, p);
  b.ratio = b.grad_m_v / b.grad_m_u;
  return b;
}

std::shared_ptr<const MajorantField> build_majorant(const GridFunction& u, int m, const CutoffFamily& cutoffs,
                                                   const MajorantOptions& options) {
  if (m < 1) throw InvalidArgument("the majorant needs m >= 1");
  check_same_grid(u, cutoffs);
  const auto& decomp = cutoffs.decomposition();
  const auto& g = u.domain().geometry();
  MultiplierCache cache(g.ndim, m, options.multiplier);

  const std::size_t n = decomp.cubes.size();
  std::vector<MajorantPiece> pieces(n);
  const unsigned workers = options.workers ? options.workers : default_workers();
  parallel_for(n, workers, [&](std::size_t c) {
    const int cube = static_cast<int>(c);
    const auto& q = decomp.cubes[c];
    const IndexBox w = full_window(q, g);
    std::vector<double> local(w.size());
    for_each_in_box(w, [&](const Index3& i, std::size_t k) { local[k] = cutoffs.inner(cube, i) * u[g.linear(i)]; });
    const bool zero = max_abs(local) == 0.0;
    if (zero) {
      MajorantPiece pc;
      pc.cube = cube;
      pc.window = w;
      pc.u_piece = std::move(local);
      pc.v_piece.assign(w.size(), 0.0);
      pc.zero = pc.f_nonnegative = true;
      pieces[c] = std::move(pc);
      return;
    }
    const auto mult = cache.get(q.cells, w.shape);
    pieces[c] = majorant_core(std::move(local), cube, w, cutoffs, *mult);
  });

  std::vector<double> v(g.size(), 0.0);
  double tau_pos_max = 0.0;
  for (const auto& pc : pieces) {
    for_each_in_box(pc.window, [&](const Index3& i, std::size_t k) { v[g.linear(i)] += pc.v_piece[k]; });
    tau_pos_max = std::max(tau_pos_max, pc.tau_pos);
  }
  const int overlap = decomp.overlap_five_thirds;
  const double vmax = max_abs(v);
  auto field = std::make_shared<MajorantField>(MajorantField{std::move(pieces), GridFunction(u.domain_ptr(), std::move(v)),
                                                            m, cache.max_tau_ker(), tau_pos_max, overlap, 0.0});
  field->tau_glob = overlap * tau_pos_max + 4.0 * overlap * kEps * vmax;
  return field;
}

namespace {

DecompositionReport finish(const GridFunction& u, const SobolevParams& params, const CutoffFamily& cutoffs,
                           std::shared_ptr<const MajorantField> majorant, const DivergenceProbe& probe,
                           const DecomposeOptions& opts) {
  const auto& decomp = cutoffs.decomposition();
  const auto& dom = u.domain();
  const auto& g = dom.geometry();

  GridFunction u1 = majorant->v;
  std::size_t ring = 0;
  for (std::size_t idx = 0; idx < g.size(); ++idx)
    if (dom.interior(idx) && decomp.owner[idx] == -1) {
      u1[idx] += std::max(0.0, u[idx]);
      ++ring;
    }
  GridFunction u2 = u1 - u;

  DecompositionReport r{.params = params, .u1 = u1, .u2 = u2, .v = majorant->v};
  r.majorant = majorant;
  r.hardy_probe = probe;
  r.ring_points = ring;
  r.min_u1 = u1.min();
  r.min_u2 = u2.min();
  r.identity_residual = max_abs_difference(u, u1 - u2);

  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < g.size(); ++idx)
    if (decomp.owner[idx] >= 0) margin = std::min(margin, u1[idx] - std::max(0.0, u[idx]));
  r.majorization_margin = std::isfinite(margin) ? margin : 0.0;

  r.tau_ker = majorant->tau_ker;
  r.tau_pos_max = majorant->tau_pos_max;
  r.overlap_five_thirds = decomp.overlap_five_thirds;
  r.tau_glob = majorant->tau_glob + 4.0 * kEps * std::max(u1.max_abs(), u.max_abs()) + opts.tau_slack;
  r.uncovered_fraction = decomp.uncovered_fraction;

  r.norms_u = norm_bundle(u, params, probe);
  r.norms_u1 = norm_bundle(u1, params);
  r.norms_u2 = norm_bundle(u2, params);
  r.c = r.norms_u.total > 0.0 ? std::max(r.norms_u1.total, r.norms_u2.total) / r.norms_u.total : 0.0;

  r.cubes.reserve(majorant->pieces.size());
  for (const auto& pc : majorant->pieces) {
    CubeRecord cr;
    cr.cube = pc.cube;
    cr.generation = decomp.cubes[pc.cube].generation;
    cr.bound = pc.zero ? PieceBound{0.0, 0.0, 0.0, true} : piece_norm_bound(pc, g, params.m, params.p);
    cr.tau_pos = pc.tau_pos;
    cr.margin = pc.margin;
    if (!cr.bound.skipped) r.max_piece_ratio = std::max(r.max_piece_ratio, cr.bound.ratio);
    r.cubes.push_back(cr);
  }

  if (decomp.uncovered_fraction > opts.uncovered_warn_threshold)
    r.warnings.push_back("uncovered fraction " + std::to_string(decomp.uncovered_fraction) +
                         " exceeds " + std::to_string(opts.uncovered_warn_threshold) +
                         ": mass near the boundary is split by sign, not majorized");
  if (!r.nonnegative_within_tolerance())
    r.warnings.push_back("nonnegativity outside the propagated tolerance tau_glob");
  return r;
}

void check_decompose_inputs(const GridFunction& u, const SobolevParams& params, const CutoffFamily& cutoffs) {
  params.validate_bessel_route();
  check_same_grid(u, cutoffs);
  if (!u.all_finite()) throw InvalidArgument("u has non-finite values");
  if (!u.vanishes_outside()) throw InvalidArgument("u must vanish outside the domain");
}

}  // namespace

DecompositionReport ancona_decompose(const GridFunction& u, const SobolevParams& params,
                                     const CutoffFamily& cutoffs, const DecomposeOptions& options) {
  check_decompose_inputs(u, params, cutoffs);
  const auto probe = hardy_gate(u, params, options.hardy_probe, options.divergence_factor);
  auto majorant = build_majorant(u, params.m, cutoffs, options.majorant);
  return finish(u, params, cutoffs, std::move(majorant), probe, options);
}

DecompositionReport decompose_with_majorant(const GridFunction& u, const SobolevParams& params,
                                            const CutoffFamily& cutoffs,
                                            std::shared_ptr<const MajorantField> majorant,
                                            const DecomposeOptions& options) {
  check_decompose_inputs(u, params, cutoffs);
  if (!majorant || majorant->order != params.m)
    throw InvalidArgument("majorant was built for a different smoothness order");
  if (!(majorant->v.domain().geometry() == u.domain().geometry()))
    throw InvalidArgument("majorant was built on a different grid");
  const auto probe = hardy_gate(u, params, options.hardy_probe, options.divergence_factor);
  return finish(u, params, cutoffs, std::move(majorant), probe, options);
}

std::vector<ChainRow> seminorm_chain_report(const GridFunction& u, const DecompositionReport& report,
                                            const CutoffFamily& cutoffs) {
  const auto& params = report.params;
  const int m = params.m;
  const double p = params.p, s = params.s;
  const auto& decomp = cutoffs.decomposition();
  const auto& dom = u.domain();
  const auto& g = dom.geometry();
  if (!report.majorant) throw InvalidArgument("chain report needs the majorant of the decomposition");

  std::vector<std::vector<double>> grad_u(m + 1);
  for (int r = 0; r <= m; ++r) grad_u[r] = gradient_magnitude(u.values(), g, r);

  // Per-cube powers that do not depend on k.
  double line3 = 0.0, line4 = 0.0, line5 = 0.0;
  std::vector<double> vm_power(report.majorant->pieces.size(), 0.0);
  for (std::size_t c = 0; c < report.majorant->pieces.size(); ++c) {
    const auto& pc = report.majorant->pieces[c];
    const double l = decomp.cubes[pc.cube].side;
    vm_power[c] = local_gradient_power(pc.v_piece, pc.window, g, m, m, p);
    line3 += vm_power[c] * std::pow(l, s);
    line4 += local_gradient_power(pc.u_piece, pc.window, g, m, m, p) * std::pow(l, s);
    const auto box = dilated_box(decomp.cubes[pc.cube], Dilation::four_thirds, g);
    for (int r = 0; r <= m; ++r) {
      std::vector<double> terms;
      for_each_in_box(box, [&](const Index3& i, std::size_t) {
        if (in_dilated_cube(decomp.cubes[pc.cube], i, Dilation::four_thirds))
          terms.push_back(std::pow(std::abs(grad_u[r][g.linear(i)]), p));
      });
      line5 += pairwise_sum(terms) * g.cell_volume() * std::pow(l, -(m - r) * p + s);
    }
  }
  const double line6 = weighted_power_sum(u.values(), dom, p, params.hardy_exponent()) +
                       weighted_power_sum(grad_u[m], dom, p, s);

  std::vector<ChainRow> rows;
  for (int k = 0; k <= m; ++k) {
    ChainRow row;
    row.k = k;
    row.lines[0] = weighted_power_sum(gradient_magnitude(report.v.values(), g, k), dom, p, s);
    double l1 = 0.0, l2 = 0.0;
    for (std::size_t c = 0; c < report.majorant->pieces.size(); ++c) {
      const auto& pc = report.majorant->pieces[c];
      const double l = decomp.cubes[pc.cube].side;
      l1 += local_gradient_power(pc.v_piece, pc.window, g, k, m, p) * std::pow(l, s);
      l2 += vm_power[c] * std::pow(l, (m - k) * p + s);
    }
    row.lines[1] = l1;
    row.lines[2] = l2;
    row.lines[3] = line3;
    row.lines[4] = line4;
    row.lines[5] = line5;
    row.lines[6] = line6;
    auto ratio = [](double a, double b) {
      if (b > 0.0) return a / b;
      return a > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    };
    for (int i = 0; i < 6; ++i) row.steps[i] = ratio(row.lines[i], row.lines[i + 1]);
    row.implied = ratio(row.lines[0], row.lines[6]);
    rows.push_back(row);
  }
  return rows;
}

std::optional<double> interpolation_check(std::span<const double> u_piece, const IndexBox& window,
                                          const GridGeometry& g, double side, double p, int k, int m) {
  if (k < 0 || k > m) throw InvalidArgument("interpolation_check needs 0 <= k <= m");
  if (u_piece.size() != window.size()) throw InvalidArgument("interpolation_check: size mismatch");
  const double den = std::pow(side, m - k) * local_gradient_norm(u_piece, window, g, m, m, p);
  if (!(den > 0.0)) return std::nullopt;
  if (k == m) return 1.0;
  return local_gradient_norm(u_piece, window, g, k, m, p) / den;
}

std::optional<double> interpolation_check(const MajorantPiece& piece, const CutoffFamily& cutoffs, double p,
                                          int k, int m) {
  const auto& decomp = cutoffs.decomposition();
  return interpolation_check(piece.u_piece, piece.window, decomp.domain->geometry(),
                             decomp.cubes.at(piece.cube).side, p, k, m);
}

ApproximationResult approximate_compact_support(const GridFunction& u, const SobolevParams& params,
                                                const CutoffFamily& cutoffs, int generation_cutoff,
                                                const ApproximationOptions& options) {
  params.validate();
  check_same_grid(u, cutoffs);
  if (!u.vanishes_outside()) throw InvalidArgument("u must vanish outside the domain");
  hardy_gate(u, params, options.hardy_probe, options.divergence_factor);
  {
    const auto gp = options.gradient_probe ? *options.gradient_probe
                                           : gradient_probe_by_coarsening(u, params, options.divergence_factor);
    if (gp.diverging())
      throw HypothesisViolation("hypothesis violated: ||grad^m u||_{L^p(d^s)} grows by " + std::to_string(gp.ratio()) +
                                " under refinement");
  }

  const auto& decomp = cutoffs.decomposition();
  const auto& dom = u.domain();
  const auto& g = dom.geometry();
  std::vector<double> total(g.size(), 0.0), partial(g.size(), 0.0);
  for (int c = 0; c < int(decomp.cubes.size()); ++c) {
    const auto& q = decomp.cubes[c];
    const auto box = dilated_box(q, Dilation::four_thirds, g);
    for_each_in_box(box, [&](const Index3& i, std::size_t) {
      const double e = cutoffs.inner(c, i);
      const std::size_t idx = g.linear(i);
      total[idx] += e;
      if (q.generation <= generation_cutoff) partial[idx] += e;
    });
  }
  std::vector<double> un(g.size(), 0.0), tail(g.size(), 0.0);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (total[idx] > 0.0) un[idx] = u[idx] * (partial[idx] / total[idx]);
    const int o = decomp.owner[idx];
    if (dom.interior(idx) && (o < 0 || decomp.cubes[o].generation > generation_cutoff)) tail[idx] = u[idx];
  }
  ApproximationResult res{.u_n = GridFunction(u.domain_ptr(), std::move(un))};
  res.generation_cutoff = generation_cutoff;
  res.error = weighted_sobolev_norm(u - res.u_n, params);
  const double un_norm = weighted_sobolev_norm(u, params);
  res.relative_error = un_norm > 0.0 ? res.error / un_norm : 0.0;
  res.tail_hardy_mass = weighted_power_sum(tail, dom, params.p, params.hardy_exponent());
  return res;
}

}  // namespace posdecomp
