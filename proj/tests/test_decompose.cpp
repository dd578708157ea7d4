#include <doctest.h>

#include <cmath>
#include <memory>

#include "posdecomp/decompose.hpp"
#include "posdecomp/error.hpp"
#include "posdecomp/quadrature.hpp"
#include "support.hpp"

using namespace posdecomp;
using testing::gallery;

namespace {

struct Case {
  DomainSpec spec;
  DomainPtr domain;
  CutoffFamily cutoffs;
};

Case make(DomainKind kind, int ndim, double h) {
  auto spec = gallery(kind, ndim, h);
  auto d = build_domain(spec);
  return {spec, d, build_cutoffs(whitney_decompose(d))};
}

GridFunction random_u(const Case& c, std::uint64_t seed, int m) {
  return sample_field(random_field(seed, m), c.spec, c.domain);
}

}  // namespace

TEST_CASE("multiplier cache shares instances") {
  MultiplierCache cache(1, 2);
  const auto a = cache.get(16, {28, 1, 1});
  const auto b = cache.get(16, {28, 1, 1});
  const auto c = cache.get(8, {14, 1, 1});
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a->spacing() == doctest::Approx(1.0 / 16));
  CHECK(a->shape()[0] == 30);
  CHECK(cache.all().size() == 2);
  CHECK(cache.max_tau_ker() < 1e-6);
}

TEST_CASE("majorant piece of zero is zero and skipped") {
  const auto c = make(DomainKind::interval, 1, 1.0 / 64);
  MultiplierCache cache(1, 1);
  const int q = 0;
  const auto& cube = c.cutoffs.decomposition().cubes[q];
  const auto box = dilated_box(cube, Dilation::five_thirds, c.domain->geometry());
  const auto piece = majorant_piece(GridFunction(c.domain), q, c.cutoffs, *cache.get(cube.cells, box.shape));
  CHECK(piece.zero);
  CHECK(std::all_of(piece.v_piece.begin(), piece.v_piece.end(), [](double v) { return v == 0.0; }));
  CHECK(piece_norm_bound(piece, c.domain->geometry(), 1, 2.0).skipped);
}

TEST_CASE("sign-changing piece on one cube is majorized pointwise") {
  for (int m = 1; m <= 3; ++m) {
    const auto c = make(DomainKind::interval, 1, 1.0 / 128);
    const auto u = testing::sample("sin:3", c.spec, c.domain);
    MultiplierCache cache(1, m);
    for (int q = 0; q < int(c.cutoffs.decomposition().cubes.size()); ++q) {
      const auto& cube = c.cutoffs.decomposition().cubes[q];
      const auto box = dilated_box(cube, Dilation::five_thirds, c.domain->geometry());
      const auto uq = cube_restrict(u, q, c.cutoffs);
      const auto piece = majorant_piece(uq, q, c.cutoffs, *cache.get(cube.cells, box.shape));
      double margin = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < piece.u_piece.size(); ++i)
        margin = std::min(margin, piece.v_piece[i] - std::max(0.0, piece.u_piece[i]));
      CHECK(margin == doctest::Approx(piece.margin));
      CHECK(margin >= -piece.tau_pos);
      CHECK(piece.tau_pos < 1e-9);
      CHECK(piece.roundtrip_error < 1e-10 * std::max(1.0, uq.max_abs()));
      const auto b = piece_norm_bound(piece, c.domain->geometry(), m, 2.0);
      if (!b.skipped) CHECK(b.ratio == doctest::Approx(b.grad_m_v / b.grad_m_u));
    }
  }
}

TEST_CASE("majorant piece needs support inside the 4/3 cube") {
  const auto c = make(DomainKind::interval, 1, 1.0 / 64);
  MultiplierCache cache(1, 1);
  const auto& cube = c.cutoffs.decomposition().cubes[0];
  const auto box = dilated_box(cube, Dilation::five_thirds, c.domain->geometry());
  const auto u = testing::sample("bump", c.spec, c.domain);
  const auto mult = cache.get(cube.cells, box.shape);
  CHECK_THROWS_AS(majorant_piece(u, 0, c.cutoffs, *mult), InvalidArgument);
}

TEST_CASE("zero field splits into zeros") {
  const auto c = make(DomainKind::interval, 1, 1.0 / 64);
  const auto r = ancona_decompose(GridFunction(c.domain), {1, 2.0, 0.0}, c.cutoffs);
  CHECK(r.u1.max_abs() == 0.0);
  CHECK(r.u2.max_abs() == 0.0);
  CHECK(r.c == 0.0);
  const auto chain = seminorm_chain_report(GridFunction(c.domain), r, c.cutoffs);
  for (const auto& row : chain)
    for (double l : row.lines) CHECK(l == 0.0);
}

TEST_CASE("1-D sign-changing field, m = 1, p = 2") {
  double cs[2];
  for (int r = 0; r < 2; ++r) {
    const auto c = make(DomainKind::interval, 1, r == 0 ? 1.0 / 128 : 1.0 / 256);
    const auto u = random_u(c, 1, 1);
    CHECK(u.min() < 0.0);
    CHECK(u.max_abs() > 0.0);
    const auto rep = ancona_decompose(u, {1, 2.0, 0.0}, c.cutoffs);
    CHECK(rep.nonnegative_within_tolerance());
    CHECK(rep.min_u1 >= -rep.tau_glob);
    CHECK(rep.min_u2 >= -rep.tau_glob);
    CHECK(rep.identity_residual < 1e-12 * u.max_abs());
    CHECK(max_abs_difference(rep.u1 - rep.u2, u) < 1e-12 * u.max_abs());
    CHECK(std::isfinite(rep.c));
    CHECK(rep.majorization_margin >= -rep.tau_glob);
    CHECK(rep.tau_ker < 1e-6);
    cs[r] = rep.c;
  }
  // Frozen observations (smooth_step cutoffs, discrete Laplacian symbol).
  CHECK(cs[0] == doctest::Approx(2.961411).epsilon(1e-6));
  CHECK(cs[1] == doctest::Approx(3.213115).epsilon(1e-6));
  CHECK(cs[1] / cs[0] <= 2.0);
  CHECK(cs[1] / cs[0] >= 0.5);
}

TEST_CASE("2-D decomposition keeps both parts nonnegative") {
  for (auto kind : {DomainKind::ball, DomainKind::l_shape}) {
    const auto c = make(kind, 2, 1.0 / 32);
    for (int m = 1; m <= 2; ++m) {
      const auto u = random_u(c, 9, m);
      const auto rep = ancona_decompose(u, {m, 2.0, 0.0}, c.cutoffs);
      CHECK(rep.nonnegative_within_tolerance());
      CHECK(rep.identity_residual <= 1e-12 * u.max_abs());
      if (rep.uncovered_fraction > 0.05) CHECK_FALSE(rep.warnings.empty());
      for (const auto& piece : rep.majorant->pieces)
        if (!piece.zero) CHECK(piece.margin >= -piece.tau_pos);
    }
  }
}

TEST_CASE("majorant reuse and worker count do not change results") {
  const auto c = make(DomainKind::ball, 2, 1.0 / 32);
  const auto u = random_u(c, 4, 2);
  MajorantOptions one, many;
  one.workers = 1;
  many.workers = 4;
  const auto a = build_majorant(u, 2, c.cutoffs, one);
  const auto b = build_majorant(u, 2, c.cutoffs, many);
  CHECK(testing::max_abs_diff(a->v.values(), b->v.values()) == 0.0);
  for (double p : {1.5, 3.0}) {
    const auto fresh = ancona_decompose(u, {2, p, 0.0}, c.cutoffs);
    const auto reused = decompose_with_majorant(u, {2, p, 0.0}, c.cutoffs, a);
    CHECK(fresh.c == reused.c);
    CHECK(testing::max_abs_diff(fresh.u1.values(), reused.u1.values()) == 0.0);
  }
}

TEST_CASE("homogeneity in the field") {
  const auto c = make(DomainKind::interval, 1, 1.0 / 128);
  const auto u = random_u(c, 2, 2);
  const auto base = ancona_decompose(u, {2, 2.0, 0.0}, c.cutoffs);
  for (double lambda : {0.5, 3.0}) {
    const auto r = ancona_decompose(lambda * u, {2, 2.0, 0.0}, c.cutoffs);
    CHECK(testing::max_abs_diff(r.u1.values(), (lambda * base.u1).values()) <= 1e-12 * lambda * base.u1.max_abs());
    CHECK(testing::max_abs_diff(r.u2.values(), (lambda * base.u2).values()) <= 1e-12 * lambda * base.u2.max_abs());
    CHECK(r.c == doctest::Approx(base.c).epsilon(1e-12));
  }
}

TEST_CASE("decomposition errors") {
  const auto c = make(DomainKind::interval, 1, 1.0 / 64);
  const auto u = random_u(c, 1, 1);
  CHECK_THROWS_AS(ancona_decompose(u, {1, 1.0, 0.0}, c.cutoffs), InvalidArgument);
  CHECK_THROWS_AS(ancona_decompose(u, {0, 2.0, 0.0}, c.cutoffs), InvalidArgument);
  const auto one = testing::sample("const:1", c.spec, c.domain);
  CHECK_THROWS_AS(ancona_decompose(one, {1, 2.0, 0.0}, c.cutoffs), HypothesisViolation);
  try {
    ancona_decompose(one, {1, 2.0, 0.0}, c.cutoffs);
  } catch (const HypothesisViolation& e) {
    CHECK(std::string(e.what()).find("Hardy") != std::string::npos);
  }
  GridFunction outside = u;
  outside[0] = 1.0;
  CHECK_THROWS_AS(ancona_decompose(outside, {1, 2.0, 0.0}, c.cutoffs), InvalidArgument);
  const auto other = make(DomainKind::interval, 1, 1.0 / 32);
  CHECK_THROWS_AS(ancona_decompose(random_u(other, 1, 1), {1, 2.0, 0.0}, c.cutoffs), InvalidArgument);
}

TEST_CASE("chain report: the k = m line matches the per-cube bounds") {
  const auto c = make(DomainKind::interval, 1, 1.0 / 128);
  for (int m = 1; m <= 2; ++m) {
    const auto u = random_u(c, 3, m);
    const auto rep = ancona_decompose(u, {m, 2.0, 0.0}, c.cutoffs);
    const auto chain = seminorm_chain_report(u, rep, c.cutoffs);
    REQUIRE(chain.size() == std::size_t(m + 1));
    double v_sum = 0.0, u_sum = 0.0;
    for (const auto& rec : rep.cubes)
      if (!rec.bound.skipped) {
        v_sum += std::pow(rec.bound.grad_m_v, 2.0);
        u_sum += std::pow(rec.bound.grad_m_u, 2.0);
      }
    const auto& top = chain.back();
    CHECK(top.k == m);
    CHECK(top.lines[3] == doctest::Approx(v_sum).epsilon(1e-10));
    CHECK(top.lines[4] == doctest::Approx(u_sum).epsilon(1e-10));
    CHECK(top.lines[2] == doctest::Approx(top.lines[3]).epsilon(1e-12));
    for (const auto& row : chain) {
      for (double l : row.lines) CHECK(std::isfinite(l));
      CHECK(std::isfinite(row.implied));
      CHECK(row.implied == doctest::Approx(row.lines[0] / row.lines[6]));
    }
  }
}

TEST_CASE("interpolation check") {
  auto bump = [](int cells) {
    const int n = 2 * cells + 1;
    std::vector<double> v(n, 0.0);
    for (int i = cells / 2; i <= cells / 2 + cells; ++i) v[i] = std::pow(std::sin(M_PI * (i - cells / 2) / cells), 2);
    return v;
  };
  const GridGeometry g{1, {1, 1, 1}, 1.0 / 128, {}};
  double a[2];
  for (int r = 0; r < 2; ++r) {
    const int cells = r == 0 ? 32 : 16;
    const auto v = bump(cells);
    const IndexBox w{{0, 0, 0}, {int(v.size()), 1, 1}};
    CHECK(*interpolation_check(v, w, g, cells / 128.0, 2.0, 1, 1) == 1.0);
    CHECK(*interpolation_check(v, w, g, cells / 128.0, 2.0, 2, 2) == 1.0);
    a[r] = *interpolation_check(v, w, g, cells / 128.0, 2.0, 0, 1);
  }
  CHECK(std::abs(a[1] / a[0] - 1.0) <= 0.10);
  CHECK(a[1] == doctest::Approx(0.282530).epsilon(1e-5));
  const std::vector<double> zero(9, 0.0);
  CHECK_FALSE(interpolation_check(zero, IndexBox{{0, 0, 0}, {9, 1, 1}}, g, 0.05, 2.0, 0, 1).has_value());
  CHECK_THROWS_AS(interpolation_check(zero, IndexBox{{0, 0, 0}, {9, 1, 1}}, g, 0.05, 2.0, 2, 1), InvalidArgument);
}

TEST_CASE("maximum piece ratio is stable under refinement") {
  for (int m = 1; m <= 2; ++m) {
    double r[2];
    for (int k = 0; k < 2; ++k) {
      const auto c = make(DomainKind::interval, 1, k == 0 ? 1.0 / 128 : 1.0 / 256);
      r[k] = ancona_decompose(random_u(c, 1, m), {m, 2.0, 0.0}, c.cutoffs).max_piece_ratio;
    }
    CHECK(r[1] / r[0] <= 2.0);
    CHECK(r[1] / r[0] >= 0.5);
  }
}

TEST_CASE("compact-support approximation") {
  const auto c = make(DomainKind::interval, 1, 1.0 / 256);
  const auto u = testing::sample("dpow:2", c.spec, c.domain);
  double prev = std::numeric_limits<double>::infinity();
  for (int n = 2; n <= 6; ++n) {
    const auto a = approximate_compact_support(u, {1, 2.0, 0.0}, c.cutoffs, n);
    CHECK(a.relative_error <= prev);
    CHECK(a.generation_cutoff == n);
    prev = a.relative_error;
  }
  CHECK(prev < 0.10);

  // u_n = u * S_n / S with S the sum of all cutoffs.
  const auto v = random_u(c, 5, 1);
  const auto a = approximate_compact_support(v, {1, 2.0, 0.0}, c.cutoffs, 4);
  const auto& w = c.cutoffs.decomposition();
  const auto& g = c.domain->geometry();
  for (std::size_t i = 0; i < g.size(); ++i) {
    double s = 0.0, sn = 0.0;
    for (int q = 0; q < int(w.cubes.size()); ++q) {
      const double e = c.cutoffs.inner(q, g.unravel(i));
      s += e;
      if (w.cubes[q].generation <= 4) sn += e;
    }
    REQUIRE(a.u_n[i] == doctest::Approx(s > 0.0 ? v[i] * sn / s : 0.0).epsilon(1e-14));
  }

  const auto one = testing::sample("const:1", c.spec, c.domain);
  CHECK_THROWS_AS(approximate_compact_support(one, {1, 2.0, 0.0}, c.cutoffs, 4), HypothesisViolation);
}
