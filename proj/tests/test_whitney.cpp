#include <doctest.h>

#include <cmath>
#include <map>
#include <memory>

#include "posdecomp/cutoff.hpp"
#include "posdecomp/error.hpp"
#include "posdecomp/whitney.hpp"
#include "support.hpp"

using namespace posdecomp;
using testing::gallery;

namespace {

/// Brute-force number of dilated cubes containing each point.
int brute_overlap(const WhitneyDecomposition& w, Dilation dil) {
  const auto& g = w.domain->geometry();
  int best = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = g.unravel(i);
    int n = 0;
    for (const auto& q : w.cubes) n += in_dilated_cube(q, x, dil) ? 1 : 0;
    best = std::max(best, n);
  }
  return best;
}

}  // namespace

TEST_CASE("the interval cube [3/8, 5/8] is a Whitney cube") {
  CHECK(satisfies_whitney(0.25, 0.375));
  CHECK_FALSE(satisfies_whitney(0.25, 0.2));
  CHECK_FALSE(satisfies_whitney(0.25, 1.01));
  WhitneyCube q;
  q.generation = 2;
  q.first = {24, 0, 0};
  q.cells = 16;
  q.side = 0.25;
  q.dist = 0.375;
  q.dist_sq_index = 24 * 24;
  q.ndim = 1;
  CHECK(q.diam() == 0.25);
  CHECK(q.whitney_ok());
  q.dist_sq_index = 15 * 15;
  CHECK_FALSE(q.whitney_ok());
  q.dist_sq_index = 65 * 65;
  CHECK_FALSE(q.whitney_ok());
}

TEST_CASE("interval decomposition at h = 1/64") {
  auto d = build_domain(gallery(DomainKind::interval, 1, 1.0 / 64));
  const auto w = whitney_decompose(d);
  CHECK(w.root_cells == 64);
  // [1/4, 1/2): l = 1/4, dist = 1/4.
  bool found = false;
  for (const auto& q : w.cubes)
    if (q.first[0] == 16 && q.cells == 16) {
      found = true;
      CHECK(q.generation == 2);
      CHECK(q.dist == doctest::Approx(0.25));
    }
  CHECK(found);
}

TEST_CASE("every cube satisfies both inequalities and cubes are disjoint") {
  for (auto kind : {DomainKind::box, DomainKind::ball, DomainKind::annulus, DomainKind::l_shape, DomainKind::cusp,
                    DomainKind::punctured_box, DomainKind::slit_box}) {
    auto d = build_domain(gallery(kind, 2, 1.0 / 64));
    const auto w = whitney_decompose(d);
    const auto& g = d->geometry();
    std::vector<int> hits(g.size(), 0);
    for (std::size_t c = 0; c < w.cubes.size(); ++c) {
      const auto& q = w.cubes[c];
      REQUIRE(q.whitney_ok());
      REQUIRE(satisfies_whitney(q.diam(), q.dist * (1 + 1e-12)));
      for (std::size_t i = 0; i < g.size(); ++i)
        if (q.contains(g.unravel(i))) {
          ++hits[i];
          REQUIRE(d->interior(i));
          REQUIRE(w.owner[i] == int(c));
        }
    }
    std::size_t uncovered = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      REQUIRE(hits[i] <= 1);
      if (d->interior(i) && hits[i] == 0) ++uncovered;
    }
    CHECK(uncovered == w.uncovered_points);
    CHECK(w.uncovered_fraction == doctest::Approx(double(uncovered) / d->interior_count()));
  }
}

TEST_CASE("cubes are sorted and sides are dyadic") {
  auto d = build_domain(gallery(DomainKind::ball, 2, 1.0 / 64));
  const auto w = whitney_decompose(d);
  CHECK(w.root_cells == 64);
  for (std::size_t c = 0; c < w.cubes.size(); ++c) {
    const auto& q = w.cubes[c];
    CHECK(q.cells * (1 << q.generation) == w.root_cells);
    CHECK(q.side == doctest::Approx(std::ldexp(1.0, -q.generation)));
    if (c > 0) CHECK(w.cubes[c - 1].generation <= q.generation);
  }
}

TEST_CASE("overlap counts") {
  auto d = build_domain(gallery(DomainKind::interval, 1, 1.0 / 128));
  const auto w = whitney_decompose(d);
  CHECK(overlap_count(w, Dilation::one) == 1);
  CHECK(overlap_count(w, Dilation::four_thirds) <= 3);
  CHECK(overlap_count(w, Dilation::four_thirds) == brute_overlap(w, Dilation::four_thirds));
  CHECK(w.overlap_four_thirds == overlap_count(w, Dilation::four_thirds));

  int at[2];
  for (int r = 0; r < 2; ++r) {
    auto sq = build_domain(gallery(DomainKind::box, 2, r == 0 ? 1.0 / 32 : 1.0 / 64));
    const auto ws = whitney_decompose(sq);
    at[r] = overlap_count(ws, Dilation::five_thirds);
    CHECK(at[r] == brute_overlap(ws, Dilation::five_thirds));
    CHECK(overlap_count(ws, Dilation::four_thirds) <= 12);
  }
  CHECK(at[0] == at[1]);
}

TEST_CASE("scaling the domain by 2 doubles the sides") {
  auto a = build_domain(gallery(DomainKind::l_shape, 2, 1.0 / 32));
  auto b = build_domain(gallery(DomainKind::l_shape, 2, 1.0 / 16, 2.0));
  const auto wa = whitney_decompose(a), wb = whitney_decompose(b);
  REQUIRE(wa.cubes.size() == wb.cubes.size());
  for (std::size_t c = 0; c < wa.cubes.size(); ++c) {
    CHECK(wa.cubes[c].first == wb.cubes[c].first);
    CHECK(wa.cubes[c].cells == wb.cubes[c].cells);
    CHECK(wb.cubes[c].side == doctest::Approx(2 * wa.cubes[c].side));
    CHECK(wb.cubes[c].dist == doctest::Approx(2 * wa.cubes[c].dist));
  }
  CHECK(wa.uncovered_points == wb.uncovered_points);
}

TEST_CASE("coarse minimum side leaves more uncovered") {
  auto d = build_domain(gallery(DomainKind::box, 2, 1.0 / 64));
  const auto fine = whitney_decompose(d, 2), coarse = whitney_decompose(d, 8);
  CHECK(coarse.uncovered_fraction > fine.uncovered_fraction);
  for (const auto& q : coarse.cubes) CHECK(q.cells >= 8);
  CHECK_THROWS_AS(whitney_decompose(d, 1), InvalidArgument);
}

TEST_CASE("dilated boxes") {
  auto d = build_domain(gallery(DomainKind::box, 2, 1.0 / 64));
  const auto w = whitney_decompose(d);
  const auto& g = d->geometry();
  for (const auto& q : w.cubes) {
    const auto box = dilated_box(q, Dilation::five_thirds, g);
    std::size_t inside = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto x = g.unravel(i);
      if (!in_dilated_cube(q, x, Dilation::five_thirds)) continue;
      ++inside;
      for (int a = 0; a < 2; ++a) {
        REQUIRE(x[a] >= box.first[a]);
        REQUIRE(x[a] < box.first[a] + box.shape[a]);
      }
      REQUIRE(in_dilated_cube(q, x, Dilation::five_thirds));
    }
    CHECK(inside == box.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto x = g.unravel(i);
      if (q.contains(x)) REQUIRE(in_dilated_cube(q, x, Dilation::four_thirds));
      if (in_dilated_cube(q, x, Dilation::four_thirds)) REQUIRE(in_dilated_cube(q, x, Dilation::five_thirds));
    }
  }
}

TEST_CASE("cutoff profiles") {
  const auto s = CutoffProfile::smooth_step();
  const auto e = CutoffProfile::exp_shell();
  for (const auto& p : {s, e}) {
    CHECK(p.transition(0.0) == 1.0);
    CHECK(p.transition(1.0) == 0.0);
    for (int i = 1; i < 100; ++i) CHECK(p.transition(i / 100.0) >= p.transition((i + 1) / 100.0));
  }
  CHECK(s.transition(0.5) == doctest::Approx(0.5));
  CHECK(e.transition(0.5) == doctest::Approx(std::exp(1.0 - 1.0 / 0.75)));
  CHECK(e.transition(0.5) == doctest::Approx(std::exp(-1.0 / 3)));
  CHECK(reference_cutoff(e, 7.0 / 6, kInnerRadius, kMiddleRadius) == doctest::Approx(0.7165313106));
  CHECK(reference_cutoff(s, 0.5, 1.0, 4.0 / 3) == 1.0);
  CHECK(reference_cutoff(s, 1.5, 1.0, 4.0 / 3) == 0.0);
  CHECK(CutoffProfile::by_name("exp_shell").name == "exp_shell");
  CHECK_THROWS_AS(CutoffProfile::by_name("box"), InvalidArgument);
}

TEST_CASE("an invalid profile is rejected") {
  auto d = build_domain(gallery(DomainKind::interval, 1, 1.0 / 32));
  const auto w = whitney_decompose(d);
  CutoffProfile bad{"bad", [](double t) { return 1.5 - t; }};
  CHECK_THROWS_AS(build_cutoffs(w, bad), InvalidArgument);
}

TEST_CASE("cutoff family invariants on every cube") {
  for (auto kind : {DomainKind::interval, DomainKind::ball}) {
    const int n = kind == DomainKind::interval ? 1 : 2;
    auto d = build_domain(gallery(kind, n, 1.0 / 64));
    const auto fam = build_cutoffs(whitney_decompose(d));
    const auto& w = fam.decomposition();
    const auto& g = d->geometry();
    for (int c = 0; c < int(w.cubes.size()); ++c) {
      const auto& q = w.cubes[c];
      const auto eta = fam.inner_function(c);
      const auto outer = fam.outer_function(c);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.unravel(i);
        REQUIRE(eta[i] >= 0.0);
        REQUIRE(eta[i] <= 1.0);
        if (q.contains(x)) REQUIRE(eta[i] == 1.0);
        if (!in_dilated_cube(q, x, Dilation::four_thirds)) REQUIRE(eta[i] == 0.0);
        if (in_dilated_cube(q, x, Dilation::four_thirds)) REQUIRE(outer[i] == 1.0);
        if (!in_dilated_cube(q, x, Dilation::five_thirds)) REQUIRE(outer[i] == 0.0);
        REQUIRE(eta[i] == fam.inner(c, x));
      }
    }
  }
}

TEST_CASE("cube restriction") {
  auto spec = gallery(DomainKind::box, 2, 1.0 / 32);
  auto d = build_domain(spec);
  const auto fam = build_cutoffs(whitney_decompose(d));
  const auto one = testing::sample("const:1", spec, d);
  const auto u = testing::sample("random:4", spec, d);
  GridFunction sum_pieces(d), u_times_sum(d);
  for (int c = 0; c < int(fam.decomposition().cubes.size()); ++c) {
    CHECK(cube_restrict(GridFunction(d), c, fam).max_abs() == 0.0);
    const auto eta = fam.inner_function(c);
    CHECK(testing::max_abs_diff(cube_restrict(one, c, fam).values(), eta.values()) == 0.0);
    sum_pieces += cube_restrict(u, c, fam);
    GridFunction e = eta;
    for (std::size_t i = 0; i < e.size(); ++i) e[i] *= u[i];
    u_times_sum += e;
  }
  CHECK(max_abs_difference(sum_pieces, u_times_sum) <= 1e-14);
}
