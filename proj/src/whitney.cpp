#include "posdecomp/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "posdecomp/error.hpp"

namespace posdecomp {

double WhitneyCube::diam() const noexcept { return side * std::sqrt(double(ndim)); }

Index3 WhitneyCube::centre_index() const noexcept {
  Index3 c{0, 0, 0};
  for (int a = 0; a < ndim; ++a) c[a] = first[a] + cells / 2;
  return c;
}

bool WhitneyCube::contains(const Index3& i) const noexcept {
  for (int a = 0; a < ndim; ++a)
    if (i[a] < first[a] || i[a] >= first[a] + cells) return false;
  return true;
}

bool WhitneyCube::whitney_ok() const noexcept {
  const std::int64_t d2 = std::int64_t(ndim) * cells * cells;
  return d2 <= dist_sq_index && dist_sq_index <= 16 * d2;
}

namespace {

// Max-norm offset |i - c| over the active axes.
int max_offset(const WhitneyCube& q, const Index3& i) noexcept {
  const Index3 c = q.centre_index();
  int m = 0;
  for (int a = 0; a < q.ndim; ++a) m = std::max(m, std::abs(i[a] - c[a]));
  return m;
}

// Largest integer offset strictly inside the open dilated cube.
int dilated_reach(int cells, Dilation d) noexcept {
  switch (d) {
    case Dilation::four_thirds: return (2 * cells - 1) / 3;
    case Dilation::five_thirds: return (5 * cells - 1) / 6;
    case Dilation::one: break;
  }
  return cells / 2;
}

struct Builder {
  const GridDomain& dom;
  const GridGeometry& g;
  int min_cells;
  std::vector<WhitneyCube> accepted;

  // Min squared distance over the cube's points; -1 if any point is exterior or off-grid,
  // -2 if the cube holds no interior point at all.
  std::int64_t scan(const Index3& first, int cells) const {
    Index3 lo{0, 0, 0}, hi{1, 1, 1};
    for (int a = 0; a < g.ndim; ++a) {
      lo[a] = first[a];
      hi[a] = first[a] + cells;
    }
    bool any_interior = false, all_interior = true;
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (int a = 0; a < g.ndim; ++a)
      if (hi[a] > g.shape[a]) all_interior = false;
    Index3 i;
    for (i[0] = lo[0]; i[0] < std::min(hi[0], g.shape[0]); ++i[0])
      for (i[1] = lo[1]; i[1] < std::min(hi[1], g.shape[1]); ++i[1])
        for (i[2] = lo[2]; i[2] < std::min(hi[2], g.shape[2]); ++i[2]) {
          const std::size_t idx = g.linear(i);
          if (dom.interior(idx)) {
            any_interior = true;
            best = std::min(best, dom.distance_sq_index()[idx]);
          } else {
            all_interior = false;
          }
        }
    if (!any_interior) return -2;
    return all_interior ? best : -1;
  }

  void visit(const Index3& first, int cells, int generation) {
    for (int a = 0; a < g.ndim; ++a)
      if (first[a] >= g.shape[a]) return;
    const std::int64_t d2 = scan(first, cells);
    if (d2 == -2) return;
    if (d2 >= 0) {
      WhitneyCube q;
      q.generation = generation;
      q.first = first;
      q.cells = cells;
      q.ndim = g.ndim;
      q.side = cells * g.spacing;
      q.dist_sq_index = d2;
      q.dist = std::sqrt(double(d2)) * g.spacing;
      for (int a = 0; a < g.ndim; ++a) q.centre[a] = g.origin[a] + g.spacing * (first[a] + 0.5 * cells);
      if (q.whitney_ok()) {
        accepted.push_back(q);
        return;
      }
    }
    const int half = cells / 2;
    if (half < min_cells) return;
    const int children = 1 << g.ndim;
    for (int c = 0; c < children; ++c) {
      Index3 f = first;
      for (int a = 0; a < g.ndim; ++a)
        if (c & (1 << (g.ndim - 1 - a))) f[a] += half;
      visit(f, half, generation + 1);
    }
  }
};

}  // namespace

bool in_dilated_cube(const WhitneyCube& q, const Index3& i, Dilation d) noexcept {
  if (d == Dilation::one) return q.contains(i);
  const int m = max_offset(q, i);
  return d == Dilation::four_thirds ? 3 * m < 2 * q.cells : 6 * m < 5 * q.cells;
}

IndexBox dilated_box(const WhitneyCube& q, Dilation d, const GridGeometry& g) noexcept {
  IndexBox box;
  const Index3 c = q.centre_index();
  const int reach = dilated_reach(q.cells, d);
  for (int a = 0; a < g.ndim; ++a) {
    int lo = d == Dilation::one ? q.first[a] : c[a] - reach;
    int hi = d == Dilation::one ? q.first[a] + q.cells : c[a] + reach + 1;
    lo = std::max(lo, 0);
    hi = std::min(hi, g.shape[a]);
    box.first[a] = lo;
    box.shape[a] = std::max(0, hi - lo);
  }
  return box;
}

int WhitneyDecomposition::max_generation() const noexcept {
  int g = 0;
  for (const auto& q : cubes) g = std::max(g, q.generation);
  return g;
}

WhitneyDecomposition whitney_decompose(const DomainPtr& domain, int min_side_cells) {
  if (!domain) throw InvalidArgument("whitney_decompose: null domain");
  if (min_side_cells < 2) throw InvalidArgument("min_side_cells must be at least 2");
  const auto& g = domain->geometry();

  // The outer layer is exterior, so extent - 1 cells cover every interior point.
  int root = 1;
  for (int a = 0; a < g.ndim; ++a)
    while (root < g.shape[a] - 1) root *= 2;

  Builder b{*domain, g, min_side_cells, {}};
  b.visit(Index3{0, 0, 0}, root, 0);

  std::sort(b.accepted.begin(), b.accepted.end(), [](const WhitneyCube& x, const WhitneyCube& y) {
    return std::tie(x.generation, x.first) < std::tie(y.generation, y.first);
  });

  WhitneyDecomposition d;
  d.domain = domain;
  d.cubes = std::move(b.accepted);
  d.root_cells = root;
  d.min_side_cells = min_side_cells;
  d.owner.assign(g.size(), -1);
  for (int id = 0; id < int(d.cubes.size()); ++id) {
    const auto box = dilated_box(d.cubes[id], Dilation::one, g);
    Index3 i;
    for (i[0] = box.first[0]; i[0] < box.first[0] + box.shape[0]; ++i[0])
      for (i[1] = box.first[1]; i[1] < box.first[1] + box.shape[1]; ++i[1])
        for (i[2] = box.first[2]; i[2] < box.first[2] + box.shape[2]; ++i[2]) {
          auto& o = d.owner[g.linear(i)];
          if (o != -1) throw InvariantViolation("whitney cubes overlap");
          o = id;
        }
  }
  for (std::size_t idx = 0; idx < g.size(); ++idx)
    if (domain->interior(idx) && d.owner[idx] == -1) ++d.uncovered_points;
  d.uncovered_fraction = double(d.uncovered_points) / double(domain->interior_count());
  d.overlap_four_thirds = overlap_count(d, Dilation::four_thirds);
  d.overlap_five_thirds = overlap_count(d, Dilation::five_thirds);
  return d;
}

int overlap_count(const WhitneyDecomposition& decomp, Dilation dilation) {
  const auto& g = decomp.domain->geometry();
  std::vector<int> count(g.size(), 0);
  for (const auto& q : decomp.cubes) {
    const auto box = dilated_box(q, dilation, g);
    Index3 i;
    for (i[0] = box.first[0]; i[0] < box.first[0] + box.shape[0]; ++i[0])
      for (i[1] = box.first[1]; i[1] < box.first[1] + box.shape[1]; ++i[1])
        for (i[2] = box.first[2]; i[2] < box.first[2] + box.shape[2]; ++i[2])
          if (in_dilated_cube(q, i, dilation)) ++count[g.linear(i)];
  }
  return count.empty() ? 0 : *std::max_element(count.begin(), count.end());
}

}  // namespace posdecomp
