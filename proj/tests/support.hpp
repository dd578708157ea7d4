#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "posdecomp/domain.hpp"
#include "posdecomp/fields.hpp"
#include "posdecomp/grid.hpp"

namespace testing {

using namespace posdecomp;

inline DomainSpec gallery(DomainKind kind, int ndim, double h, double scale = 1.0) {
  DomainSpec s;
  s.kind = kind;
  s.ndim = ndim;
  s.spacing = h;
  s.scale = scale;
  return s;
}

inline GridFunction sample(const std::string& field, const DomainSpec& spec, const DomainPtr& d) {
  return sample_field(parse_field_spec(field), spec, d);
}

/// O(n^2) oracle: squared index distance to the nearest exterior point.
inline std::vector<std::int64_t> brute_distance_sq(const std::vector<std::uint8_t>& mask, const GridGeometry& g) {
  std::vector<std::size_t> exterior;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (!mask[i]) exterior.push_back(i);
  std::vector<std::int64_t> out(mask.size(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    const auto a = g.unravel(i);
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (auto e : exterior) {
      const auto b = g.unravel(e);
      std::int64_t s = 0;
      for (int k = 0; k < 3; ++k) s += std::int64_t(a[k] - b[k]) * (a[k] - b[k]);
      best = std::min(best, s);
    }
    out[i] = best;
  }
  return out;
}

/// Random blob mask: union of seeded discs, border forced exterior.
inline std::vector<std::uint8_t> random_blob(std::uint64_t seed, const GridGeometry& g) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int discs = 1 + static_cast<int>(rng() % 5);
  std::vector<std::array<double, 4>> c(discs);
  for (auto& d : c) d = {U(rng) * g.shape[0], U(rng) * g.shape[1], U(rng) * g.shape[2], 2.0 + U(rng) * 0.4 * g.shape[0]};
  std::vector<std::uint8_t> mask(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto a = g.unravel(i);
    if (g.on_border(a)) continue;
    for (const auto& d : c) {
      double r2 = 0.0;
      for (int k = 0; k < g.ndim; ++k) r2 += (a[k] - d[k]) * (a[k] - d[k]);
      if (r2 < d[3] * d[3]) mask[i] = 1;
    }
  }
  return mask;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("posdecomp_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace testing
