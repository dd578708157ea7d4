#include "posdecomp/distance.hpp"

#include <cmath>
#include <limits>

#include "posdecomp/error.hpp"

namespace posdecomp {

namespace {

constexpr double kFar = std::numeric_limits<double>::infinity();

// Lower envelope of parabolas (q - p)^2 + f[p] over sites with finite f.
void envelope_1d(const double* f, double* out, int n, std::vector<int>& v, std::vector<double>& z) {
  v.resize(n);
  z.resize(n + 1);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kFar) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kFar;
      z[1] = kFar;
      continue;
    }
    auto meet = [&](int p) {
      return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
    };
    double s = meet(v[k]);
    while (s <= z[k]) {
      --k;
      s = meet(v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kFar;
  }
  if (k < 0) {
    for (int q = 0; q < n; ++q) out[q] = kFar;
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double d = q - v[j];
    out[q] = d * d + f[v[j]];
  }
}

}  // namespace

std::vector<std::int64_t> squared_distance_transform(std::span<const std::uint8_t> mask,
                                                     const GridGeometry& g) {
  g.validate();
  if (mask.size() != g.size()) throw InvalidArgument("mask size does not match grid");
  std::size_t exterior = 0;
  for (auto m : mask) exterior += (m == 0);
  if (exterior == 0) throw InvalidArgument("mask has no exterior point: the boundary is empty");
  if (exterior == mask.size()) throw InvalidArgument("mask has no interior point");

  std::vector<double> field(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) field[i] = mask[i] ? kFar : 0.0;

  std::vector<int> v;
  std::vector<double> z, line_in, line_out;
  const std::size_t stride[3] = {static_cast<std::size_t>(g.shape[1]) * g.shape[2],
                                 static_cast<std::size_t>(g.shape[2]), 1};
  for (int axis = 0; axis < g.ndim; ++axis) {
    const int n = g.shape[axis];
    line_in.resize(n);
    line_out.resize(n);
    for (std::size_t start = 0; start < field.size(); ++start) {
      // Visit each line once, from the point whose index along `axis` is 0.
      if ((start / stride[axis]) % n != 0) continue;
      for (int q = 0; q < n; ++q) line_in[q] = field[start + q * stride[axis]];
      envelope_1d(line_in.data(), line_out.data(), n, v, z);
      for (int q = 0; q < n; ++q) field[start + q * stride[axis]] = line_out[q];
    }
  }

  std::vector<std::int64_t> out(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) out[i] = static_cast<std::int64_t>(field[i]);
  return out;
}

std::vector<double> distance_transform(std::span<const std::uint8_t> mask, const GridGeometry& g) {
  const auto sq = squared_distance_transform(mask, g);
  std::vector<double> d(sq.size());
  for (std::size_t i = 0; i < sq.size(); ++i) d[i] = std::sqrt(static_cast<double>(sq[i])) * g.spacing;
  return d;
}

}  // namespace posdecomp
