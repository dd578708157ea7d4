#include "posdecomp/derivatives.hpp"

#include <cmath>

#include "posdecomp/error.hpp"

namespace posdecomp {

namespace {

// Centered second-order stencil for the a-th derivative on a unit grid, offsets -r..r.
std::vector<double> centered_stencil(int a) {
  std::vector<double> s{1.0};
  auto compose = [&s](const std::vector<double>& t) {
    std::vector<double> out(s.size() + t.size() - 1, 0.0);
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < t.size(); ++j) out[i + j] += s[i] * t[j];
    s = std::move(out);
  };
  for (int i = 0; i < a / 2; ++i) compose({1.0, -2.0, 1.0});
  if (a % 2 == 1) compose({-0.5, 0.0, 0.5});
  return s;
}

void apply_axis(const std::vector<double>& in, std::vector<double>& out, const GridGeometry& g,
                int axis, int order) {
  const auto stencil = centered_stencil(order);
  const int r = static_cast<int>(stencil.size() / 2);
  const double scale = 1.0 / std::pow(g.spacing, order);
  const std::size_t stride = axis == 0 ? static_cast<std::size_t>(g.shape[1]) * g.shape[2]
                             : axis == 1 ? static_cast<std::size_t>(g.shape[2])
                                         : 1;
  const int n = g.shape[axis];
  out.assign(in.size(), 0.0);
  for (std::size_t idx = 0; idx < in.size(); ++idx) {
    const int pos = static_cast<int>((idx / stride) % n);
    double acc = 0.0;
    for (int o = -r; o <= r; ++o) {
      const double w = stencil[o + r];
      if (w == 0.0) continue;
      const int q = pos + o;
      if (q < 0 || q >= n) continue;  // zero extension
      acc += w * in[idx + static_cast<std::ptrdiff_t>(o) * static_cast<std::ptrdiff_t>(stride)];
    }
    out[idx] = acc * scale;
  }
}

}  // namespace

std::vector<MultiIndex> multi_indices(int ndim, int k) {
  std::vector<MultiIndex> out;
  if (k < 0) return out;
  if (ndim == 1) {
    out.push_back({k, 0, 0});
  } else if (ndim == 2) {
    for (int a = k; a >= 0; --a) out.push_back({a, k - a, 0});
  } else {
    for (int a = k; a >= 0; --a)
      for (int b = k - a; b >= 0; --b) out.push_back({a, b, k - a - b});
  }
  return out;
}

double multinomial(const MultiIndex& alpha, int ndim) {
  int k = 0;
  double denom = 1.0;
  for (int a = 0; a < ndim; ++a) {
    k += alpha[a];
    denom *= std::tgamma(alpha[a] + 1.0);
  }
  return std::tgamma(k + 1.0) / denom;
}

std::vector<double> partial_derivative(std::span<const double> values, const GridGeometry& g,
                                       const MultiIndex& alpha) {
  std::vector<double> cur(values.begin(), values.end());
  std::vector<double> tmp;
  for (int axis = 0; axis < g.ndim; ++axis) {
    if (alpha[axis] == 0) continue;
    apply_axis(cur, tmp, g, axis, alpha[axis]);
    cur.swap(tmp);
  }
  return cur;
}

std::vector<double> gradient_magnitude(std::span<const double> values, const GridGeometry& g, int k) {
  if (k < 0) throw InvalidArgument("derivative order must be nonnegative");
  std::vector<double> acc(values.size(), 0.0);
  if (k == 0) {
    for (std::size_t i = 0; i < values.size(); ++i) acc[i] = std::abs(values[i]);
    return acc;
  }
  for (const auto& alpha : multi_indices(g.ndim, k)) {
    const double w = multinomial(alpha, g.ndim);
    const auto d = partial_derivative(values, g, alpha);
    for (std::size_t i = 0; i < d.size(); ++i) acc[i] += w * d[i] * d[i];
  }
  for (double& a : acc) a = std::sqrt(a);
  return acc;
}

GridFunction MultiIndexGradient::magnitude() const {
  if (components.empty()) throw InvalidArgument("empty gradient");
  const auto& dom = components.front().domain_ptr();
  const int ndim = dom->ndim();
  std::vector<double> acc(dom->size(), 0.0);
  for (std::size_t c = 0; c < components.size(); ++c) {
    const double w = order == 0 ? 1.0 : multinomial(indices[c], ndim);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * components[c][i] * components[c][i];
  }
  for (double& a : acc) a = std::sqrt(a);
  return GridFunction(dom, std::move(acc));
}

MultiIndexGradient gradient(const GridFunction& u, int k) {
  if (k < 0) throw InvalidArgument("derivative order must be nonnegative");
  MultiIndexGradient out;
  out.order = k;
  out.indices = multi_indices(u.domain().ndim(), k);
  for (const auto& alpha : out.indices)
    out.components.emplace_back(u.domain_ptr(), partial_derivative(u.values(), u.domain().geometry(), alpha));
  return out;
}

}  // namespace posdecomp
