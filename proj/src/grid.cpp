#include "posdecomp/grid.hpp"

#include <algorithm>
#include <cmath>

#include "posdecomp/distance.hpp"
#include "posdecomp/error.hpp"

namespace posdecomp {

double GridGeometry::cell_volume() const noexcept {
  return std::pow(spacing, ndim);
}

void GridGeometry::validate() const {
  if (ndim < 1 || ndim > 3) throw InvalidArgument("ndim must be 1, 2 or 3");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw InvalidArgument("spacing must be positive");
  for (int a = 0; a < 3; ++a) {
    if (shape[a] < 1) throw InvalidArgument("grid extents must be positive");
    if (a >= ndim && shape[a] != 1) throw InvalidArgument("unused axes must have extent 1");
  }
}

GridDomain::GridDomain(GridGeometry geometry, std::vector<std::uint8_t> mask, std::string label)
    : geometry_(geometry), mask_(std::move(mask)), label_(std::move(label)) {
  geometry_.validate();
  if (mask_.size() != geometry_.size()) throw InvalidArgument("mask size does not match grid");
  for (std::size_t i = 0; i < mask_.size(); ++i) {
    if (!mask_[i]) continue;
    mask_[i] = 1;
    ++interior_count_;
    if (geometry_.on_border(geometry_.unravel(i)))
      throw InvalidArgument("interior point on the grid border: the outer layer must be exterior");
  }
  if (interior_count_ == 0) throw InvalidArgument("domain has an empty interior");

  dist_sq_ = squared_distance_transform(mask_, geometry_);
  distance_.resize(dist_sq_.size());
  for (std::size_t i = 0; i < dist_sq_.size(); ++i) {
    distance_[i] = std::sqrt(static_cast<double>(dist_sq_[i])) * geometry_.spacing;
    width_ = std::max(width_, distance_[i]);
  }
}

GridFunction::GridFunction(DomainPtr domain) : domain_(std::move(domain)) {
  if (!domain_) throw InvalidArgument("GridFunction needs a domain");
  values_.assign(domain_->size(), 0.0);
}

GridFunction::GridFunction(DomainPtr domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (!domain_) throw InvalidArgument("GridFunction needs a domain");
  if (values_.size() != domain_->size()) throw InvalidArgument("value count does not match grid");
}

double GridFunction::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridFunction::min() const noexcept {
  return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

bool GridFunction::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool GridFunction::vanishes_outside() const noexcept {
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!domain_->interior(i) && values_[i] != 0.0) return false;
  return true;
}

void GridFunction::zero_exterior() noexcept {
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!domain_->interior(i)) values_[i] = 0.0;
}

namespace {
void require_same_grid(const GridFunction& a, const GridFunction& b) {
  if (a.domain_ptr() != b.domain_ptr() && !(a.domain().geometry() == b.domain().geometry()))
    throw InvalidArgument("grid functions live on different grids");
}
}  // namespace

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  require_same_grid(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  require_same_grid(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double c) noexcept {
  for (double& v : values_) v *= c;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double c, GridFunction a) { return a *= c; }

double max_abs_difference(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace posdecomp
