#include "posdecomp/fields.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "posdecomp/error.hpp"

namespace posdecomp {

namespace {

double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw InvalidArgument("malformed number '" + std::string(s) + "' in " + std::string(what));
  return v;
}

std::uint64_t parse_seed(std::string_view s) {
  std::uint64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw InvalidArgument("malformed seed '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Uniform in [0,1) from the top 53 bits; identical on every platform.
double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// C-infinity step from 0 (t <= 0) to 1 (t >= 1).
double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double envelope_at(const DomainSpec& spec, const GridDomain& dom, std::size_t idx, const Point3& x) {
  if (auto e = domain_envelope(spec, x)) return *e;
  return smooth_step(2.0 * dom.distance()[idx] / std::max(dom.width(), dom.spacing()));
}

}  // namespace

std::string FieldSpec::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::zero: return "zero";
    case Kind::constant: os << "const:" << value; break;
    case Kind::envelope_power: os << "env:" << value; break;
    case Kind::distance_power: os << "dpow:" << value; break;
    case Kind::bump: return "bump";
    case Kind::sine: os << "sin:" << value; break;
    case Kind::random: os << "random:" << seed << ':' << value; break;
  }
  return os.str();
}

FieldSpec parse_field_spec(std::string_view text) {
  const auto parts = split(text, ':');
  const auto head = parts[0];
  FieldSpec f;
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (parts.size() < lo || parts.size() > hi)
      throw InvalidArgument("malformed field spec '" + std::string(text) + "'");
  };
  if (head == "zero") {
    need(1, 1);
    f.kind = FieldSpec::Kind::zero;
  } else if (head == "const") {
    need(2, 2);
    f.kind = FieldSpec::Kind::constant;
    f.value = parse_double(parts[1], "const");
  } else if (head == "env") {
    need(2, 2);
    f.kind = FieldSpec::Kind::envelope_power;
    f.value = parse_double(parts[1], "env");
  } else if (head == "dpow") {
    need(2, 2);
    f.kind = FieldSpec::Kind::distance_power;
    f.value = parse_double(parts[1], "dpow");
  } else if (head == "bump") {
    need(1, 1);
    f.kind = FieldSpec::Kind::bump;
  } else if (head == "sin") {
    need(2, 2);
    f.kind = FieldSpec::Kind::sine;
    f.value = parse_double(parts[1], "sin");
  } else if (head == "random") {
    need(2, 3);
    f.kind = FieldSpec::Kind::random;
    f.seed = parse_seed(parts[1]);
    f.value = parts.size() == 3 ? parse_double(parts[2], "random") : 2.0;
  } else {
    throw InvalidArgument("unknown field kind '" + std::string(head) + "'");
  }
  return f;
}

FieldSpec random_field(std::uint64_t seed, int m) {
  FieldSpec f;
  f.kind = FieldSpec::Kind::random;
  f.seed = seed;
  f.value = m + 1.0;
  return f;
}

std::vector<GaussianTerm> random_gaussians(std::uint64_t seed, int ndim) {
  std::mt19937_64 rng(seed);
  const int count = 3 + static_cast<int>(rng() % 4);
  std::vector<GaussianTerm> terms(count);
  for (int j = 0; j < count; ++j) {
    auto& t = terms[j];
    for (int a = 0; a < ndim; ++a) t.centre[a] = 0.15 + 0.7 * unit(rng);
    t.width = 0.08 + 0.22 * unit(rng);
    t.amplitude = 0.25 + 0.75 * unit(rng);
    // Alternate signs so every field changes sign.
    if (j % 2 == 1) t.amplitude = -t.amplitude;
  }
  return terms;
}

GridFunction sample_field(const FieldSpec& field, const DomainSpec& spec, const DomainPtr& domain) {
  const auto& g = domain->geometry();
  std::vector<GaussianTerm> gaussians;
  if (field.kind == FieldSpec::Kind::random) gaussians = random_gaussians(field.seed, g.ndim);
  const double scale = spec.kind == DomainKind::from_mask_file
                           ? std::max(1.0, double(g.shape[0] - 1)) * g.spacing
                           : spec.scale;

  std::vector<double> vals(g.size(), 0.0);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (!domain->interior(idx)) continue;
    const Point3 x = g.coords(g.unravel(idx));
    Point3 y{0.0, 0.0, 0.0};
    for (int a = 0; a < g.ndim; ++a) y[a] = (x[a] - g.origin[a]) / scale;
    double v = 0.0;
    switch (field.kind) {
      case FieldSpec::Kind::zero:
        break;
      case FieldSpec::Kind::constant:
        v = field.value;
        break;
      case FieldSpec::Kind::envelope_power:
        v = std::pow(envelope_at(spec, *domain, idx, x), field.value);
        break;
      case FieldSpec::Kind::distance_power:
        v = std::pow(domain->distance()[idx], field.value);
        break;
      case FieldSpec::Kind::bump: {
        double r2 = 0.0;
        for (int a = 0; a < g.ndim; ++a) r2 += (y[a] - 0.5) * (y[a] - 0.5);
        const double rad2 = 0.3 * 0.3;
        v = r2 < rad2 ? std::exp(1.0 - 1.0 / (1.0 - r2 / rad2)) : 0.0;
        break;
      }
      case FieldSpec::Kind::sine:
        v = std::sin(2.0 * std::numbers::pi * y[0]) * std::pow(envelope_at(spec, *domain, idx, x), field.value);
        break;
      case FieldSpec::Kind::random: {
        double s = 0.0;
        for (const auto& t : gaussians) {
          double r2 = 0.0;
          for (int a = 0; a < g.ndim; ++a) r2 += (y[a] - t.centre[a]) * (y[a] - t.centre[a]);
          s += t.amplitude * std::exp(-0.5 * r2 / (t.width * t.width));
        }
        v = s * std::pow(envelope_at(spec, *domain, idx, x), field.value);
        break;
      }
    }
    vals[idx] = v;
  }
  return GridFunction(domain, std::move(vals));
}

}  // namespace posdecomp
