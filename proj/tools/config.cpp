#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

#include "posdecomp/cutoff.hpp"
#include "posdecomp/error.hpp"
#include "posdecomp/fields.hpp"

namespace posdecomp::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find(',', start);
    const auto item = trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (!item.empty()) out.emplace_back(item);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
std::string join(const std::vector<T>& v, std::function<std::string(const T&)> f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += f(v[i]);
  }
  return out;
}

template <class Int>
Int parse_integer(std::string_view text) {
  const auto t = trim(text);
  Int v{};
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size() || t.empty())
    throw InvalidArgument("malformed integer '" + std::string(text) + "'");
  return v;
}

std::string quote_free(std::string_view v, std::string_view key) {
  if (v.find('\n') != std::string_view::npos) throw InvalidArgument(std::string(key) + ": value contains a newline");
  return std::string(trim(v));
}

struct Key {
  std::string name;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<Key>& table() {
  static const std::vector<Key> keys = [] {
    std::vector<Key> k;
    auto num = [](auto member) {
      return std::pair{std::function<void(RunConfig&, std::string_view)>(
                           [member](RunConfig& c, std::string_view v) { c.*member = parse_number(v); }),
                       std::function<std::string(const RunConfig&)>(
                           [member](const RunConfig& c) { return format_number(c.*member); })};
    };
    auto str = [](auto member, const char* name) {
      return std::pair{std::function<void(RunConfig&, std::string_view)>(
                           [member, name](RunConfig& c, std::string_view v) { c.*member = quote_free(v, name); }),
                       std::function<std::string(const RunConfig&)>([member](const RunConfig& c) { return c.*member; })};
    };
    auto add = [&](std::string name, auto pr) { k.push_back({std::move(name), pr.first, pr.second}); };

    add("command", str(&RunConfig::command, "command"));
    add("divergence_factor", num(&RunConfig::divergence_factor));
    k.push_back({"domain", [](RunConfig& c, std::string_view v) { c.domain = parse_domain_kind(trim(v)); },
                 [](const RunConfig& c) { return std::string(to_string(c.domain)); }});
    add("field", str(&RunConfig::field, "field"));
    add("h", num(&RunConfig::h));
    add("input_field", str(&RunConfig::input_field, "input_field"));
    add("m", std::pair{std::function<void(RunConfig&, std::string_view)>(
                           [](RunConfig& c, std::string_view v) { c.m = parse_integer<int>(v); }),
                       std::function<std::string(const RunConfig&)>([](const RunConfig& c) { return std::to_string(c.m); })});
    add("mask", str(&RunConfig::mask, "mask"));
    k.push_back({"min_side_cells", [](RunConfig& c, std::string_view v) { c.min_side_cells = parse_integer<int>(v); },
                 [](const RunConfig& c) { return std::to_string(c.min_side_cells); }});
    k.push_back({"ndim", [](RunConfig& c, std::string_view v) { c.ndim = parse_integer<int>(v); },
                 [](const RunConfig& c) { return std::to_string(c.ndim); }});
    add("out_prefix", str(&RunConfig::out_prefix, "out_prefix"));
    add("p", num(&RunConfig::p));
    add("profile", str(&RunConfig::profile, "profile"));
    k.push_back({"ray",
                 [](RunConfig& c, std::string_view v) {
                   c.ray.clear();
                   for (const auto& x : split_list(v)) c.ray.push_back(parse_number(x));
                 },
                 [](const RunConfig& c) { return join<double>(c.ray, format_number); }});
    add("s", num(&RunConfig::s));
    add("scale", num(&RunConfig::scale));
    k.push_back({"seed", [](RunConfig& c, std::string_view v) { c.seed = parse_integer<std::uint64_t>(v); },
                 [](const RunConfig& c) { return std::to_string(c.seed); }});
    k.push_back({"sweep_domains", [](RunConfig& c, std::string_view v) { c.sweep_domains = split_list(v); },
                 [](const RunConfig& c) {
                   return join<std::string>(c.sweep_domains, [](const std::string& x) { return x; });
                 }});
    k.push_back({"sweep_m",
                 [](RunConfig& c, std::string_view v) {
                   c.sweep_m.clear();
                   for (const auto& x : split_list(v)) c.sweep_m.push_back(parse_integer<int>(x));
                 },
                 [](const RunConfig& c) { return join<int>(c.sweep_m, [](const int& x) { return std::to_string(x); }); }});
    k.push_back({"sweep_p",
                 [](RunConfig& c, std::string_view v) {
                   c.sweep_p.clear();
                   for (const auto& x : split_list(v)) c.sweep_p.push_back(parse_number(x));
                 },
                 [](const RunConfig& c) { return join<double>(c.sweep_p, format_number); }});
    k.push_back({"sweep_s",
                 [](RunConfig& c, std::string_view v) {
                   c.sweep_s.clear();
                   for (const auto& x : split_list(v)) c.sweep_s.push_back(parse_number(x));
                 },
                 [](const RunConfig& c) { return join<double>(c.sweep_s, format_number); }});
    add("tail_threshold", num(&RunConfig::tail_threshold));
    add("tau_slack", num(&RunConfig::tau_slack));
    add("uncovered_warn", num(&RunConfig::uncovered_warn));
    k.push_back({"workers", [](RunConfig& c, std::string_view v) { c.workers = parse_integer<unsigned>(v); },
                 [](const RunConfig& c) { return std::to_string(c.workers); }});
    std::sort(k.begin(), k.end(), [](const Key& a, const Key& b) { return a.name < b.name; });
    return k;
  }();
  return keys;
}

const Key& find_key(std::string_view name) {
  for (const auto& k : table())
    if (k.name == name) return k;
  throw InvalidArgument("unknown configuration key '" + std::string(name) + "'");
}

}  // namespace

double parse_number(std::string_view text) {
  const auto t = trim(text);
  auto one = [&](std::string_view s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
      throw InvalidArgument("malformed number '" + std::string(text) + "'");
    return v;
  };
  if (const auto slash = t.find('/'); slash != std::string_view::npos) {
    const double den = one(trim(t.substr(slash + 1)));
    if (den == 0.0) throw InvalidArgument("division by zero in '" + std::string(text) + "'");
    return one(trim(t.substr(0, slash))) / den;
  }
  return one(t);
}

std::string format_number(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& k : table()) n.push_back(k.name);
    return n;
  }();
  return names;
}

void set_config_value(RunConfig& c, std::string_view key, std::string_view value) { find_key(key).set(c, value); }

std::string get_config_value(const RunConfig& c, std::string_view key) { return find_key(key).get(c); }

void apply_config_text(RunConfig& c, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view l = line;
    if (const auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
    l = trim(l);
    if (l.empty()) continue;
    const auto eq = l.find('=');
    if (eq == std::string_view::npos) throw FormatError("expected 'key = value'", number);
    const auto key = trim(l.substr(0, eq));
    try {
      set_config_value(c, key, trim(l.substr(eq + 1)));
    } catch (const InvalidArgument& e) {
      throw FormatError(e.what(), number);
    }
  }
}

RunConfig parse_config_text(std::string_view text) {
  RunConfig c;
  apply_config_text(c, text);
  return c;
}

std::string to_config_text(const RunConfig& c) {
  std::string out;
  for (const auto& k : table()) out += k.name + " = " + k.get(c) + "\n";
  return out;
}

std::map<std::string, std::string> config_map(const RunConfig& c) {
  std::map<std::string, std::string> out;
  for (const auto& k : table()) out[k.name] = k.get(c);
  return out;
}

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"bessel-probe", "decompose", "norms", "sweep", "verify", "whitney"};
  return c;
}

void validate(const RunConfig& c) {
  if (std::find(commands().begin(), commands().end(), c.command) == commands().end())
    throw InvalidArgument("unknown command '" + c.command + "'");
  if (c.ndim < 1 || c.ndim > 3) throw InvalidArgument("ndim must be 1, 2 or 3");
  if (!(c.h > 0.0) || !std::isfinite(c.h)) throw InvalidArgument("h must be positive");
  if (!(c.scale > 0.0) || !std::isfinite(c.scale)) throw InvalidArgument("scale must be positive");
  if (c.domain == DomainKind::from_mask_file && c.mask.empty())
    throw InvalidArgument("domain from_mask_file needs a mask path");
  if (c.m < 0) throw InvalidArgument("m must be >= 0");
  if (!(c.p >= 1.0) || !std::isfinite(c.p)) throw InvalidArgument("p must be >= 1");
  if (!std::isfinite(c.s)) throw InvalidArgument("s must be finite");
  CutoffProfile::by_name(c.profile);
  if (c.field != "random") parse_field_spec(c.field);
  if (c.min_side_cells < 2) throw InvalidArgument("min_side_cells must be >= 2");
  if (!(c.tau_slack >= 0.0) || !std::isfinite(c.tau_slack)) throw InvalidArgument("tau_slack must be >= 0");
  if (!(c.tail_threshold > 0.0) || !(c.tail_threshold < 1.0)) throw InvalidArgument("tail_threshold must lie in (0,1)");
  if (!(c.divergence_factor > 1.0) || !std::isfinite(c.divergence_factor))
    throw InvalidArgument("divergence_factor must be > 1");
  if (!(c.uncovered_warn >= 0.0 && c.uncovered_warn <= 1.0)) throw InvalidArgument("uncovered_warn must lie in [0,1]");
  if (c.out_prefix.empty()) throw InvalidArgument("out_prefix must not be empty");
  if (c.sweep_domains.empty() || c.sweep_m.empty() || c.sweep_p.empty() || c.sweep_s.empty())
    throw InvalidArgument("sweep lists must not be empty");
  for (int m : c.sweep_m)
    if (m < 1) throw InvalidArgument("sweep_m entries must be >= 1");
  for (double p : c.sweep_p)
    if (!(p > 1.0) || !std::isfinite(p)) throw InvalidArgument("sweep_p entries must be > 1");
  for (double s : c.sweep_s)
    if (!std::isfinite(s)) throw InvalidArgument("sweep_s entries must be finite");
  if (c.ray.empty() || c.ray.size() > 3) throw InvalidArgument("ray needs 1 to 3 components");
  double norm = 0.0;
  for (double x : c.ray) norm += x * x;
  if (!(norm > 0.0) || !std::isfinite(norm)) throw InvalidArgument("ray must be a nonzero finite vector");
}

}  // namespace posdecomp::cli
