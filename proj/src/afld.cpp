#include "posdecomp/afld.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "posdecomp/error.hpp"

namespace posdecomp {

namespace {

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

double to_double(const std::string& s, int line) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw FormatError("malformed number '" + s + "'", line);
  return v;
}

int to_int(const std::string& s, int line) {
  int v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw FormatError("malformed integer '" + s + "'", line);
  return v;
}

std::vector<std::string> header_line(std::istream& in, int line, std::string_view expected_key) {
  std::string text;
  if (!std::getline(in, text))
    throw FormatError("unexpected end of file, expected '" + std::string(expected_key) + "'", line);
  auto t = tokens(text);
  if (t.empty() || t[0] != expected_key)
    throw FormatError("expected '" + std::string(expected_key) + "'", line);
  return t;
}

std::filesystem::path temp_sibling(const std::filesystem::path& path) {
  std::random_device rd;
  auto name = path.filename().string() + ".tmp" + std::to_string(rd());
  return path.parent_path() / name;
}

}  // namespace

AfldField read_afld(std::istream& in) {
  AfldField f;
  {
    std::string text;
    if (!std::getline(in, text)) throw FormatError("empty file", 1);
    const auto t = tokens(text);
    if (t.size() != 2 || t[0] != "AFLD" || t[1] != "1") throw FormatError("expected header 'AFLD 1'", 1);
  }
  auto& g = f.geometry;
  {
    const auto t = header_line(in, 2, "ndim");
    if (t.size() < 3) throw FormatError("missing ndim or extents", 2);
    g.ndim = to_int(t[1], 2);
    if (g.ndim < 1 || g.ndim > 3) throw FormatError("ndim must be 1, 2 or 3", 2);
    if (int(t.size()) != 2 + g.ndim) throw FormatError("expected " + std::to_string(g.ndim) + " extents", 2);
    for (int a = 0; a < g.ndim; ++a) {
      g.shape[a] = to_int(t[2 + a], 2);
      if (g.shape[a] < 1) throw FormatError("extents must be positive", 2);
    }
  }
  {
    const auto t = header_line(in, 3, "spacing");
    if (t.size() != 2) throw FormatError("expected 'spacing h'", 3);
    g.spacing = to_double(t[1], 3);
    if (!(g.spacing > 0.0)) throw FormatError("spacing must be positive", 3);
  }
  {
    const auto t = header_line(in, 4, "origin");
    if (int(t.size()) != 1 + g.ndim) throw FormatError("expected " + std::to_string(g.ndim) + " origin coordinates", 4);
    for (int a = 0; a < g.ndim; ++a) g.origin[a] = to_double(t[1 + a], 4);
  }
  const std::size_t n = g.size();
  f.values.reserve(n);
  std::string text;
  int line = 4;
  while (std::getline(in, text)) {
    ++line;
    for (const auto& tok : tokens(text)) {
      if (f.values.size() == n) throw FormatError("more values than the extents allow", line);
      f.values.push_back(to_double(tok, line));
    }
  }
  if (f.values.size() != n)
    throw FormatError("expected " + std::to_string(n) + " values, found " + std::to_string(f.values.size()),
                      line + 1);
  return f;
}

AfldField read_afld(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  return read_afld(in);
}

void write_afld(std::ostream& out, const GridGeometry& g, std::span<const double> values) {
  if (values.size() != g.size()) throw InvalidArgument("value count does not match the geometry");
  char buf[32];
  auto num = [&](double v) {
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string_view(buf, r.ptr - buf);
  };
  out << "AFLD 1\nndim " << g.ndim;
  for (int a = 0; a < g.ndim; ++a) out << ' ' << g.shape[a];
  out << "\nspacing " << num(g.spacing) << "\norigin";
  for (int a = 0; a < g.ndim; ++a) out << ' ' << num(g.origin[a]);
  out << '\n';
  const std::size_t row = static_cast<std::size_t>(g.shape[g.ndim - 1]);
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << num(values[i]);
    out << ((i + 1) % row == 0 ? '\n' : ' ');
  }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& contents) {
  const auto tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw InvalidArgument("write failed for '" + path.string() + "'");
    }
  }
  std::filesystem::rename(tmp, path);
}

void write_afld_file(const std::filesystem::path& path, const GridGeometry& geometry,
                     std::span<const double> values) {
  std::ostringstream os;
  write_afld(os, geometry, values);
  write_text_atomic(path, os.str());
}

DomainPtr read_mask_domain(const std::filesystem::path& path) {
  auto f = read_afld(path);
  std::vector<std::uint8_t> mask(f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double v = f.values[i];
    if (v != 0.0 && v != 1.0) throw InvalidArgument("mask values must be 0 or 1");
    mask[i] = v == 1.0 ? 1 : 0;
  }
  return std::make_shared<const GridDomain>(f.geometry, std::move(mask), path.filename().string());
}

GridFunction read_field_on(const std::filesystem::path& path, const DomainPtr& domain) {
  auto f = read_afld(path);
  if (!(f.geometry == domain->geometry()))
    throw InvalidArgument("field geometry in '" + path.string() + "' does not match the domain grid");
  return GridFunction(domain, std::move(f.values));
}

}  // namespace posdecomp
