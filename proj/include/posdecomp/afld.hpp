#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "posdecomp/grid.hpp"

namespace posdecomp {

/// A field as stored in an "AFLD 1" file:
///
///   AFLD 1
///   ndim n1 [n2 [n3]]
///   spacing h
///   origin o1 ...
///   v v v ...            (row-major, 17 significant digits)
///
/// Mask files use the same layout with values in {0, 1}.
struct AfldField {
  GridGeometry geometry;
  std::vector<double> values;
};

AfldField read_afld(std::istream& in);
AfldField read_afld(const std::filesystem::path& path);
void write_afld(std::ostream& out, const GridGeometry& geometry, std::span<const double> values);

/// Writes to a temporary file next to `path` and renames it into place.
void write_afld_file(const std::filesystem::path& path, const GridGeometry& geometry,
                     std::span<const double> values);

/// Reads a mask file into a GridDomain (values must be 0 or 1).
DomainPtr read_mask_domain(const std::filesystem::path& path);

/// Reads a field file and binds it to `domain`; geometry must match.
GridFunction read_field_on(const std::filesystem::path& path, const DomainPtr& domain);

/// Writes `contents` to `path` atomically (temp file + rename).
void write_text_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace posdecomp
