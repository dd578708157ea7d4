#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"
#include "posdecomp/domain.hpp"
#include "posdecomp/fields.hpp"
#include "posdecomp/grid.hpp"

namespace posdecomp::cli {

/// Parses argv (`posdecomp <command> [--config FILE] [--key value ...]`), runs the command
/// and maps errors to exit codes: 0 success, 1 hypothesis or invariant violation,
/// 2 configuration or input-format error.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Runs a validated configuration. Returns 0 or 1 (verify failures); throws on errors.
int run(const RunConfig& config, std::ostream& out);

/// Same mapping as main_entry for an already assembled configuration.
int run_guarded(const RunConfig& config, std::ostream& out, std::ostream& err);

struct Problem {
  DomainSpec spec;
  DomainPtr domain;
  GridFunction u;
  std::string field_label;
};

DomainSpec domain_spec(const RunConfig& config);
/// Domain plus the field named by `field`/`input_field`/`seed`.
Problem load_problem(const RunConfig& config);

/// "kind[:ndim]" gallery entry; ndim defaults to the configured one.
DomainSpec parse_gallery_entry(const std::string& entry, const RunConfig& config);

/// Output file path: out_prefix + name, creating parent directories.
std::string output_path(const RunConfig& config, const std::string& name);

}  // namespace posdecomp::cli
