#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "posdecomp/domain.hpp"

namespace posdecomp::cli {

inline constexpr std::string_view kToolName = "posdecomp";
inline constexpr std::string_view kToolVersion = "1.0.0";

/// Everything a run depends on. Serialized as flat `key = value` lines; lists are
/// comma-separated.
struct RunConfig {
  std::string command = "verify";
  DomainKind domain = DomainKind::interval;
  int ndim = 1;
  double h = 1.0 / 128;
  double scale = 1.0;
  std::string mask;
  /// Field descriptor (see FieldSpec); "random" means random:SEED with exponent m + 1.
  std::string field = "random";
  /// AFLD file on the domain grid; takes precedence over `field`.
  std::string input_field;
  std::uint64_t seed = 1;
  int m = 1;
  double p = 2.0;
  double s = 0.0;
  std::string profile = "smooth_step";
  int min_side_cells = 2;
  double tau_slack = 0.0;
  double tail_threshold = 1e-12;
  double divergence_factor = 1.5;
  double uncovered_warn = 0.05;
  std::string out_prefix = "out/";
  unsigned workers = 0;
  /// Entries "kind[:ndim]".
  std::vector<std::string> sweep_domains{"interval:1", "box:2",          "ball:2",    "annulus:2",
                                         "l_shape:2",  "cusp:2",         "punctured_box:2", "slit_box:2"};
  std::vector<int> sweep_m{1, 2};
  std::vector<double> sweep_p{1.5, 2.0, 3.0};
  std::vector<double> sweep_s{0.0};
  /// Direction of the profile ray through the domain centre.
  std::vector<double> ray{1.0, 0.0, 0.0};

  bool operator==(const RunConfig&) const = default;
};

/// All keys in serialization order (sorted).
const std::vector<std::string>& config_keys();

/// Sets one key from its text form. Throws InvalidArgument on an unknown key or bad value.
void set_config_value(RunConfig& c, std::string_view key, std::string_view value);
std::string get_config_value(const RunConfig& c, std::string_view key);

/// Applies `key = value` lines ('#' starts a comment). Throws FormatError with the line.
void apply_config_text(RunConfig& c, std::string_view text);
RunConfig parse_config_text(std::string_view text);
std::string to_config_text(const RunConfig& c);
std::map<std::string, std::string> config_map(const RunConfig& c);

/// Range checks; throws InvalidArgument.
void validate(const RunConfig& c);

/// Known subcommands.
const std::vector<std::string>& commands();

/// Parses numbers, also accepting a fraction "a/b".
double parse_number(std::string_view text);
/// Shortest round-trip text for a double.
std::string format_number(double v);

}  // namespace posdecomp::cli
