#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "posdecomp/afld.hpp"
#include "posdecomp/bessel.hpp"
#include "posdecomp/cutoff.hpp"
#include "posdecomp/decompose.hpp"
#include "posdecomp/error.hpp"
#include "posdecomp/norms.hpp"
#include "posdecomp/whitney.hpp"

namespace posdecomp::cli {

using json = nlohmann::json;

namespace {

constexpr double kKernelTolerance = 1e-6;

json config_json(const RunConfig& c) {
  json j = json::object();
  for (const auto& [k, v] : config_map(c)) j[k] = v;
  return j;
}

json envelope(const RunConfig& c, json result) {
  json j;
  j["schema"] = "report_v1";
  j["tool"] = {{"name", std::string(kToolName)}, {"version", std::string(kToolVersion)}};
  j["command"] = c.command;
  j["config"] = config_json(c);
  j["result"] = std::move(result);
  return j;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

/// Writes name (deterministic) and name-without-.json + ".meta.json" (timestamp).
void write_report(const RunConfig& c, const std::string& name, const json& report) {
  write_text_atomic(output_path(c, name), report.dump(2) + "\n");
  const std::string stem = name.substr(0, name.size() - 5);
  json meta{{"report", name}, {"created_utc", utc_timestamp()}, {"tool_version", std::string(kToolVersion)}};
  write_text_atomic(output_path(c, stem + ".meta.json"), meta.dump(2) + "\n");
}

json probe_json(const DivergenceProbe& p) {
  return {{"available", p.available}, {"coarse", p.coarse}, {"fine", p.fine}, {"factor", p.factor},
          {"ratio", p.available ? json(p.ratio()) : json(nullptr)}, {"diverging", p.diverging()}};
}

json params_json(const SobolevParams& p) { return {{"m", p.m}, {"p", p.p}, {"s", p.s}}; }

json bundle_json(const NormBundle& b) {
  return {{"params", params_json(b.params)},   {"seminorms", b.seminorms},
          {"total", b.total},                  {"hardy", b.hardy},
          {"hardy_probe", probe_json(b.hardy_probe)}, {"hardy_diverging", b.hardy_diverging()}};
}

json field_summary(const GridFunction& f, const std::string& file) {
  return {{"file", file}, {"max_abs", f.max_abs()}, {"min", f.min()}};
}

json geometry_json(const GridGeometry& g) {
  std::vector<int> shape(g.shape.begin(), g.shape.begin() + g.ndim);
  return {{"ndim", g.ndim}, {"shape", shape}, {"spacing", g.spacing}};
}

json decomposition_json(const WhitneyDecomposition& d) {
  std::map<int, int> per_generation;
  bool all_ok = true;
  for (const auto& q : d.cubes) {
    ++per_generation[q.generation];
    all_ok = all_ok && q.whitney_ok();
  }
  json counts = json::object();
  for (const auto& [g, n] : per_generation) counts[std::to_string(g)] = n;
  const int n = d.domain->ndim();
  return {{"cube_count", d.cubes.size()},
          {"counts_per_generation", counts},
          {"uncovered_points", d.uncovered_points},
          {"uncovered_fraction", d.uncovered_fraction},
          {"root_cells", d.root_cells},
          {"min_side_cells", d.min_side_cells},
          {"overlap_four_thirds", d.overlap_four_thirds},
          {"overlap_five_thirds", d.overlap_five_thirds},
          {"overlap_bound_four_thirds", static_cast<int>(std::pow(3, n)) + 1},
          {"all_whitney_ok", all_ok},
          {"geometry", geometry_json(d.domain->geometry())}};
}

json report_json(const DecompositionReport& r, const CutoffFamily& cutoffs) {
  const auto& cubes = cutoffs.decomposition().cubes;
  json records = json::array();
  for (const auto& rec : r.cubes) {
    const auto& q = cubes[rec.cube];
    records.push_back({{"cube", rec.cube},
                       {"generation", rec.generation},
                       {"side", q.side},
                       {"dist", q.dist},
                       {"grad_m_u", rec.bound.grad_m_u},
                       {"grad_m_v", rec.bound.grad_m_v},
                       {"ratio", rec.bound.ratio},
                       {"skipped", rec.bound.skipped},
                       {"tau_pos", rec.tau_pos},
                       {"margin", rec.margin}});
  }
  return {{"params", params_json(r.params)},
          {"u1", field_summary(r.u1, "u1.afld")},
          {"u2", field_summary(r.u2, "u2.afld")},
          {"v", {{"max_abs", r.v.max_abs()}, {"min", r.v.min()}}},
          {"cubes", records},
          {"norms_u", bundle_json(r.norms_u)},
          {"norms_u1", bundle_json(r.norms_u1)},
          {"norms_u2", bundle_json(r.norms_u2)},
          {"c", r.c},
          {"min_u1", r.min_u1},
          {"min_u2", r.min_u2},
          {"majorization_margin", r.majorization_margin},
          {"identity_residual", r.identity_residual},
          {"tau_ker", r.tau_ker},
          {"tau_pos_max", r.tau_pos_max},
          {"tau_glob", r.tau_glob},
          {"overlap_five_thirds", r.overlap_five_thirds},
          {"uncovered_fraction", r.uncovered_fraction},
          {"ring_points", r.ring_points},
          {"max_piece_ratio", r.max_piece_ratio},
          {"hardy_probe", probe_json(r.hardy_probe)},
          {"warnings", r.warnings},
          {"nonnegative_within_tolerance", r.nonnegative_within_tolerance()},
          {"whitney", decomposition_json(cutoffs.decomposition())}};
}

std::string csv_number(double v) { return std::isfinite(v) ? format_number(v) : std::string("nan"); }

DecomposeOptions decompose_options(const RunConfig& c) {
  DecomposeOptions o;
  o.majorant.multiplier.tail_threshold = c.tail_threshold;
  o.majorant.workers = c.workers;
  o.divergence_factor = c.divergence_factor;
  o.uncovered_warn_threshold = c.uncovered_warn;
  o.tau_slack = c.tau_slack;
  return o;
}

SobolevParams params_of(const RunConfig& c) { return {c.m, c.p, c.s}; }

std::shared_ptr<const WhitneyDecomposition> decompose_domain(const RunConfig& c, const DomainPtr& domain) {
  return std::make_shared<const WhitneyDecomposition>(whitney_decompose(domain, c.min_side_cells));
}

// ---- whitney ----

int cmd_whitney(const RunConfig& c, std::ostream& out) {
  const auto domain = build_domain(domain_spec(c));
  const auto d = whitney_decompose(domain, c.min_side_cells);
  const int n = domain->ndim();
  std::ostringstream csv;
  csv << "generation";
  for (int a = 0; a < n; ++a) csv << ",c" << a;
  csv << ",side,dist,diam,ratio\n";
  bool ok = true;
  for (const auto& q : d.cubes) {
    ok = ok && q.whitney_ok();
    csv << q.generation;
    for (int a = 0; a < n; ++a) csv << ',' << format_number(q.centre[a]);
    csv << ',' << format_number(q.side) << ',' << format_number(q.dist) << ',' << format_number(q.diam()) << ','
        << format_number(q.dist / q.diam()) << '\n';
  }
  write_text_atomic(output_path(c, "cubes.csv"), csv.str());
  write_report(c, "whitney.json", envelope(c, decomposition_json(d)));
  out << "cubes " << d.cubes.size() << " uncovered_fraction " << d.uncovered_fraction << " overlap(4/3) "
      << d.overlap_four_thirds << " overlap(5/3) " << d.overlap_five_thirds << '\n';
  if (!ok) throw InvariantViolation("a Whitney cube violates diam <= dist <= 4 diam");
  return 0;
}

// ---- bessel-probe ----

/// Centred window of the kernel (delta at torus index 0) with the multiplier's grid shape.
std::vector<double> centred_kernel(const BesselMultiplier& mult) {
  const auto kernel = mult.delta_response();
  const auto& shape = mult.shape();
  const auto& padded = mult.padded_shape();
  GridGeometry local{mult.ndim(), shape, mult.spacing(), {}};
  GridGeometry torus{mult.ndim(), padded, mult.spacing(), {}};
  std::vector<double> out(local.size());
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    const Index3 i = local.unravel(idx);
    Index3 t{0, 0, 0};
    for (int a = 0; a < 3; ++a) t[a] = ((i[a] - shape[a] / 2) % padded[a] + padded[a]) % padded[a];
    out[idx] = kernel[torus.linear(t)];
  }
  return out;
}

int cmd_bessel_probe(const RunConfig& c, std::ostream& out) {
  if (c.m < 1) throw InvalidArgument("bessel-probe needs m >= 1");
  const auto domain = build_domain(domain_spec(c));
  const auto d = whitney_decompose(domain, c.min_side_cells);
  MultiplierOptions mo;
  mo.tail_threshold = c.tail_threshold;
  MultiplierCache cache(domain->ndim(), c.m, mo);
  std::set<std::pair<int, Index3>> seen;
  for (const auto& q : d.cubes) {
    const auto box = dilated_box(q, Dilation::five_thirds, domain->geometry());
    if (seen.insert({q.cells, box.shape}).second) cache.get(q.cells, box.shape);
  }
  const auto all = cache.all();
  if (all.empty()) throw InvalidArgument("the decomposition has no cubes");
  json list = json::array();
  std::shared_ptr<const BesselMultiplier> widest = all.front();
  for (const auto& mult : all) {
    const auto& cert = mult->certificate();
    std::vector<int> shape(mult->shape().begin(), mult->shape().begin() + mult->ndim());
    std::vector<int> padded(mult->padded_shape().begin(), mult->padded_shape().begin() + mult->ndim());
    list.push_back({{"spacing", mult->spacing()},
                    {"shape", shape},
                    {"padded_shape", padded},
                    {"pad", mult->pad()},
                    {"peak", cert.peak},
                    {"negative_abs", cert.negative_abs},
                    {"tau_ker", cert.tau_ker},
                    {"tail_ratio", cert.tail_ratio},
                    {"doublings", cert.doublings}});
    out << "multiplier h=" << mult->spacing() << " pad=" << mult->pad() << " tau_ker=" << cert.tau_ker
        << " tail=" << cert.tail_ratio << '\n';
    if (mult->shape()[0] > widest->shape()[0]) widest = mult;
  }
  const double tau = cache.max_tau_ker();
  GridGeometry g{widest->ndim(), widest->shape(), widest->spacing(), {0.0, 0.0, 0.0}};
  for (int a = 0; a < g.ndim; ++a) g.origin[a] = -(g.shape[a] / 2) * g.spacing;
  write_afld_file(output_path(c, "kernel.afld"), g, centred_kernel(*widest));
  json result{{"order", c.m},
              {"symbol", "discrete_laplacian"},
              {"multipliers", list},
              {"tau_ker", tau},
              {"tau_ker_tolerance", kKernelTolerance},
              {"kernel_file", "kernel.afld"}};
  write_report(c, "bessel.json", envelope(c, result));
  out << "tau_ker " << tau << '\n';
  if (!(tau < kKernelTolerance)) throw InvariantViolation("kernel negativity exceeds 1e-6 of the peak");
  return 0;
}

// ---- decompose ----

int cmd_decompose(const RunConfig& c, std::ostream& out) {
  const auto problem = load_problem(c);
  const auto cutoffs = CutoffFamily(decompose_domain(c, problem.domain), CutoffProfile::by_name(c.profile));
  const auto report = ancona_decompose(problem.u, params_of(c), cutoffs, decompose_options(c));
  const auto& g = problem.domain->geometry();
  write_afld_file(output_path(c, "u1.afld"), g, report.u1.values());
  write_afld_file(output_path(c, "u2.afld"), g, report.u2.values());
  json result = report_json(report, cutoffs);
  result["field"] = problem.field_label;
  write_report(c, "report.json", envelope(c, result));
  out << "c " << report.c << " min_u1 " << report.min_u1 << " min_u2 " << report.min_u2 << " tau_glob "
      << report.tau_glob << " residual " << report.identity_residual << '\n';
  for (const auto& w : report.warnings) out << "warning: " << w << '\n';
  return 0;
}

// ---- norms ----

int cmd_norms(const RunConfig& c, std::ostream& out) {
  const auto problem = load_problem(c);
  const auto bundle = norm_bundle(problem.u, params_of(c));
  json result = bundle_json(bundle);
  result["field"] = problem.field_label;
  const json report = envelope(c, result);
  write_report(c, "norms.json", report);
  out << report.dump(2) << '\n';
  return 0;
}

// ---- sweep ----

std::string entry_label(const DomainSpec& s) {
  return std::string(to_string(s.kind)) + ":" + std::to_string(s.ndim);
}

std::string file_token(double v) {
  std::string t = format_number(v);
  std::replace(t.begin(), t.end(), '.', 'p');
  std::replace(t.begin(), t.end(), '-', 'm');
  return t;
}

/// Samples u, u1, u2 along the ray from the grid centre.
std::string ray_profile(const RunConfig& c, const DecompositionReport& r, const GridFunction& u) {
  const auto& dom = u.domain();
  const auto& g = dom.geometry();
  std::array<double, 3> dir{0.0, 0.0, 0.0};
  double norm = 0.0;
  for (int a = 0; a < g.ndim && a < static_cast<int>(c.ray.size()); ++a) {
    dir[a] = c.ray[a];
    norm += dir[a] * dir[a];
  }
  if (!(norm > 0.0)) throw InvalidArgument("ray has no component in the domain's dimensions");
  for (double& x : dir) x /= std::sqrt(norm);
  std::ostringstream csv;
  csv << "t,d,u,u1,u2\n";
  for (int step = 0;; ++step) {
    Index3 i{0, 0, 0};
    bool inside = true;
    for (int a = 0; a < g.ndim; ++a) {
      i[a] = static_cast<int>(std::lround(g.shape[a] / 2 + step * dir[a]));
      inside = inside && i[a] >= 0 && i[a] < g.shape[a];
    }
    if (!inside) break;
    const auto idx = g.linear(i);
    csv << format_number(step * g.spacing) << ',' << format_number(dom.distance()[idx]) << ','
        << format_number(u[idx]) << ',' << format_number(r.u1[idx]) << ',' << format_number(r.u2[idx]) << '\n';
  }
  return csv.str();
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
  if (!c.input_field.empty()) throw InvalidArgument("sweep samples analytic fields; input_field is not supported");
  std::ostringstream csv;
  csv << "domain,m,p,s,c,hardy_value,flags,overlap,uncovered_fraction\n";
  json rows = json::array();
  const auto options = decompose_options(c);
  for (const auto& entry : c.sweep_domains) {
    const auto spec = parse_gallery_entry(entry, c);
    const auto domain = build_domain(spec);
    const auto cutoffs = CutoffFamily(decompose_domain(c, domain), CutoffProfile::by_name(c.profile));
    const auto& wd = cutoffs.decomposition();
    const std::string label = entry_label(spec);
    for (int m : c.sweep_m) {
      RunConfig local = c;
      local.m = m;
      const FieldSpec field = c.field == "random" ? random_field(c.seed, m) : parse_field_spec(c.field);
      const auto u = sample_field(field, spec, domain);
      std::shared_ptr<const MajorantField> majorant;
      for (double p : c.sweep_p) {
        for (double s : c.sweep_s) {
          const SobolevParams params{m, p, s};
          std::vector<std::string> flags;
          double cval = std::nan("");
          double hardy = hardy_functional(u, params);
          try {
            if (!majorant) majorant = build_majorant(u, m, cutoffs, options.majorant);
            const auto r = decompose_with_majorant(u, params, cutoffs, majorant, options);
            cval = r.c;
            hardy = r.norms_u.hardy;
            if (!r.nonnegative_within_tolerance()) flags.push_back("negative");
            if (r.uncovered_fraction > c.uncovered_warn) flags.push_back("uncovered");
            if (r.identity_residual > 1e-12 * std::max(1.0, u.max_abs())) flags.push_back("residual");
            const std::string name = "profile_" + std::string(to_string(spec.kind)) + "_" +
                                     std::to_string(spec.ndim) + "d_m" + std::to_string(m) + "_p" + file_token(p) +
                                     "_s" + file_token(s) + ".csv";
            write_text_atomic(output_path(c, name), ray_profile(c, r, u));
          } catch (const HypothesisViolation&) {
            flags.push_back("hardy_diverging");
          }
          std::string flag_text;
          for (const auto& f : flags) flag_text += (flag_text.empty() ? "" : ";") + f;
          if (flag_text.empty()) flag_text = "ok";
          csv << label << ',' << m << ',' << format_number(p) << ',' << format_number(s) << ',' << csv_number(cval)
              << ',' << csv_number(hardy) << ',' << flag_text << ',' << wd.overlap_four_thirds << ','
              << format_number(wd.uncovered_fraction) << '\n';
          rows.push_back({{"domain", label},
                          {"m", m},
                          {"p", p},
                          {"s", s},
                          {"c", std::isfinite(cval) ? json(cval) : json(nullptr)},
                          {"hardy_value", hardy},
                          {"flags", flags},
                          {"overlap", wd.overlap_four_thirds},
                          {"uncovered_fraction", wd.uncovered_fraction}});
          out << label << " m=" << m << " p=" << p << " s=" << s << " c=" << cval << ' ' << flag_text << '\n';
        }
      }
    }
  }
  write_text_atomic(output_path(c, "sweep.csv"), csv.str());
  write_report(c, "sweep.json", envelope(c, json{{"rows", rows}}));
  return 0;
}

// ---- verify ----

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  const auto problem = load_problem(c);
  const auto decomp = decompose_domain(c, problem.domain);
  const auto cutoffs = CutoffFamily(decomp, CutoffProfile::by_name(c.profile));
  const auto report = ancona_decompose(problem.u, params_of(c), cutoffs, decompose_options(c));
  const int n = problem.domain->ndim();
  std::vector<Check> checks;

  std::size_t bad = 0;
  std::size_t cube_points = 0;
  for (const auto& q : decomp->cubes) {
    bad += q.whitney_ok() ? 0 : 1;
    std::size_t vol = 1;
    for (int a = 0; a < n; ++a) vol *= static_cast<std::size_t>(q.cells);
    cube_points += vol;
  }
  checks.push_back({"whitney_inequalities", bad == 0,
                    std::to_string(decomp->cubes.size()) + " cubes, " + std::to_string(bad) + " violations"});
  const auto owned = static_cast<std::size_t>(
      std::count_if(decomp->owner.begin(), decomp->owner.end(), [](int o) { return o >= 0; }));
  checks.push_back({"cube_disjointness", owned == cube_points,
                    std::to_string(cube_points) + " cube points, " + std::to_string(owned) + " owned"});
  const int bound = static_cast<int>(std::pow(3, n)) + 1;
  checks.push_back({"overlap_bound", decomp->overlap_four_thirds <= bound,
                    "overlap(4/3) " + std::to_string(decomp->overlap_four_thirds) + " <= " + std::to_string(bound)});
  checks.push_back({"kernel_probe", report.tau_ker < kKernelTolerance,
                    "tau_ker " + fmt(report.tau_ker) + " < " + fmt(kKernelTolerance)});

  std::size_t piece_fail = 0;
  double worst = std::numeric_limits<double>::infinity();
  if (report.majorant)
    for (const auto& piece : report.majorant->pieces) {
      if (piece.zero) continue;
      if (piece.margin < -piece.tau_pos) ++piece_fail;
      worst = std::min(worst, piece.margin + piece.tau_pos);
    }
  checks.push_back({"majorization_per_cube", piece_fail == 0,
                    std::to_string(piece_fail) + " cubes below -tau_pos, worst slack " + fmt(worst)});
  checks.push_back({"majorization_global", report.majorization_margin >= -report.tau_glob,
                    "margin " + fmt(report.majorization_margin) + " >= -tau_glob " + fmt(-report.tau_glob)});
  checks.push_back({"nonnegativity", report.nonnegative_within_tolerance(),
                    "min u1 " + fmt(report.min_u1) + ", min u2 " + fmt(report.min_u2) + ", tau_glob " +
                        fmt(report.tau_glob)});
  const double split_tol = 1e-12 * std::max({1.0, problem.u.max_abs(), report.u1.max_abs()});
  checks.push_back({"exact_splitting", report.identity_residual <= split_tol,
                    "max|u1 - u2 - u| " + fmt(report.identity_residual) + " <= " + fmt(split_tol)});

  const auto chain = seminorm_chain_report(problem.u, report, cutoffs);
  bool chain_ok = !chain.empty();
  std::string chain_detail;
  for (const auto& row : chain) {
    for (double l : row.lines) chain_ok = chain_ok && std::isfinite(l) && l >= 0.0;
    chain_ok = chain_ok && std::isfinite(row.implied);
    chain_detail += (chain_detail.empty() ? "" : ", ") + std::string("k=") + std::to_string(row.k) +
                    " implied " + fmt(row.implied);
  }
  checks.push_back({"chain_report", chain_ok, chain_detail});

  json list = json::array();
  bool all = true;
  for (const auto& ch : checks) {
    out << (ch.pass ? "PASS " : "FAIL ") << ch.name << ": " << ch.detail << '\n';
    list.push_back({{"name", ch.name}, {"pass", ch.pass}, {"detail", ch.detail}});
    all = all && ch.pass;
  }
  json chain_json = json::array();
  for (const auto& row : chain)
    chain_json.push_back({{"k", row.k}, {"lines", row.lines}, {"steps", row.steps}, {"implied", row.implied}});
  json result{{"checks", list}, {"all_pass", all}, {"chain", chain_json}, {"c", report.c},
              {"field", problem.field_label}};
  write_report(c, "verify.json", envelope(c, result));
  return all ? 0 : 1;
}

std::string dashed(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

DomainSpec domain_spec(const RunConfig& c) {
  DomainSpec s;
  s.kind = c.domain;
  s.ndim = c.domain == DomainKind::from_mask_file ? 0 : c.ndim;
  s.spacing = c.h;
  s.scale = c.scale;
  s.mask_path = c.mask;
  return s;
}

DomainSpec parse_gallery_entry(const std::string& entry, const RunConfig& c) {
  DomainSpec s = domain_spec(c);
  const auto colon = entry.find(':');
  s.kind = parse_domain_kind(entry.substr(0, colon));
  if (s.kind == DomainKind::from_mask_file) throw InvalidArgument("sweep entries must be gallery domains");
  s.ndim = c.ndim;
  if (colon != std::string::npos) {
    const double n = parse_number(entry.substr(colon + 1));
    if (n != 1 && n != 2 && n != 3) throw InvalidArgument("bad dimension in sweep entry '" + entry + "'");
    s.ndim = static_cast<int>(n);
  }
  return s;
}

Problem load_problem(const RunConfig& c) {
  const auto spec = domain_spec(c);
  const auto domain = build_domain(spec);
  if (!c.input_field.empty()) return {spec, domain, read_field_on(c.input_field, domain), "file:" + c.input_field};
  const FieldSpec f = c.field == "random" ? random_field(c.seed, c.m) : parse_field_spec(c.field);
  return {spec, domain, sample_field(f, spec, domain), f.to_string()};
}

std::string output_path(const RunConfig& c, const std::string& name) {
  const std::filesystem::path path(c.out_prefix + name);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  return path.string();
}

int run(const RunConfig& c, std::ostream& out) {
  validate(c);
  if (c.command == "whitney") return cmd_whitney(c, out);
  if (c.command == "bessel-probe") return cmd_bessel_probe(c, out);
  if (c.command == "decompose") return cmd_decompose(c, out);
  if (c.command == "norms") return cmd_norms(c, out);
  if (c.command == "sweep") return cmd_sweep(c, out);
  return cmd_verify(c, out);
}

int run_guarded(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    return run(c, out);
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const HypothesisViolation& e) {
    err << "hypothesis violation: " << e.what() << '\n';
    return 1;
  } catch (const InvariantViolation& e) {
    err << "invariant violation: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Positive-cone decomposition of Sobolev functions on grid domains", std::string(kToolName)};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  const std::map<std::string, std::string> descriptions{
      {"whitney", "Whitney cubes as CSV plus a JSON summary"},
      {"bessel-probe", "certify the Bessel kernels and dump the delta-probe kernel"},
      {"decompose", "split u into u1 - u2 with u1, u2 >= 0"},
      {"norms", "weighted Sobolev norms and the Hardy functional"},
      {"sweep", "constants over the domain gallery and (m, p, s) grid"},
      {"verify", "run every invariant check on one configuration"}};
  std::map<std::string, std::string> config_files;
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::map<std::string, CLI::Option*>> options;
  for (const auto& name : commands()) {
    auto* sub = app.add_subcommand(name, descriptions.at(name));
    sub->set_help_flag("--help", "print help");
    sub->add_option("--config", config_files[name], "key = value configuration file");
    for (const auto& key : config_keys()) {
      if (key == "command") continue;
      options[name][key] = sub->add_option("--" + dashed(key), values[name][key], key);
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }
  const auto* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  RunConfig config;
  try {
    if (!config_files[name].empty()) apply_config_text(config, read_text(config_files[name]));
    config.command = name;
    for (const auto& [key, opt] : options[name])
      if (opt->count() > 0) set_config_value(config, key, values[name][key]);
  } catch (const FormatError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  }
  return run_guarded(config, out, err);
}

}  // namespace posdecomp::cli
