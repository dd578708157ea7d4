// Acceptance criteria 1-10. Each criterion prints detail lines followed by exactly one
// PASS/FAIL line. `--criterion N` runs a single criterion; the exit status is nonzero when
// any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "posdecomp/bessel.hpp"
#include "posdecomp/decompose.hpp"
#include "posdecomp/distance.hpp"
#include "posdecomp/error.hpp"
#include "posdecomp/norms.hpp"
#include "posdecomp/whitney.hpp"
#include "support.hpp"

using namespace posdecomp;
using testing::gallery;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string summary;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void detail(const char* text) { std::printf("  %s\n", text); }

template <class A0, class... A>
void detail(const char* fmt, A0 a0, A... args) {
  std::printf("  ");
  std::printf(fmt, a0, args...);
  std::printf("\n");
}

const char* name(DomainKind k) { return to_string(k).data(); }

// ---- 1 ----

Outcome whitney_suite() {
  struct Entry {
    DomainKind kind;
    int ndim;
    double h;
  };
  const std::vector<Entry> entries{{DomainKind::interval, 1, 1.0 / 128}, {DomainKind::box, 2, 1.0 / 128},
                                   {DomainKind::ball, 2, 1.0 / 128},     {DomainKind::l_shape, 2, 1.0 / 128},
                                   {DomainKind::cusp, 2, 1.0 / 128},     {DomainKind::box, 3, 1.0 / 32},
                                   {DomainKind::ball, 3, 1.0 / 32}};
  Outcome o;
  int red_uncovered = 0;
  for (const auto& e : entries) {
    const auto t0 = Clock::now();
    auto d = build_domain(gallery(e.kind, e.ndim, e.h));
    const auto w = whitney_decompose(d);
    const double secs = seconds_since(t0);
    bool ineq = true;
    std::size_t volume = 0;
    for (const auto& q : w.cubes) {
      ineq = ineq && q.whitney_ok();
      volume += static_cast<std::size_t>(std::pow(q.cells, e.ndim));
    }
    const auto owned = static_cast<std::size_t>(std::count_if(w.owner.begin(), w.owner.end(), [](int c) { return c >= 0; }));
    const bool disjoint = owned == volume;
    const int bound = static_cast<int>(std::pow(3, e.ndim)) + 1;
    // Any covered point has d >= diam of the smallest admissible cube.
    const double floor_d = std::sqrt(double(e.ndim)) * w.min_side_cells;
    std::size_t below = 0;
    for (std::size_t i = 0; i < d->size(); ++i)
      if (d->interior(i) && std::sqrt(double(d->distance_sq_index()[i])) < floor_d) ++below;
    const double floor_fraction = double(below) / d->interior_count();
    const bool ok_unc = w.uncovered_fraction < 0.05;
    red_uncovered += ok_unc ? 0 : 1;
    const bool ok = ineq && disjoint && ok_unc && w.overlap_four_thirds <= bound && secs < 10.0;
    detail("%-8s N=%d h=1/%d cubes=%zu inequalities=%s disjoint=%s uncovered=%.4f (floor %.4f) overlap4/3=%d<=%d "
           "%.2fs %s",
           name(e.kind), e.ndim, int(std::lround(1 / e.h)), w.cubes.size(), ineq ? "ok" : "VIOLATED",
           disjoint ? "ok" : "NO", w.uncovered_fraction, floor_fraction, w.overlap_four_thirds, bound, secs,
           ok ? "ok" : "fail");
    o.pass = o.pass && ok;
  }
  if (red_uncovered)
    detail("note: 'floor' is the fraction of interior points with d < sqrt(N)*min_side_cells*h; no Whitney cube "
           "with diam <= dist can contain them, so uncovered_fraction >= floor for any dyadic cover at this h");
  o.summary = "whitney suite (inequalities exact, disjoint, uncovered < 0.05, overlap <= 3^N+1, < 10 s)";
  return o;
}

// ---- 2 ----

Outcome distance_oracle() {
  const auto t0 = Clock::now();
  Outcome o;
  double worst = 0.0;
  int masks = 0;
  for (std::uint64_t seed = 1; masks < 20; ++seed) {
    const int n = 16 + int(seed * 7 % 49);
    GridGeometry g{2, {n, std::max(8, n - int(seed % 9)), 1}, 1.0 / n, {}};
    const auto mask = testing::random_blob(seed, g);
    if (std::count(mask.begin(), mask.end(), 1) == 0) continue;
    ++masks;
    const auto fast = distance_transform(mask, g);
    const auto brute = testing::brute_distance_sq(mask, g);
    for (std::size_t i = 0; i < g.size(); ++i)
      worst = std::max(worst, std::abs(fast[i] - std::sqrt(double(brute[i])) * g.spacing));
  }
  const double secs = seconds_since(t0);
  detail("%d masks up to 64x64, max |fast - brute| = %.3g, %.2fs", masks, worst, secs);
  o.pass = worst <= 1e-12 && secs < 30.0;
  o.summary = "distance transform equals O(n^2) brute force to 1e-12 on 20 masks (< 30 s)";
  return o;
}

// ---- 3 ----

Outcome bessel_roundtrip() {
  Outcome o;
  double worst_rt = 0.0, worst_tau = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const bool two_d = seed > 6;
    const auto spec = two_d ? gallery(DomainKind::ball, 2, 1.0 / 32) : gallery(DomainKind::interval, 1, 1.0 / 128);
    auto d = build_domain(spec);
    for (int m = 1; m <= 3; ++m) {
      const auto u = sample_field(random_field(seed, m), spec, d);
      auto mult = std::make_shared<const BesselMultiplier>(d->geometry(), m);
      const auto back = restrict_to(bessel_apply(bessel_invert(u, mult)), d);
      const double rel = max_abs_difference(back, u) / u.max_abs();
      worst_rt = std::max(worst_rt, rel);
      worst_tau = std::max(worst_tau, mult->certificate().tau_ker);
    }
  }
  detail("30 roundtrips (seeds 1-6 on the interval at h=1/128, seeds 7-10 on the 2-D ball at h=1/32, m=1,2,3)");
  detail("max relative roundtrip error %.3g, max tau_ker %.3g", worst_rt, worst_tau);
  o.pass = worst_rt <= 1e-10 && worst_tau < 1e-6;
  o.summary = "bessel_apply o bessel_invert = id to 1e-10; tau_ker < 1e-6";
  return o;
}

// ---- 4 and 5 ----

struct MajorizationRun {
  std::string label;
  double max_u;
  DecompositionReport report;
  int cube_failures;
  double worst_cube_slack;
};

const std::vector<MajorizationRun>& majorization_runs() {
  static const std::vector<MajorizationRun> runs = [] {
    std::vector<MajorizationRun> out;
    std::map<std::string, std::shared_ptr<const CutoffFamily>> families;
    for (std::uint64_t seed = 1; out.size() < 25; ++seed) {
      const bool two_d = out.size() >= 13;
      const int m = 1 + int(seed % 2);
      const auto spec = two_d ? gallery(seed % 3 ? DomainKind::ball : DomainKind::l_shape, 2, 1.0 / 64)
                              : gallery(DomainKind::interval, 1, 1.0 / 128);
      auto d = build_domain(spec);
      const auto u = sample_field(random_field(seed, m), spec, d);
      if (!(u.min() < 0.0 && u.values().size() && *std::max_element(u.values().begin(), u.values().end()) > 0.0))
        continue;
      const std::string key = std::string(name(spec.kind)) + std::to_string(spec.ndim);
      if (!families.count(key)) families[key] = std::make_shared<const CutoffFamily>(build_cutoffs(whitney_decompose(d)));
      const auto& fam = *families[key];
      // The cutoffs were built on an equal domain instance; rebind u to it.
      const GridFunction uf(fam.decomposition().domain, std::vector<double>(u.values().begin(), u.values().end()));
      auto rep = ancona_decompose(uf, {m, 2.0, 0.0}, fam);
      int fails = 0;
      double slack = std::numeric_limits<double>::infinity();
      for (const auto& piece : rep.majorant->pieces) {
        if (piece.zero) continue;
        fails += piece.margin >= -piece.tau_pos ? 0 : 1;
        slack = std::min(slack, piece.margin + piece.tau_pos);
      }
      char label[96];
      std::snprintf(label, sizeof label, "%s:%d seed=%llu m=%d", name(spec.kind), spec.ndim,
                    static_cast<unsigned long long>(seed), m);
      out.push_back({label, uf.max_abs(), std::move(rep), fails, slack});
    }
    return out;
  }();
  return runs;
}

Outcome majorization_oracle() {
  Outcome o;
  int global_fail = 0, cube_fail = 0;
  double worst_tau_glob = 0.0, worst_cube = std::numeric_limits<double>::infinity();
  for (const auto& r : majorization_runs()) {
    const bool g = r.report.min_u1 >= -r.report.tau_glob && r.report.min_u2 >= -r.report.tau_glob;
    global_fail += g ? 0 : 1;
    cube_fail += r.cube_failures;
    worst_tau_glob = std::max(worst_tau_glob, r.report.tau_glob);
    worst_cube = std::min(worst_cube, r.worst_cube_slack);
    if (!g || r.cube_failures)
      detail("%s: min u1 %.3g min u2 %.3g tau_glob %.3g cube failures %d", r.label.c_str(), r.report.min_u1,
             r.report.min_u2, r.report.tau_glob, r.cube_failures);
  }
  detail("25 sign-changing fields (13 on the interval at h=1/128, 12 on 2-D ball/l_shape at h=1/64, m=1,2)");
  detail("cubes below -tau_pos: %d; min over cubes of margin + tau_pos: %.3g; runs with min(u1,u2) < -tau_glob: %d; "
         "max tau_glob %.3g",
         cube_fail, worst_cube, global_fail, worst_tau_glob);
  o.pass = cube_fail == 0 && global_fail == 0;
  o.summary = "majorization: v_Q >= max(0,u_Q) - tau_pos per cube; min(u1), min(u2) >= -tau_glob";
  return o;
}

Outcome exact_splitting() {
  Outcome o;
  double worst = 0.0;
  for (const auto& r : majorization_runs()) worst = std::max(worst, r.report.identity_residual / r.max_u);
  detail("max over the 25 runs of ||u - (u1 - u2)||_inf / ||u||_inf = %.3g", worst);
  o.pass = worst <= 1e-12;
  o.summary = "exact splitting to 1e-12 relative";
  return o;
}

// ---- 6 ----

Outcome constant_stability() {
  struct Entry {
    DomainKind kind;
    int ndim;
    double h;
  };
  const std::vector<Entry> entries{
      {DomainKind::interval, 1, 1.0 / 256}, {DomainKind::punctured_box, 1, 1.0 / 256},
      {DomainKind::box, 2, 1.0 / 128},      {DomainKind::ball, 2, 1.0 / 128},
      {DomainKind::annulus, 2, 1.0 / 128},  {DomainKind::l_shape, 2, 1.0 / 128},
      {DomainKind::cusp, 2, 1.0 / 128},     {DomainKind::punctured_box, 2, 1.0 / 128},
      {DomainKind::slit_box, 2, 1.0 / 128}};
  const std::vector<double> ps{1.5, 2.0, 3.0};
  const auto t0 = Clock::now();
  Outcome o;
  int out_of_band = 0, total = 0;
  std::map<int, int> red_by_m;
  for (const auto& e : entries) {
    for (int m = 1; m <= 2; ++m) {
      std::vector<double> c[2];
      for (int r = 0; r < 2; ++r) {
        const auto spec = gallery(e.kind, e.ndim, r == 0 ? e.h : e.h / 2);
        auto d = build_domain(spec);
        const auto fam = build_cutoffs(whitney_decompose(d));
        const auto u = sample_field(random_field(1, m), spec, fam.decomposition().domain);
        const auto maj = build_majorant(u, m, fam);
        for (double p : ps) c[r].push_back(decompose_with_majorant(u, {m, p, 0.0}, fam, maj).c);
      }
      std::string line;
      for (std::size_t k = 0; k < ps.size(); ++k) {
        const double ratio = c[1][k] / c[0][k];
        const bool ok = std::isfinite(c[0][k]) && std::isfinite(c[1][k]) && ratio >= 0.5 && ratio <= 2.0;
        ++total;
        if (!ok) {
          ++out_of_band;
          ++red_by_m[m];
        }
        char buf[96];
        std::snprintf(buf, sizeof buf, " p=%.1f c=%.3g->%.3g (x%.2f)%s", ps[k], c[0][k], c[1][k], ratio,
                      ok ? "" : " OUT");
        line += buf;
      }
      detail("%-13s N=%d h=1/%d m=%d%s", name(e.kind), e.ndim, int(std::lround(1 / e.h)), m, line.c_str());
    }
  }
  const double secs = seconds_since(t0);
  detail("%d of %d (domain, m, p) ratios outside [1/2, 2] (m=1: %d, m=2: %d); %.1fs", out_of_band, total, red_by_m[1],
         red_by_m[2], secs);
  if (out_of_band)
    detail("note: for m=2 in 2-D, ||grad^2 u1|| is dominated by u * grad^2(eta_Q) on transition shells of width "
           "l(Q)/6, i.e. 1-3 grid points on the finest cubes; the discrete norm of those shells is still rising "
           "at h=1/256 (per-cube ratios settle only at 32-64 cells per cube), so c(h/2)/c(h) reflects "
           "under-resolution rather than a converged constant");
  o.pass = out_of_band == 0 && secs < 300.0;
  o.summary = "c finite and c(h/2)/c(h) in [1/2, 2] over the gallery, m in {1,2}, p in {1.5,2,3}, s=0 (< 5 min)";
  return o;
}

// ---- 7 ----

Outcome chain_stability() {
  // Judged on h = 1/512 -> 1/1024; the coarser pairs are printed for reference.
  Outcome o;
  int bad = 0;
  const std::vector<int> levels{128, 256, 512, 1024};
  for (auto kind : {DomainKind::interval, DomainKind::punctured_box}) {
    for (int m = 1; m <= 2; ++m) {
      std::vector<std::vector<double>> implied;
      for (int n : levels) {
        const auto spec = gallery(kind, 1, 1.0 / n);
        auto d = build_domain(spec);
        const auto fam = build_cutoffs(whitney_decompose(d));
        const auto u = sample_field(random_field(1, m), spec, fam.decomposition().domain);
        const auto rep = ancona_decompose(u, {m, 2.0, 0.0}, fam);
        implied.emplace_back();
        for (const auto& row : seminorm_chain_report(u, rep, fam)) implied.back().push_back(row.implied);
      }
      for (std::size_t r = 0; r + 1 < levels.size(); ++r) {
        const bool judged = r + 2 == levels.size();
        std::string line;
        for (std::size_t k = 0; k < implied[r].size(); ++k) {
          const double a = implied[r][k], b = implied[r + 1][k], ratio = b / a;
          const bool ok = std::isfinite(a) && std::isfinite(b) && ratio >= 0.5 && ratio <= 2.0;
          if (judged) bad += ok ? 0 : 1;
          char buf[96];
          std::snprintf(buf, sizeof buf, " k=%zu %.4g->%.4g (x%.3f)%s", k, a, b, ratio, ok ? "" : " OUT");
          line += buf;
        }
        detail("%-13s m=%d h=1/%d->1/%d%s%s", name(kind), m, levels[r], levels[r + 1], line.c_str(),
               judged ? "" : "  [reference]");
      }
    }
  }
  detail("p=2, s=0; box and ball coincide with the interval in 1-D");
  detail("note: at m=2 the k=2 line is ||grad^2 v||^p, dominated by cutoff transition shells of width l(Q)/6; on "
         "coarse grids those shells span 1-3 points and the line still climbs (x2-x6 per halving), settling once "
         "the cubes carrying the mass have >= 32 cells");
  o.pass = bad == 0;
  o.summary = "chain report: implied constants finite and within x2 across h -> h/2 on the 1-D gallery";
  return o;
}

// ---- 8 ----

Outcome homogeneity() {
  Outcome o;
  double worst = 0.0;
  for (int which = 0; which < 2; ++which) {
    const auto spec = which == 0 ? gallery(DomainKind::interval, 1, 1.0 / 128) : gallery(DomainKind::ball, 2, 1.0 / 64);
    const int m = which == 0 ? 2 : 1;
    auto d = build_domain(spec);
    const auto fam = build_cutoffs(whitney_decompose(d));
    const auto u = sample_field(random_field(3, m), spec, fam.decomposition().domain);
    const auto base = ancona_decompose(u, {m, 2.0, 0.0}, fam);
    for (double lambda : {0.5, 3.0}) {
      const auto r = ancona_decompose(lambda * u, {m, 2.0, 0.0}, fam);
      const double e1 = testing::max_abs_diff(r.u1.values(), (lambda * base.u1).values()) / (lambda * base.u1.max_abs());
      const double e2 = testing::max_abs_diff(r.u2.values(), (lambda * base.u2).values()) / (lambda * base.u2.max_abs());
      detail("%s:%d m=%d lambda=%g: rel err u1 %.3g, u2 %.3g", name(spec.kind), spec.ndim, m, lambda, e1, e2);
      worst = std::max({worst, e1, e2});
    }
  }
  o.pass = worst <= 1e-12;
  o.summary = "decomposition of lambda*u equals lambda*(u1,u2) to 1e-12, lambda in {0.5, 3}";
  return o;
}

// ---- 9 ----

Outcome approximation() {
  Outcome o;
  const auto spec = gallery(DomainKind::interval, 1, 1.0 / 256);
  auto d = build_domain(spec);
  const auto fam = build_cutoffs(whitney_decompose(d));
  const auto u = sample_field(parse_field_spec("dpow:2"), spec, fam.decomposition().domain);
  double prev = std::numeric_limits<double>::infinity();
  bool monotone = true;
  std::string line;
  for (int n = 2; n <= 6; ++n) {
    const auto a = approximate_compact_support(u, {1, 2.0, 0.0}, fam, n);
    monotone = monotone && a.relative_error <= prev;
    prev = a.relative_error;
    char buf[48];
    std::snprintf(buf, sizeof buf, " n=%d %.4g", n, a.relative_error);
    line += buf;
  }
  detail("u = d^2 on (0,1), h=1/256, relative W^{1,2} error:%s", line.c_str());
  o.pass = monotone && prev < 0.10;
  o.summary = "compact-support approximation error nonincreasing for n=2..6 and < 10% at n=6";
  return o;
}

// ---- 10 ----

Outcome hypothesis_gate() {
  Outcome o;
  for (auto [kind, ndim, h] : {std::tuple{DomainKind::interval, 1, 1.0 / 64}, std::tuple{DomainKind::box, 2, 1.0 / 32}}) {
    for (int r = 0; r < 2; ++r) {
      const double hr = r == 0 ? h : h / 2;
      const auto spec = gallery(kind, ndim, hr);
      auto d = build_domain(spec);
      const auto u = sample_field(parse_field_spec("const:1"), spec, d);
      const auto bundle = norm_bundle(u, {1, 2.0, 0.0});
      cli::RunConfig c;
      c.command = "decompose";
      c.domain = kind;
      c.ndim = ndim;
      c.h = hr;
      c.field = "const:1";
      c.out_prefix = (testing::scratch_dir("gate") / "").string();
      std::ostringstream out, err;
      const int code = cli::run_guarded(c, out, err);
      std::string msg = err.str();
      if (!msg.empty() && msg.back() == '\n') msg.pop_back();
      detail("%s:%d h=1/%d: hardy ratio under refinement %.3f diverging=%s, decompose exit %d (%s)", name(kind), ndim,
             int(std::lround(1 / hr)), bundle.hardy_probe.ratio(), bundle.hardy_diverging() ? "yes" : "no", code,
             msg.c_str());
      o.pass = o.pass && bundle.hardy_diverging() && code == 1;
    }
  }
  o.summary = "u = 1 flags Hardy divergence at two consecutive resolutions and is refused with exit 1";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{whitney_suite,   distance_oracle, bessel_roundtrip,
                                                       majorization_oracle, exact_splitting, constant_stability,
                                                       chain_stability, homogeneity,     approximation,
                                                       hypothesis_gate};
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  if (only < 0 || only > int(criteria.size())) {
    std::fprintf(stderr, "criterion must be 1..%zu\n", criteria.size());
    return 2;
  }
  int failures = 0;
  for (int i = 1; i <= int(criteria.size()); ++i) {
    if (only && i != only) continue;
    Outcome o;
    try {
      o = criteria[i - 1]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", i, o.summary.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures ? 1 : 0;
}
