// SPDX-License-Identifier: Apache-2.0
//
// Acceptance runner. `acceptance --criterion N` checks one criterion and
// prints one PASS/FAIL line (plus indented detail lines); without
// --criterion every criterion runs. With --out-dir each criterion also
// writes criterion_N.json holding its metrics (no timings, so reruns are
// byte-identical).

#include "dhlab/bing.hpp"
#include "dhlab/extend.hpp"
#include "dhlab/fintop.hpp"
#include "dhlab/io.hpp"
#include "dhlab/verify.hpp"
#include "oracles.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;
using dhlab::io::json;
using namespace dhlab;

namespace {

// Pinned thresholds. The extension tolerances are the Config defaults
// (1e-9 marked, 1e-9 round trip, 1e-12 support); they are restated here so
// a change to the defaults cannot silently relax acceptance.
constexpr double kMarkedTol = 1e-9;
constexpr double kRoundtripTol = 1e-9;
constexpr double kSupportTol = 1e-12;
constexpr int kRoundtripSamples = 100000;
constexpr int kExteriorSamples = 10000;
constexpr double kPlaneSecondsPerInstance = 10;
constexpr double kAxisTol = 1e-10;
constexpr double kThetaSeconds = 30;
constexpr double kFintopSeconds = 60;

constexpr std::uint64_t kSeedBase = 1000;

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> details;
  json artifact = json::object();
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char *f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Config pinned_config() {
  Config c;
  c.tol = {kMarkedTol, kRoundtripTol, kSupportTol};
  c.sample_budget = kRoundtripSamples;
  c.exterior_samples = kExteriorSamples;
  return c;
}

struct ExtensionRun {
  VerificationReport report;
  ExtensionResult result;
  std::string error;  // construction failure message
  double seconds = 0;
};

ExtensionRun run_extension(const ExtensionProblem &P, const Config &cfg) {
  ExtensionRun r;
  auto t0 = std::chrono::steady_clock::now();
  try {
    r.result = extend_bijection(P, cfg);
    r.report = verify_homeo(r.result.homeo, P, cfg);
  } catch (const std::exception &e) {
    r.error = e.what();
  }
  r.seconds = seconds_since(t0);
  return r;
}

json run_json(const ExtensionRun &r) {
  if (!r.error.empty()) return {{"error", r.error}};
  return {{"report", io::report_to_json(r.report)}, {"construction", io::construction_to_json(r.result)}};
}

// ---- 1: plane extension ----

Outcome criterion1(int instances) {
  Outcome o;
  Config cfg = pinned_config();
  int fails = 0, slow = 0;
  double worst_m = 0, worst_rt = 0, worst_s = 0, worst_t = 0;
  json runs = json::array();
  for (int i = 0; i < instances; ++i) {
    auto P = random_instance(2, 100, 0.05, 10, kSeedBase + static_cast<std::uint64_t>(i));
    auto r = run_extension(P, cfg);
    runs.push_back(run_json(r));
    worst_t = std::max(worst_t, r.seconds);
    if (r.seconds > kPlaneSecondsPerInstance) ++slow;
    if (!r.error.empty()) {
      ++fails;
      o.details.push_back("instance " + std::to_string(i) + ": construction failed: " + r.error);
      continue;
    }
    worst_m = std::max(worst_m, r.report.marked_point_max_error);
    worst_rt = std::max(worst_rt, r.report.inverse_roundtrip_max_error);
    worst_s = std::max(worst_s, r.report.support_violation_max);
    if (!r.report.passed()) {
      ++fails;
      o.details.push_back("instance " + std::to_string(i) + ": marked " + fmt("%.3g", r.report.marked_point_max_error) +
                          " roundtrip " + fmt("%.3g", r.report.inverse_roundtrip_max_error) + " support " +
                          fmt("%.3g", r.report.support_violation_max) +
                          (r.report.collision_flag ? " collision" : ""));
    }
  }
  o.pass = fails == 0 && slow == 0;
  o.summary = "plane extension: " + std::to_string(instances - fails) + "/" + std::to_string(instances) +
              " instances pass; worst marked " + fmt("%.3g", worst_m) + ", roundtrip " + fmt("%.3g", worst_rt) +
              ", support " + fmt("%.3g", worst_s) + "; slowest " + fmt("%.2f", worst_t) + " s (limit " +
              fmt("%.0f", kPlaneSecondsPerInstance) + " s)";

  // Informational: the ray pipeline on the first instances.
  Config rays = cfg;
  rays.plane_strategy = PlaneStrategy::rays;
  double rays_rt = 0;
  int rays_pass = 0, rays_n = std::min(instances, 3);
  for (int i = 0; i < rays_n; ++i) {
    auto P = random_instance(2, 100, 0.05, 10, kSeedBase + static_cast<std::uint64_t>(i));
    auto r = run_extension(P, rays);
    if (r.error.empty()) {
      rays_rt = std::max(rays_rt, r.report.inverse_roundtrip_max_error);
      rays_pass += r.report.passed();
    }
  }
  o.details.push_back("info: ray strategy on the first " + std::to_string(rays_n) + " instances: " +
                      std::to_string(rays_pass) + " pass, worst roundtrip " + fmt("%.3g", rays_rt));
  o.artifact = {{"instances", runs}, {"failures", fails}};
  return o;
}

// ---- 2: extension in dimensions 3 and 4 ----

Outcome criterion2(int instances) {
  Outcome o;
  Config cfg = pinned_config();
  json per_dim = json::object();
  std::string summary;
  for (int dim : {3, 4}) {
    int fails = 0;
    double worst_rt = 0, min_path = detail::kInf, min_origin = detail::kInf, worst_t = 0;
    json runs = json::array();
    for (int i = 0; i < instances; ++i) {
      auto P = random_instance(dim, 100, 0.05, 10, kSeedBase + 100 * static_cast<std::uint64_t>(dim) + i);
      auto r = run_extension(P, cfg);
      runs.push_back(run_json(r));
      worst_t = std::max(worst_t, r.seconds);
      if (!r.error.empty()) {
        ++fails;
        o.details.push_back("dim " + std::to_string(dim) + " instance " + std::to_string(i) + ": " + r.error);
        continue;
      }
      worst_rt = std::max(worst_rt, r.report.inverse_roundtrip_max_error);
      min_path = std::min(min_path, r.result.min_path_clearance);
      min_origin = std::min(min_origin, r.result.min_origin_clearance);
      bool ok = r.report.passed() && r.result.min_path_clearance > 0 && r.result.min_origin_clearance > 0;
      if (!ok) {
        ++fails;
        o.details.push_back("dim " + std::to_string(dim) + " instance " + std::to_string(i) + ": marked " +
                            fmt("%.3g", r.report.marked_point_max_error) + " roundtrip " +
                            fmt("%.3g", r.report.inverse_roundtrip_max_error) + " path clearance " +
                            fmt("%.3g", r.result.min_path_clearance) + " origin clearance " +
                            fmt("%.3g", r.result.min_origin_clearance));
      }
    }
    o.pass = o.pass && fails == 0;
    per_dim[std::to_string(dim)] = {{"instances", runs}, {"failures", fails}};
    if (!summary.empty()) summary += "; ";
    summary += "dim " + std::to_string(dim) + " " + std::to_string(instances - fails) + "/" +
               std::to_string(instances) + " pass, worst roundtrip " + fmt("%.3g", worst_rt) +
               ", min path clearance " + fmt("%.3g", min_path) + ", min origin clearance " +
               fmt("%.3g", min_origin) + ", slowest " + fmt("%.2f", worst_t) + " s";
  }
  o.summary = "space extension: " + summary;
  o.artifact = per_dim;
  return o;
}

// ---- 3: normalize_to_axis ----

Outcome criterion3() {
  Outcome o;
  std::mt19937_64 rng(kSeedBase + 3);
  int overlap = 0, off_axis = 0;
  double worst = 0;
  json sets = json::array();
  for (int s = 0; s < 100; ++s) {
    std::size_t m = 1 + rng() % 60;
    auto P = random_instance(2, m, 0.05, 10, rng());
    auto S = MarkedSet::from_points(P.A.points);
    auto pts = detail::apply_all(general_position(S, rng()), S.points);
    auto n = normalize_to_axis(pts);
    // Every pair of closed supports, not only neighbours, compared in exact
    // rational arithmetic on the stored doubles.
    bool disjoint = true;
    for (std::size_t a = 0; a < n.twists.size(); ++a)
      for (std::size_t b = a + 1; b < n.twists.size(); ++b) {
        const auto &p = n.twists[a], &q = n.twists[b];
        mpq_class p_lo = mpq_class(p.r) - mpq_class(p.w), p_hi = mpq_class(p.r) + mpq_class(p.w);
        mpq_class q_lo = mpq_class(q.r) - mpq_class(q.w), q_hi = mpq_class(q.r) + mpq_class(q.w);
        if (!(p_hi < q_lo || q_hi < p_lo)) disjoint = false;
      }
    if (!disjoint) ++overlap;
    double err = 0;
    bool positive = true;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      VecN q = n.homeo.apply(pts[n.order[k]]);
      err = std::max({err, std::abs(q[1]), std::abs(q[0] - n.radii[k])});
      positive = positive && q[0] > 0;
    }
    worst = std::max(worst, err);
    if (err > kAxisTol || !positive) ++off_axis;
    sets.push_back({{"size", m}, {"disjoint", disjoint}, {"axis_error", err}});
  }
  o.pass = overlap == 0 && off_axis == 0;
  o.summary = "normalize_to_axis: 100 sets, " + std::to_string(overlap) + " with overlapping supports, " +
              std::to_string(off_axis) + " off the positive axis; worst axis error " + fmt("%.3g", worst) +
              " (limit " + fmt("%.0e", kAxisTol) + ")";
  o.artifact = {{"sets", sets}};
  return o;
}

// ---- 4: finite sets are Theta-discrete ----

Outcome criterion4() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(kSeedBase + 4);
  long checks = 0, failures = 0, max_captured = 0;
  json sets = json::array();
  for (int s = 0; s < 100; ++s) {
    std::vector<bing::BPoint> D;
    std::size_t size = 1 + rng() % 20;
    while (D.size() < size) {
      auto p = oracles::random_point(rng);
      if (std::find(D.begin(), D.end(), p) == D.end()) D.push_back(p);
    }
    long set_fail = 0;
    for (int a = 0; a < 1000; ++a) {
      bing::BPoint apex = a % 10 == 0 ? D[rng() % D.size()] : oracles::random_point(rng);
      auto eps = bing::theta_certificate(apex, D);
      ++checks;
      if (!eps) {
        ++set_fail;
        continue;
      }
      auto cert = bing::capture_count(apex, *eps, D);
      max_captured = std::max<long>(max_captured, static_cast<long>(cert.captured.size()));
      if (cert.captured.size() > 1) ++set_fail;
    }
    failures += set_fail;
    sets.push_back({{"size", size}, {"failures", set_fail}});
  }
  double t = seconds_since(t0);
  o.pass = failures == 0 && t <= kThetaSeconds;
  o.summary = "Theta-discreteness: " + std::to_string(checks) + " apex certificates, " + std::to_string(failures) +
              " failures, max captured " + std::to_string(max_captured) + "; " + fmt("%.1f", t) + " s (limit " +
              fmt("%.0f", kThetaSeconds) + " s)";
  o.artifact = {{"sets", sets}, {"max_captured", max_captured}};
  return o;
}

// ---- 5: line-approach growth ----

Outcome criterion5() {
  Outcome o;
  const int K = 30;
  bing::BPoint apex(oracles::R(0), oracles::R(0));
  auto pts = bing::generate_sequence(bing::SeqFamily::line_approach(apex, bing::Side::left, K));
  int short_rows = 0;
  json rows = json::array();
  std::string counts;
  for (int j = 0; j <= 25; ++j) {
    auto cert = bing::capture_count(apex, pow10(-j), pts);
    int c = static_cast<int>(cert.captured.size());
    if (c < K - j - 1) ++short_rows;
    rows.push_back({{"j", j}, {"count", c}, {"required", K - j - 1}});
    counts += (counts.empty() ? "" : " ") + std::to_string(c);
  }
  o.pass = short_rows == 0;
  o.summary = "line-approach witness K=30 at (0,0): " + std::to_string(short_rows) +
              " of 26 radii below 30-j-1";
  o.details.push_back("counts for j = 0..25: " + counts);
  o.artifact = {{"rows", rows}};
  return o;
}

// ---- 6: closure characterization against the shrinking-radius oracle ----

Outcome criterion6() {
  Outcome o;
  std::mt19937_64 rng(kSeedBase + 6);
  int disagree = 0, inside = 0, boundary = 0;
  for (int i = 0; i < 10000; ++i) {
    auto c = oracles::random_point(rng);
    auto p = i % 2 ? oracles::random_point(rng)
                   : oracles::near_foot_point(rng, i % 4 ? c.left_foot() : c.right_foot(), rng() % 2);
    Rat eps = oracles::random_rat(rng, 0, 2, 10) + oracles::R(1, 50);
    if (i % 5 == 0 && p.y == c.y && p.x != c.x) {
      eps = abs(p.x - c.x);
      ++boundary;
    }
    bing::BasicNbhd U(c, eps);
    bool got = bing::in_closure(U, p);
    inside += got;
    if (got != oracles::closure_oracle(U, p)) {
      if (disagree < 5) o.details.push_back("disagreement: U = N_" + eps.str() + c.str() + ", p = " + p.str());
      ++disagree;
    }
  }
  o.pass = disagree == 0;
  o.summary = "closure oracle: 10000 pairs, " + std::to_string(disagree) + " disagreements (" +
              std::to_string(inside) + " in closure, " + std::to_string(boundary) + " exact-boundary cases)";
  o.artifact = {{"disagreements", disagree}, {"in_closure", inside}, {"boundary_cases", boundary}};
  return o;
}

// ---- 7: nbhd => Ritter => closure ----

Outcome criterion7() {
  Outcome o;
  std::mt19937_64 rng(kSeedBase + 7);
  int violations = 0, ritter_not_nbhd = 0, closure_not_ritter = 0;
  json witnesses = json::object();
  for (int i = 0; i < 1000; ++i) {
    bing::BasicNbhd U(oracles::random_point(rng), oracles::random_rat(rng, 0, 2, 10) + oracles::R(1, 50));
    auto p = i % 2 ? oracles::random_point(rng)
                   : oracles::near_foot_point(rng, i % 4 ? U.left() : U.right(), rng() % 2);
    bool n = bing::nbhd_contains(U, p), r = bing::ritter_contains(U, p), c = bing::in_closure(U, p);
    if ((n && !r) || (r && !c)) ++violations;
    auto record = [&](const char *key, int &count) {
      if (count++ == 0)
        witnesses[key] = {{"nbhd", io::to_json(U)}, {"point", io::to_json(p)}};
    };
    if (r && !n) record("ritter_not_nbhd", ritter_not_nbhd);
    if (c && !r) record("closure_not_ritter", closure_not_ritter);
  }
  o.pass = violations == 0 && ritter_not_nbhd > 0 && closure_not_ritter > 0;
  o.summary = "Ritter inflation: 1000 cases, " + std::to_string(violations) + " chain violations; separating witnesses: " +
              std::to_string(ritter_not_nbhd) + " Ritter-not-nbhd, " + std::to_string(closure_not_ritter) +
              " closure-not-Ritter";
  o.artifact = {{"violations", violations}, {"witnesses", witnesses}};
  return o;
}

// ---- 8: finite-topology laws ----

Outcome criterion8() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  const std::size_t expected[] = {0, 1, 4, 29, 355};
  std::map<std::string, int> failures{{"count", 0},     {"oracle", 0},       {"idempotent", 0},
                                      {"hausdorff", 0}, {"connected", 0},    {"locally_connected", 0},
                                      {"commute", 0}};
  long homeos = 0;
  std::string counts;
  for (int n = 1; n <= 4; ++n) {
    auto all = fintop::enumerate_topologies(n);
    counts += (counts.empty() ? "" : " ") + std::to_string(all.size());
    if (all.size() != expected[n]) ++failures["count"];
    std::set<std::vector<fintop::Set>> seen;
    for (const auto &T : all) seen.insert(T.opens());
    if (seen != oracles::brute_force_topologies(n)) ++failures["oracle"];
    for (const auto &T : all) {
      auto S = fintop::semiregularize(T);
      if (!(fintop::semiregularize(S) == S)) ++failures["idempotent"];
      if (fintop::is_hausdorff(T) != fintop::is_hausdorff(S)) ++failures["hausdorff"];
      if (fintop::is_connected(T) != fintop::is_connected(S)) ++failures["connected"];
      if (fintop::is_locally_connected(T) && !fintop::is_locally_connected(S)) ++failures["locally_connected"];
      for (const auto &f : fintop::homeomorphisms(T, T)) {
        ++homeos;
        if (!fintop::homeo_semireg_commute(T, f)) ++failures["commute"];
      }
    }
  }
  double t = seconds_since(t0);
  int total = 0;
  std::string breakdown;
  for (const auto &[k, v] : failures) {
    total += v;
    breakdown += (breakdown.empty() ? "" : ", ") + k + " " + std::to_string(v);
  }
  o.pass = total == 0 && t <= kFintopSeconds;
  o.summary = "finite-topology laws on n <= 4: counts " + counts + " (oracle-checked), " + std::to_string(homeos) +
              " homeomorphisms, " + std::to_string(total) + " failures; " + fmt("%.1f", t) + " s (limit " +
              fmt("%.0f", kFintopSeconds) + " s)";
  o.details.push_back("failures by law: " + breakdown);
  o.artifact = {{"failures", failures}, {"homeomorphisms", homeos}};
  return o;
}

// ---- 9: homogeneity chain ----

Outcome criterion9() {
  Outcome o;
  int sdh_not_dh = 0, dh_not_k = 0, t1_counter = 0, sdh_not_strong = 0;
  std::optional<fintop::FinTop> first;
  int first_k = 0;
  std::map<int, int> fail_by_k;
  for (int n = 1; n <= 4; ++n)
    for (const auto &T : fintop::enumerate_topologies(n)) {
      bool sdh = fintop::is_sdh(T), dh = fintop::is_dh(T);
      if (sdh && !dh) ++sdh_not_dh;
      if (!dh) continue;
      for (int k = 1; k <= n; ++k) {
        if (fintop::is_n_homogeneous(T, k)) continue;
        ++dh_not_k;
        ++fail_by_k[k];
        if (fintop::is_t1(T)) ++t1_counter;
        if (!first) {
          first = T;
          first_k = k;
        }
        break;
      }
      if (sdh)
        for (int k = 1; k <= n; ++k)
          if (!fintop::is_strongly_n_homogeneous(T, k)) {
            ++sdh_not_strong;
            break;
          }
    }
  o.pass = sdh_not_dh == 0 && dh_not_k == 0;
  o.summary = "homogeneity chain on n <= 4: " + std::to_string(sdh_not_dh) + " sDH-not-DH, " +
              std::to_string(dh_not_k) + " DH spaces failing k-homogeneity for some k <= n";
  if (first)
    o.details.push_back("first counterexample: " + io::topology_to_json(*first).dump() + " is " +
                        (fintop::is_sdh(*first) ? "sDH" : "DH") + " but not " + std::to_string(first_k) +
                        "-homogeneous");
  std::string ks;
  for (const auto &[k, v] : fail_by_k) ks += (ks.empty() ? "" : ", ") + ("k=" + std::to_string(k)) + ": " + std::to_string(v);
  if (!ks.empty()) o.details.push_back("info: smallest failing k per counterexample: " + ks);
  o.details.push_back("info: DH spaces failing 1-homogeneity: " + std::to_string(fail_by_k[1]) +
                      "; counterexamples among T1 spaces: " + std::to_string(t1_counter));
  o.details.push_back("info: sDH spaces failing strong k-homogeneity for some k <= n: " +
                      std::to_string(sdh_not_strong));
  o.artifact = {{"sdh_not_dh", sdh_not_dh},
                {"dh_not_k_homogeneous", dh_not_k},
                {"t1_counterexamples", t1_counter},
                {"first_counterexample", first ? io::topology_to_json(*first) : json(nullptr)}};
  return o;
}

// ---- 10: determinism ----

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int shell(const std::string &cmd) {
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome criterion10() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "dhlab_acceptance_determinism";
  fs::remove_all(root);
  const std::string cli = std::string("env -u DHLAB_CONFIG ") + DHLAB_CLI_PATH;
  const std::string samples = DHLAB_SAMPLES_DIR;
  const std::string self = fs::read_symlink("/proc/self/exe").string();

  struct Job {
    std::string name, args;
    std::vector<std::string> files;  // empty: compare stdout
  };
  std::vector<Job> jobs{
      {"extend_plane", "extend " + samples + "/plane_two_points.json --svg", {"trace.json", "report.json", "grid.svg"}},
      {"extend_space", "extend " + samples + "/space_antipodal.json --svg --project xz",
       {"trace.json", "report.json", "grid.svg"}},
      {"bing_theta", "bing theta --points " + samples + "/bing_points20.json", {}},
      {"bing_growth", "bing growth --family line-approach --K 12", {}},
      {"fintop_enumerate", "fintop enumerate --n 4", {}},
  };
  int mismatches = 0, errors = 0, compared = 0;
  for (const Job &job : jobs) {
    std::string out[2];
    for (int run = 0; run < 2; ++run) {
      fs::path dir = root / (job.name + "_" + std::to_string(run));
      fs::create_directories(dir);
      int rc = shell(cli + " " + job.args + " --out-dir " + dir.string() + " >" + (dir / "stdout").string() +
                     " 2>/dev/null");
      if (rc != 0) ++errors;
      out[run] = slurp(dir / "stdout");
      for (const auto &f : job.files) out[run] += "\n--" + f + "--\n" + slurp(dir / f);
    }
    ++compared;
    if (out[0] != out[1] || out[0].empty()) {
      ++mismatches;
      o.details.push_back("differs: dhlab " + job.args);
    }
  }
  // The acceptance runner's own artifacts, rerun in fresh processes.
  for (int c : {3, 5, 6, 7, 9}) {
    std::string out[2];
    for (int run = 0; run < 2; ++run) {
      fs::path dir = root / ("criterion" + std::to_string(c) + "_" + std::to_string(run));
      fs::create_directories(dir);
      shell(self + " --criterion " + std::to_string(c) + " --out-dir " + dir.string() + " >/dev/null 2>&1");
      out[run] = slurp(dir / ("criterion_" + std::to_string(c) + ".json"));
    }
    ++compared;
    if (out[0] != out[1] || out[0].empty()) {
      ++mismatches;
      o.details.push_back("differs: acceptance --criterion " + std::to_string(c));
    }
  }
  // In-process: the same extension run twice.
  for (int dim : {2, 3}) {
    Config cfg = pinned_config();
    auto P = random_instance(dim, 30, 0.05, 10, kSeedBase + 10 + static_cast<std::uint64_t>(dim));
    std::string a = run_json(run_extension(P, cfg)).dump() + io::trace_to_json(extend_bijection(P, cfg).homeo).dump();
    std::string b = run_json(run_extension(P, cfg)).dump() + io::trace_to_json(extend_bijection(P, cfg).homeo).dump();
    ++compared;
    if (a != b) {
      ++mismatches;
      o.details.push_back("differs: in-process extension in dim " + std::to_string(dim));
    }
  }
  fs::remove_all(root);
  o.pass = mismatches == 0 && errors == 0;
  o.summary = "determinism: " + std::to_string(compared) + " artifact sets compared across reruns, " +
              std::to_string(mismatches) + " differ, " + std::to_string(errors) + " command errors";
  o.artifact = {{"compared", compared}, {"mismatches", mismatches}};
  return o;
}

Outcome run_criterion(int c, bool quick) {
  switch (c) {
  case 1: return criterion1(quick ? 3 : 50);
  case 2: return criterion2(quick ? 2 : 25);
  case 3: return criterion3();
  case 4: return criterion4();
  case 5: return criterion5();
  case 6: return criterion6();
  case 7: return criterion7();
  case 8: return criterion8();
  case 9: return criterion9();
  case 10: return criterion10();
  }
  throw std::invalid_argument("criterion must be in [1, 10]");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"dhlab acceptance runner"};
  int only = 0;
  std::string out_dir;
  bool quick = false;
  app.add_option("--criterion", only, "run a single criterion (1-10)")->check(CLI::Range(1, 10));
  app.add_option("--out-dir", out_dir, "write criterion_N.json artifacts here");
  app.add_flag("--quick", quick, "fewer extension instances for criteria 1 and 2 (smoke runs only)");
  CLI11_PARSE(app, argc, argv);

  bool all_pass = true;
  for (int c = 1; c <= 10; ++c) {
    if (only && c != only) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o = run_criterion(c, quick);
    double t = seconds_since(t0);
    all_pass = all_pass && o.pass;
    std::cout << "criterion " << c << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.summary << "  ["
              << fmt("%.1f", t) << " s]\n";
    for (const auto &d : o.details) std::cout << "    " << d << '\n';
    std::cout.flush();
    if (!out_dir.empty()) {
      fs::create_directories(out_dir);
      json art = {{"criterion", c}, {"pass", o.pass}, {"metrics", o.artifact}};
      io::write_file((fs::path(out_dir) / ("criterion_" + std::to_string(c) + ".json")).string(), art);
    }
  }
  return all_pass ? 0 : 1;
}
