// SPDX-License-Identifier: Apache-2.0
//
// dhlab: command-line front end.
//
// Exit codes: 0 success, 1 verification failure, 2 malformed input,
// 3 construction failure.

#include "dhlab/bing.hpp"
#include "dhlab/config.hpp"
#include "dhlab/extend.hpp"
#include "dhlab/fintop.hpp"
#include "dhlab/io.hpp"
#include "dhlab/svg.hpp"
#include "dhlab/verify.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using dhlab::io::InputError;
using dhlab::io::json;

namespace {

constexpr int kOk = 0, kVerifyFailed = 1, kBadInput = 2, kConstructionFailed = 3;
constexpr const char *kConfigEnv = "DHLAB_CONFIG";

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> budget;
  std::string out_dir;
  bool svg = false;
};

dhlab::Config load_config(const Globals &g) {
  dhlab::Config cfg;
  std::string path = g.config_path;
  if (path.empty())
    if (const char *env = std::getenv(kConfigEnv)) path = env;
  if (!path.empty()) cfg = dhlab::io::config_from_json(dhlab::io::read_file(path));
  if (g.seed) cfg.seed = *g.seed;
  if (g.budget) cfg.sample_budget = *g.budget;
  try {
    cfg.validate();
  } catch (const std::invalid_argument &e) {
    throw InputError(e.what());
  }
  return cfg;
}

fs::path out_path(const Globals &g, const std::string &name) {
  fs::path dir = g.out_dir.empty() ? fs::path(".") : fs::path(g.out_dir);
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path &p, const std::string &s) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << s;
}

std::optional<dhlab::svg::Projection> parse_projection(const std::string &s) {
  if (s.empty()) return std::nullopt;
  auto axis = [&](char c) {
    if (c >= 'x' && c <= 'z') return c - 'x';
    if (c >= '0' && c <= '7') return c - '0';
    throw InputError("--project: axes are x, y, z or digits 0-7, got '" + s + "'");
  };
  if (s.size() != 2) throw InputError("--project: expected two axes such as xy or xz, got '" + s + "'");
  return dhlab::svg::Projection{axis(s[0]), axis(s[1])};
}

std::vector<dhlab::svg::Arrow> arrows_of(const dhlab::ExtensionProblem &P) {
  std::vector<dhlab::svg::Arrow> out;
  for (std::size_t i = 0; i < P.A.points.size(); ++i) out.push_back({P.A.points[i], P.target(i)});
  return out;
}

std::string render_svg(const dhlab::Homeo &h, const std::vector<dhlab::svg::Arrow> &arrows,
                       const std::string &projection) {
  dhlab::svg::Options opt;
  opt.projection = parse_projection(projection);
  if (h.dim() > 2 && !opt.projection)
    throw InputError("render: dim " + std::to_string(h.dim()) + " needs --project (for example --project xy)");
  try {
    return dhlab::svg::render(h, arrows, opt);
  } catch (const std::invalid_argument &e) {
    throw InputError(e.what());
  }
}

// ---- extend / verify / render ----

int cmd_extend(const Globals &g, const std::string &problem_path, const std::string &projection) {
  dhlab::Config cfg = load_config(g);
  dhlab::ExtensionProblem P = dhlab::io::problem_from_json(dhlab::io::read_file(problem_path));
  dhlab::ExtensionResult res;
  try {
    res = dhlab::extend_bijection(P, cfg);
  } catch (const dhlab::ConstructionError &e) {
    std::cerr << "construction failed: " << e.what() << '\n';
    return kConstructionFailed;
  }
  dhlab::VerificationReport rep = dhlab::verify_homeo(res.homeo, P, cfg);
  json report = dhlab::io::report_to_json(rep);
  report["construction"] = dhlab::io::construction_to_json(res);
  report["config"] = dhlab::io::config_to_json(cfg);
  dhlab::io::write_file(out_path(g, "trace.json").string(), dhlab::io::trace_to_json(res.homeo));
  dhlab::io::write_file(out_path(g, "report.json").string(), report);
  if (g.svg) write_text(out_path(g, "grid.svg"), render_svg(res.homeo, arrows_of(P), projection));
  std::cout << report["pass"].dump() << '\n';
  return rep.passed() ? kOk : kVerifyFailed;
}

int cmd_verify(const Globals &g, const std::string &problem_path, const std::string &trace_path) {
  dhlab::Config cfg = load_config(g);
  dhlab::ExtensionProblem P = dhlab::io::problem_from_json(dhlab::io::read_file(problem_path));
  dhlab::Homeo h = dhlab::io::trace_from_json(dhlab::io::read_file(trace_path));
  if (h.dim() != P.dim) throw InputError("verify: trace dim differs from problem dim");
  dhlab::VerificationReport rep = dhlab::verify_homeo(h, P, cfg);
  json report = dhlab::io::report_to_json(rep);
  if (!g.out_dir.empty()) dhlab::io::write_file(out_path(g, "report.json").string(), report);
  std::cout << report.dump(2) << '\n';
  return rep.passed() ? kOk : kVerifyFailed;
}

int cmd_render(const Globals &g, const std::string &trace_path, const std::string &problem_path,
               const std::string &projection) {
  dhlab::Homeo h = dhlab::io::trace_from_json(dhlab::io::read_file(trace_path));
  std::vector<dhlab::svg::Arrow> arrows;
  if (!problem_path.empty()) {
    dhlab::ExtensionProblem P = dhlab::io::problem_from_json(dhlab::io::read_file(problem_path));
    if (P.dim != h.dim()) throw InputError("render: trace dim differs from problem dim");
    arrows = arrows_of(P);
  }
  std::string svg = render_svg(h, arrows, projection);
  if (g.out_dir.empty())
    std::cout << svg;
  else
    write_text(out_path(g, "grid.svg"), svg);
  return kOk;
}

// ---- bing ----

dhlab::bing::BPoint parse_bpoint(const std::string &s, const char *flag) {
  auto comma = s.find(',');
  if (comma == std::string::npos) throw InputError(std::string(flag) + ": expected x,y as p/q values, got '" + s + "'");
  try {
    return {dhlab::Rat::parse(s.substr(0, comma)), dhlab::Rat::parse(s.substr(comma + 1))};
  } catch (const std::invalid_argument &e) {
    throw InputError(std::string(flag) + ": " + e.what());
  }
}

dhlab::Rat parse_rat(const std::string &s, const char *flag) {
  try {
    return dhlab::Rat::parse(s);
  } catch (const std::invalid_argument &e) {
    throw InputError(std::string(flag) + ": " + e.what());
  }
}

struct BingArgs {
  std::string center, eps, point, apex, points_file, family = "line-approach", side = "left", height = "1";
  int K = 30;
  std::vector<std::string> eps_list;
};

int cmd_bing_predicate(const std::string &which, const BingArgs &a) {
  dhlab::bing::BPoint c = parse_bpoint(a.center, "--center");
  dhlab::Rat e = parse_rat(a.eps, "--eps");
  if (e.sign() <= 0) throw InputError("--eps must be > 0");
  dhlab::bing::BasicNbhd U(c, e);
  dhlab::bing::BPoint p = parse_bpoint(a.point, "--point");
  bool r = which == "contains" ? dhlab::bing::nbhd_contains(U, p)
           : which == "closure" ? dhlab::bing::in_closure(U, p)
                                : dhlab::bing::ritter_contains(U, p);
  json out = {{"nbhd", dhlab::io::to_json(U)}, {"point", dhlab::io::to_json(p)}, {"predicate", which}, {"result", r}};
  std::cout << out.dump() << '\n';
  return kOk;
}

int cmd_bing_theta(const BingArgs &a) {
  auto D = dhlab::io::bpoints_from_json(dhlab::io::read_file(a.points_file));
  std::vector<dhlab::bing::BPoint> apexes;
  if (!a.apex.empty())
    apexes.push_back(parse_bpoint(a.apex, "--apex"));
  else
    apexes = D;
  json certs = json::array();
  bool ok = true;
  for (const auto &apex : apexes) {
    auto eps = dhlab::bing::theta_certificate(apex, D);
    if (!eps) {
      ok = false;
      certs.push_back({{"apex", dhlab::io::to_json(apex)}, {"eps", nullptr}});
      continue;
    }
    auto cert = dhlab::bing::capture_count(apex, *eps, D);
    ok = ok && cert.captured.size() <= 1;
    certs.push_back(dhlab::io::to_json(cert));
  }
  std::cout << json{{"certificates", certs}, {"theta_discrete", ok}}.dump(2) << '\n';
  return ok ? kOk : kVerifyFailed;
}

int cmd_bing_growth(const BingArgs &a) {
  using dhlab::bing::SeqFamily;
  dhlab::bing::BPoint apex = a.apex.empty() ? dhlab::bing::BPoint(dhlab::Rat(0), dhlab::Rat(0))
                                            : parse_bpoint(a.apex, "--apex");
  if (a.K < 1) throw InputError("--K must be >= 1");
  SeqFamily f;
  if (a.family == "line-approach") {
    if (a.side != "left" && a.side != "right") throw InputError("--side: expected left or right");
    f = SeqFamily::line_approach(apex, a.side == "left" ? dhlab::bing::Side::left : dhlab::bing::Side::right, a.K);
  } else if (a.family == "naturals") {
    f = SeqFamily::naturals_on_axis(a.K);
  } else if (a.family == "row") {
    dhlab::Rat b = parse_rat(a.height, "--height");
    if (b.sign() < 0) throw InputError("--height must be >= 0");
    f = SeqFamily::row_at_height(b, a.K);
  } else {
    throw InputError("--family: expected line-approach, naturals or row");
  }
  std::vector<dhlab::Rat> eps;
  for (const auto &s : a.eps_list) eps.push_back(parse_rat(s, "--eps-list"));
  if (eps.empty())
    for (int j = 0; j <= a.K; ++j) eps.push_back(dhlab::pow10(-j));
  std::cout << "eps,count\n";
  for (const auto &row : dhlab::bing::capture_growth(apex, f, eps)) std::cout << row.eps.str() << ',' << row.count << '\n';
  return kOk;
}

// ---- fintop ----

json properties(const dhlab::fintop::FinTop &T) {
  using namespace dhlab::fintop;
  return {{"connected", is_connected(T)},
          {"hausdorff", is_hausdorff(T)},
          {"t1", is_t1(T)},
          {"locally_connected", is_locally_connected(T)}};
}

/// Checks on T: idempotence of the semi-regularization, inclusion of its
/// opens, and the transfer of Hausdorff, connectedness and local
/// connectedness.
json semireg_checks(const dhlab::fintop::FinTop &T) {
  using namespace dhlab::fintop;
  FinTop S = semiregularize(T);
  bool subset = std::all_of(S.opens().begin(), S.opens().end(), [&](Set o) { return T.is_open(o); });
  bool homeos = true;
  for (const HomeoMap &f : homeomorphisms(T, T)) homeos = homeos && homeo_semireg_commute(T, f);
  return {{"idempotent", semiregularize(S) == S},
          {"opens_subset", subset},
          {"hausdorff_preserved", is_hausdorff(T) == is_hausdorff(S)},
          {"connected_preserved", is_connected(T) == is_connected(S)},
          {"locally_connected_forward", !is_locally_connected(T) || is_locally_connected(S)},
          {"homeomorphisms_commute", homeos}};
}

bool all_true(const json &j) {
  for (const auto &[k, v] : j.items())
    if (!v.get<bool>()) return false;
  return true;
}

int cmd_fintop_check(const std::string &path) {
  auto T = dhlab::io::topology_from_json(dhlab::io::read_file(path));
  json checks = semireg_checks(T);
  json out = {{"topology", dhlab::io::topology_to_json(T)},
              {"properties", properties(T)},
              {"semiregularization", properties(dhlab::fintop::semiregularize(T))},
              {"checks", checks}};
  std::cout << out.dump(2) << '\n';
  return all_true(checks) ? kOk : kVerifyFailed;
}

int cmd_fintop_semireg(const std::string &path) {
  auto T = dhlab::io::topology_from_json(dhlab::io::read_file(path));
  std::cout << dhlab::io::topology_to_json(dhlab::fintop::semiregularize(T)).dump() << '\n';
  return kOk;
}

json homogeneity_profile(const dhlab::fintop::FinTop &T) {
  using namespace dhlab::fintop;
  json k_hom = json::array(), k_strong = json::array();
  for (int k = 1; k <= T.size(); ++k) {
    k_hom.push_back(is_n_homogeneous(T, k));
    k_strong.push_back(is_strongly_n_homogeneous(T, k));
  }
  return {{"homogeneous", is_n_homogeneous(T, 1)},
          {"k_homogeneous", k_hom},
          {"strongly_k_homogeneous", k_strong},
          {"dh", is_dh(T)},
          {"sdh", is_sdh(T)}};
}

int cmd_fintop_homogeneity(const std::string &path) {
  auto T = dhlab::io::topology_from_json(dhlab::io::read_file(path));
  std::cout << json{{"topology", dhlab::io::topology_to_json(T)}, {"profile", homogeneity_profile(T)}}.dump(2) << '\n';
  return kOk;
}

int cmd_fintop_enumerate(int n, bool large, bool quiet) {
  if (n < 1 || n > 7 || (n > 4 && !large)) throw InputError("--n must be in [1, 4], or up to 7 with --large");
  std::map<std::string, long> tally;
  long count = 0;
  dhlab::fintop::for_each_topology(
      n,
      [&](const dhlab::fintop::FinTop &T) {
        ++count;
        json checks = semireg_checks(T);
        for (const auto &[k, v] : checks.items()) tally[k] += v.get<bool>() ? 0 : 1;
        json props = properties(T);
        for (const auto &[k, v] : props.items()) tally[k] += v.get<bool>() ? 1 : 0;
        if (!quiet) std::cout << json{{"topology", dhlab::io::topology_to_json(T)}, {"checks", checks}}.dump() << '\n';
      },
      {large});
  json failures = json::object(), counts = json::object();
  for (const auto &[k, v] : tally) {
    bool is_check = k != "connected" && k != "hausdorff" && k != "t1" && k != "locally_connected";
    (is_check ? failures : counts)[k] = v;
  }
  std::cout << json{{"n", n}, {"topologies", count}, {"failures", failures}, {"with_property", counts}}.dump() << '\n';
  for (const auto &[k, v] : failures.items())
    if (v.get<long>() != 0) return kVerifyFailed;
  return kOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"dhlab: homeomorphism extension, Bing space and finite topology tools"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed = 0;
  int budget = 0;
  app.add_option("--config", g.config_path, std::string("config JSON (default: $") + kConfigEnv + ")");
  auto *seed_opt = app.add_option("--seed", seed, "random seed");
  auto *budget_opt = app.add_option("--budget", budget, "round-trip sample budget");
  app.add_option("--out-dir", g.out_dir, "directory for output files");
  app.add_flag("--svg", g.svg, "also write grid.svg");

  std::string problem, trace, projection;
  auto *extend = app.add_subcommand("extend", "extend a bijection to a homeomorphism and verify it");
  extend->add_option("problem", problem, "problem JSON")->required();
  extend->add_option("--project", projection, "projection axes for dim > 2, e.g. xy");

  auto *verify = app.add_subcommand("verify", "verify a trace against a problem");
  verify->add_option("problem", problem, "problem JSON")->required();
  verify->add_option("--trace", trace, "trace JSON")->required();

  auto *render = app.add_subcommand("render", "render a trace as SVG");
  render->add_option("trace", trace, "trace JSON")->required();
  render->add_option("--problem", problem, "problem JSON for marked-point arrows");
  render->add_option("--project", projection, "projection axes for dim > 2, e.g. xy");

  BingArgs ba;
  auto *bing = app.add_subcommand("bing", "Bing space queries (exact)");
  bing->require_subcommand(1);
  std::string bing_which;
  for (const char *name : {"contains", "closure", "ritter"}) {
    auto *sub = bing->add_subcommand(name, std::string(name) + " test for a basic neighbourhood");
    sub->add_option("--center", ba.center, "center x,y")->required();
    sub->add_option("--eps", ba.eps, "radius p/q")->required();
    sub->add_option("--point", ba.point, "point x,y")->required();
    sub->callback([&bing_which, name] { bing_which = name; });
  }
  auto *theta = bing->add_subcommand("theta", "theta-discreteness certificates for a finite point list");
  theta->add_option("--points", ba.points_file, "points JSON")->required();
  theta->add_option("--apex", ba.apex, "single apex x,y (default: every listed point)");
  auto *growth = bing->add_subcommand("growth", "capture counts of a sequence family as eps shrinks (CSV)");
  growth->add_option("--family", ba.family, "line-approach, naturals or row");
  growth->add_option("--apex", ba.apex, "apex x,y (default 0,0)");
  growth->add_option("--side", ba.side, "left or right");
  growth->add_option("--height", ba.height, "row height p/q");
  growth->add_option("--K", ba.K, "prefix length");
  growth->add_option("--eps-list", ba.eps_list, "radii p/q (default 10^0 .. 10^-K)");

  auto *fintop = app.add_subcommand("fintop", "finite topological spaces");
  fintop->require_subcommand(1);
  std::string topo;
  int n = 3;
  bool large = false, quiet = false;
  auto *check = fintop->add_subcommand("check", "properties and semi-regularization checks");
  check->add_option("topology", topo, "topology JSON")->required();
  auto *semireg = fintop->add_subcommand("semireg", "print the semi-regularization");
  semireg->add_option("topology", topo, "topology JSON")->required();
  auto *homog = fintop->add_subcommand("homogeneity", "homogeneity profile");
  homog->add_option("topology", topo, "topology JSON")->required();
  auto *enumerate = fintop->add_subcommand("enumerate", "all topologies on n points with check tallies");
  enumerate->add_option("--n", n, "ground set size");
  enumerate->add_flag("--large", large, "allow n in [5, 7]");
  enumerate->add_flag("--quiet", quiet, "print the tally only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }
  if (*seed_opt) g.seed = seed;
  if (*budget_opt) g.budget = budget;

  try {
    if (*extend) return cmd_extend(g, problem, projection);
    if (*verify) return cmd_verify(g, problem, trace);
    if (*render) return cmd_render(g, trace, problem, projection);
    if (*bing) {
      if (*theta) return cmd_bing_theta(ba);
      if (*growth) return cmd_bing_growth(ba);
      return cmd_bing_predicate(bing_which, ba);
    }
    if (*check) return cmd_fintop_check(topo);
    if (*semireg) return cmd_fintop_semireg(topo);
    if (*homog) return cmd_fintop_homogeneity(topo);
    if (*enumerate) return cmd_fintop_enumerate(n, large, quiet);
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConstructionFailed;
  }
  return kBadInput;
}
