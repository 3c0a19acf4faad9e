// SPDX-License-Identifier: Apache-2.0
//
// JSON formats for problems, move traces, verification reports, Bing-space
// objects, finite topologies and run configuration.
//
// Objects are std::map backed, so keys serialize in sorted order. Doubles are
// written as shortest round-trip decimals and read back bit-exactly.
// Malformed input raises InputError.

#pragma once

#include "dhlab/bing.hpp"
#include "dhlab/config.hpp"
#include "dhlab/extend.hpp"
#include "dhlab/fintop.hpp"
#include "dhlab/moves.hpp"
#include "dhlab/verify.hpp"

#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace dhlab::io {

using json = nlohmann::json;

class InputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline const json &field(const json &j, const char *key, const std::string &where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(where + ": missing key \"" + key + "\"");
  return *it;
}

inline double number(const json &j, const std::string &where) {
  if (!j.is_number()) throw InputError(where + ": expected a number");
  return j.get<double>();
}

inline double number_or(const json &j, const char *key, double fallback, const std::string &where) {
  auto it = j.find(key);
  return it == j.end() ? fallback : number(*it, where + "." + key);
}

inline bool flag_or(const json &j, const char *key, bool fallback, const std::string &where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) throw InputError(where + "." + key + ": expected true or false");
  return it->get<bool>();
}

inline void only_keys(const json &j, std::initializer_list<const char *> keys, const std::string &where) {
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw InputError(where + ": unknown key \"" + it.key() + "\"");
}

inline std::string text(const json &j, const std::string &where) {
  if (!j.is_string()) throw InputError(where + ": expected a string");
  return j.get<std::string>();
}

}  // namespace detail

inline json read_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error &e) {
    throw InputError(path + ": " + e.what());
  }
}

/// Pretty-printed with a trailing newline.
inline void write_file(const std::string &path, const json &j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

// ---- vectors and moves ----

inline json to_json(const VecN &v) { return json(v.to_vector()); }

inline VecN vec_from_json(const json &j, int dim, const std::string &where) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw InputError(where + ": expected an array of " + std::to_string(dim) + " numbers");
  VecN v(dim);
  for (int i = 0; i < dim; ++i) v[i] = detail::number(j[static_cast<std::size_t>(i)], where);
  if (!v.finite()) throw InputError(where + ": non-finite coordinate");
  return v;
}

inline json to_json(const Move &m) {
  if (const auto *t = std::get_if<AnnulusTwist>(&m))
    return {{"kind", "annulus_twist"}, {"r", t->r}, {"w", t->w}, {"theta", t->theta}, {"core", t->core}};
  if (const auto *s = std::get_if<RadialStretch>(&m)) {
    json knots = json::array();
    for (const auto &[rho, psi] : s->knots) knots.push_back({rho, psi});
    return {{"kind", "radial_stretch"}, {"knots", knots}, {"tail", s->shift_tail ? "shift" : "identity"}};
  }
  if (const auto *b = std::get_if<BallPush>(&m))
    return {{"kind", "ball_push"}, {"center", to_json(b->center)}, {"R", b->R}, {"v", to_json(b->v)},
            {"core", b->core}, {"inverse", b->inverse}};
  const auto &t = std::get<TubeSlide>(m);
  return {{"kind", "tube_slide"},   {"a", to_json(t.a)},         {"b", to_json(t.b)},
          {"radius", t.radius},     {"core", t.core},            {"cap_back", t.cap_back},
          {"cap_front", t.cap_front}, {"inverse", t.inverse}};
}

inline Move move_from_json(const json &j, int dim, const std::string &where) {
  const std::string kind = detail::text(detail::field(j, "kind", where), where + ".kind");
  auto num = [&](const char *k) { return detail::number(detail::field(j, k, where), where + "." + k); };
  Move m;
  if (kind == "annulus_twist") {
    detail::only_keys(j, {"kind", "r", "w", "theta", "core"}, where);
    m = AnnulusTwist{num("r"), num("w"), num("theta"), detail::number_or(j, "core", 0, where)};
  } else if (kind == "radial_stretch") {
    detail::only_keys(j, {"kind", "knots", "tail"}, where);
    RadialStretch s;
    s.knots.clear();
    const json &ks = detail::field(j, "knots", where);
    if (!ks.is_array()) throw InputError(where + ".knots: expected an array");
    for (const json &k : ks) {
      if (!k.is_array() || k.size() != 2) throw InputError(where + ".knots: each knot is [rho, psi]");
      s.knots.emplace_back(detail::number(k[0], where + ".knots"), detail::number(k[1], where + ".knots"));
    }
    std::string tail = j.contains("tail") ? detail::text(j["tail"], where + ".tail") : "identity";
    if (tail != "identity" && tail != "shift") throw InputError(where + ".tail: expected \"identity\" or \"shift\"");
    s.shift_tail = tail == "shift";
    m = s;
  } else if (kind == "ball_push") {
    detail::only_keys(j, {"kind", "center", "R", "v", "core", "inverse"}, where);
    m = BallPush{vec_from_json(detail::field(j, "center", where), dim, where + ".center"), num("R"),
                 vec_from_json(detail::field(j, "v", where), dim, where + ".v"),
                 detail::number_or(j, "core", 0, where), detail::flag_or(j, "inverse", false, where)};
  } else if (kind == "tube_slide") {
    detail::only_keys(j, {"kind", "a", "b", "radius", "core", "cap_back", "cap_front", "inverse"}, where);
    m = TubeSlide{vec_from_json(detail::field(j, "a", where), dim, where + ".a"),
                  vec_from_json(detail::field(j, "b", where), dim, where + ".b"),
                  num("radius"),
                  detail::number_or(j, "core", 0, where),
                  num("cap_back"),
                  num("cap_front"),
                  detail::flag_or(j, "inverse", false, where)};
  } else {
    throw InputError(where + ": unknown move kind \"" + kind + "\"");
  }
  try {
    moves::validate(m, dim);
  } catch (const std::invalid_argument &e) {
    throw InputError(where + ": " + e.what());
  }
  return m;
}

inline json trace_to_json(const Homeo &h) {
  json ms = json::array();
  for (const Move &m : h.moves()) ms.push_back(to_json(m));
  return {{"dim", h.dim()}, {"moves", ms}};
}

inline Homeo trace_from_json(const json &j) {
  const json &d = detail::field(j, "dim", "trace");
  if (!d.is_number_integer() || d.get<int>() < 2 || d.get<int>() > kMaxDim)
    throw InputError("trace.dim: expected an integer in [2, 8]");
  const int dim = d.get<int>();
  const json &ms = detail::field(j, "moves", "trace");
  if (!ms.is_array()) throw InputError("trace.moves: expected an array");
  std::vector<Move> out;
  for (std::size_t i = 0; i < ms.size(); ++i) out.push_back(move_from_json(ms[i], dim, "trace.moves[" + std::to_string(i) + "]"));
  return Homeo(dim, std::move(out));
}

// ---- extension problems and reports ----

inline json problem_to_json(const ExtensionProblem &P) {
  json A = json::array(), B = json::array();
  for (const VecN &p : P.A.points) A.push_back(to_json(p));
  for (const VecN &p : P.B.points) B.push_back(to_json(p));
  return {{"dim", P.dim}, {"A", A}, {"B", B}, {"sigma", P.sigma}};
}

/// Parses and validates {"dim", "A", "B", "sigma"}.
inline ExtensionProblem problem_from_json(const json &j) {
  detail::only_keys(j, {"dim", "A", "B", "sigma"}, "problem");
  const json &d = detail::field(j, "dim", "problem");
  if (!d.is_number_integer() || d.get<int>() < 2 || d.get<int>() > kMaxDim)
    throw InputError("problem.dim: expected an integer in [2, 8]");
  ExtensionProblem P;
  P.dim = d.get<int>();
  auto points = [&](const char *key) {
    const json &arr = detail::field(j, key, "problem");
    if (!arr.is_array()) throw InputError(std::string("problem.") + key + ": expected an array of points");
    std::vector<VecN> pts;
    for (std::size_t i = 0; i < arr.size(); ++i)
      pts.push_back(vec_from_json(arr[i], P.dim, std::string("problem.") + key + "[" + std::to_string(i) + "]"));
    return pts;
  };
  std::vector<VecN> A = points("A"), B = points("B");
  if (A.size() != B.size())
    throw InputError("problem: |A| = " + std::to_string(A.size()) + " differs from |B| = " + std::to_string(B.size()));
  const json &s = detail::field(j, "sigma", "problem");
  if (!s.is_array()) throw InputError("problem.sigma: expected an array of indices");
  for (const json &x : s) {
    if (!x.is_number_integer()) throw InputError("problem.sigma: entries must be integers");
    P.sigma.push_back(x.get<int>());
  }
  try {
    P.A = MarkedSet::from_points(std::move(A));
    P.B = MarkedSet::from_points(std::move(B));
    P.validate();
  } catch (const std::invalid_argument &e) {
    throw InputError(e.what());
  }
  return P;
}

namespace detail {
// JSON has no infinity; unbounded values are written as null.
inline json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
}  // namespace detail

inline json report_to_json(const VerificationReport &r) {
  return {{"marked_point_max_error", detail::finite_or_null(r.marked_point_max_error)},
          {"inverse_roundtrip_max_error", detail::finite_or_null(r.inverse_roundtrip_max_error)},
          {"support_violation_max", detail::finite_or_null(r.support_violation_max)},
          {"collision_flag", r.collision_flag},
          {"samples_used", r.samples_used},
          {"targeted_samples_used", r.targeted_samples_used},
          {"exterior_samples_used", r.exterior_samples_used},
          {"support_bound", r.support_bound},
          {"tail_shift", r.tail_shift},
          {"thresholds", {{"marked", r.thresholds.marked}, {"roundtrip", r.thresholds.roundtrip},
                          {"support", r.thresholds.support}}},
          {"pass", {{"marked", r.marked_ok()}, {"roundtrip", r.roundtrip_ok()}, {"support", r.support_ok()},
                    {"overall", r.passed()}}}};
}

inline json construction_to_json(const ExtensionResult &r) {
  return {{"moves", r.homeo.size()},
          {"slides", r.slides},
          {"attempts", r.attempts},
          {"min_path_clearance", detail::finite_or_null(r.min_path_clearance)},
          {"min_origin_clearance", detail::finite_or_null(r.min_origin_clearance)}};
}

// ---- Bing space ----

inline Rat rat_from_json(const json &j, const std::string &where) {
  if (j.is_number_integer()) return Rat(j.get<long>());
  try {
    return Rat::parse(detail::text(j, where));
  } catch (const InputError &) {
    throw;
  } catch (const std::invalid_argument &e) {
    throw InputError(where + ": " + e.what());
  }
}

inline json to_json(const bing::BPoint &p) { return {{"x", p.x.str()}, {"y", p.y.str()}}; }

inline bing::BPoint bpoint_from_json(const json &j, const std::string &where) {
  detail::only_keys(j, {"x", "y"}, where);
  Rat x = rat_from_json(detail::field(j, "x", where), where + ".x");
  Rat y = rat_from_json(detail::field(j, "y", where), where + ".y");
  try {
    return {std::move(x), std::move(y)};
  } catch (const std::invalid_argument &e) {
    throw InputError(where + ": " + e.what());
  }
}

/// Accepts [{"x":..,"y":..}, ...] or {"points": [...]}.
inline std::vector<bing::BPoint> bpoints_from_json(const json &j) {
  const json &arr = j.is_object() ? detail::field(j, "points", "points file") : j;
  if (!arr.is_array()) throw InputError("points: expected an array");
  std::vector<bing::BPoint> out;
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(bpoint_from_json(arr[i], "points[" + std::to_string(i) + "]"));
  return out;
}

inline json to_json(const bing::BasicNbhd &U) { return {{"center", to_json(U.center)}, {"eps", U.eps.str()}}; }

inline json to_json(const bing::ApexCertificate &c) {
  json cap = json::array();
  for (const auto &p : c.captured) cap.push_back(to_json(p));
  return {{"apex", to_json(c.apex)}, {"eps", c.eps.str()}, {"captured", cap}, {"count", c.captured.size()}};
}

// ---- finite topologies ----

inline json topology_to_json(const fintop::FinTop &T) {
  json opens = json::array();
  for (fintop::Set o : T.opens()) opens.push_back(fintop::members(o));
  return {{"n", T.size()}, {"opens", opens}};
}

/// {"n": k, "opens": [[indices], ...]}. Families that are not closed under
/// union or intersection are rejected naming the offending pair.
inline fintop::FinTop topology_from_json(const json &j) {
  detail::only_keys(j, {"n", "opens"}, "topology");
  const json &n = detail::field(j, "n", "topology");
  if (!n.is_number_integer() || n.get<int>() < 1 || n.get<int>() > fintop::kMaxPoints)
    throw InputError("topology.n: expected an integer in [1, " + std::to_string(fintop::kMaxPoints) + "]");
  const int size = n.get<int>();
  const json &os = detail::field(j, "opens", "topology");
  if (!os.is_array()) throw InputError("topology.opens: expected an array of index lists");
  std::vector<fintop::Set> opens;
  for (const json &o : os) {
    if (!o.is_array()) throw InputError("topology.opens: each open set is an array of indices");
    fintop::Set s = 0;
    for (const json &x : o) {
      if (!x.is_number_integer() || x.get<int>() < 0 || x.get<int>() >= size)
        throw InputError("topology.opens: index out of range [0, " + std::to_string(size) + ")");
      s |= fintop::bit(x.get<int>());
    }
    opens.push_back(s);
  }
  try {
    return fintop::FinTop(size, std::move(opens));
  } catch (const fintop::InvalidTopology &e) {
    throw InputError(std::string("topology: ") + e.what());
  }
}

// ---- configuration ----

/// Keys: seed, tolerances {marked, roundtrip, support}, sample_budget,
/// exterior_samples, max_retries, min_clearance, targeted_samples,
/// plane_strategy ("sweep" or "rays"). Missing keys keep `base`.
inline Config config_from_json(const json &j, Config base = {}) {
  detail::only_keys(j, {"seed", "tolerances", "sample_budget", "exterior_samples", "max_retries", "min_clearance",
                        "targeted_samples", "plane_strategy"},
                    "config");
  auto integer = [&](const char *k, auto &out) {
    if (!j.contains(k)) return;
    if (!j[k].is_number_integer()) throw InputError(std::string("config.") + k + ": expected an integer");
    out = j[k].get<std::decay_t<decltype(out)>>();
  };
  integer("seed", base.seed);
  integer("sample_budget", base.sample_budget);
  integer("exterior_samples", base.exterior_samples);
  integer("max_retries", base.max_retries);
  base.min_clearance = detail::number_or(j, "min_clearance", base.min_clearance, "config");
  base.targeted_samples = detail::flag_or(j, "targeted_samples", base.targeted_samples, "config");
  if (j.contains("tolerances")) {
    const json &t = j["tolerances"];
    detail::only_keys(t, {"marked", "roundtrip", "support"}, "config.tolerances");
    base.tol.marked = detail::number_or(t, "marked", base.tol.marked, "config.tolerances");
    base.tol.roundtrip = detail::number_or(t, "roundtrip", base.tol.roundtrip, "config.tolerances");
    base.tol.support = detail::number_or(t, "support", base.tol.support, "config.tolerances");
  }
  if (j.contains("plane_strategy")) {
    std::string s = detail::text(j["plane_strategy"], "config.plane_strategy");
    if (s == "sweep") base.plane_strategy = PlaneStrategy::sweep;
    else if (s == "rays") base.plane_strategy = PlaneStrategy::rays;
    else throw InputError("config.plane_strategy: expected \"sweep\" or \"rays\"");
  }
  try {
    base.validate();
  } catch (const std::invalid_argument &e) {
    throw InputError(e.what());
  }
  return base;
}

inline json config_to_json(const Config &c) {
  return {{"seed", c.seed},
          {"tolerances", {{"marked", c.tol.marked}, {"roundtrip", c.tol.roundtrip}, {"support", c.tol.support}}},
          {"sample_budget", c.sample_budget},
          {"exterior_samples", c.exterior_samples},
          {"max_retries", c.max_retries},
          {"min_clearance", c.min_clearance},
          {"targeted_samples", c.targeted_samples},
          {"plane_strategy", c.plane_strategy == PlaneStrategy::sweep ? "sweep" : "rays"}};
}

}  // namespace dhlab::io
