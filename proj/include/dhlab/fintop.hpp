// SPDX-License-Identifier: Apache-2.0
//
// Finite topological spaces on {0, ..., n-1}. Subsets are bitmasks; a
// topology is the sorted list of its open sets. Every point x of a finite
// space has a minimal open neighbourhood U_x (the intersection of all opens
// containing x) and these form a neighbourhood base, which is what most of
// the decision procedures below rely on.

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dhlab::fintop {

using Set = std::uint32_t;

constexpr int kMaxPoints = 16;

inline Set bit(int x) { return Set{1} << x; }
inline Set full_set(int n) { return n == 32 ? ~Set{0} : (Set{1} << n) - 1; }
inline int count(Set s) { return std::popcount(s); }
inline bool subset_of(Set a, Set b) { return (a & ~b) == 0; }

inline std::vector<int> members(Set s) {
  std::vector<int> out;
  for (; s; s &= s - 1) out.push_back(std::countr_zero(s));
  return out;
}

inline std::string set_str(Set s) {
  std::string out = "{";
  for (int x : members(s)) out += (out.size() > 1 ? "," : "") + std::to_string(x);
  return out + "}";
}

/// Thrown by the FinTop constructor. When the family fails to be closed under
/// union or intersection, `pair` holds the two offending open sets.
class InvalidTopology : public std::invalid_argument {
public:
  InvalidTopology(const std::string &what, std::optional<std::pair<Set, Set>> pair = std::nullopt)
      : std::invalid_argument(what), pair(pair) {}
  std::optional<std::pair<Set, Set>> pair;
};

class FinTop {
public:
  FinTop(int n, std::vector<Set> opens) : n_(n), opens_(std::move(opens)) {
    if (n < 1 || n > kMaxPoints)
      throw InvalidTopology("ground set size must be in [1, " + std::to_string(kMaxPoints) + "]");
    const Set all = full_set(n);
    std::sort(opens_.begin(), opens_.end());
    opens_.erase(std::unique(opens_.begin(), opens_.end()), opens_.end());
    for (Set o : opens_)
      if (!subset_of(o, all)) throw InvalidTopology("open set " + set_str(o) + " leaves the ground set");
    if (!is_open(0)) throw InvalidTopology("empty set is not open");
    if (!is_open(all)) throw InvalidTopology("ground set is not open");
    for (std::size_t i = 0; i < opens_.size(); ++i)
      for (std::size_t j = i + 1; j < opens_.size(); ++j) {
        Set a = opens_[i], b = opens_[j];
        if (!is_open(a | b))
          throw InvalidTopology("union of " + set_str(a) + " and " + set_str(b) + " is not open", std::pair{a, b});
        if (!is_open(a & b))
          throw InvalidTopology("intersection of " + set_str(a) + " and " + set_str(b) + " is not open",
                                std::pair{a, b});
      }
    minimal_.assign(static_cast<std::size_t>(n), all);
    for (Set o : opens_)
      for (int x : members(o)) minimal_[static_cast<std::size_t>(x)] &= o;
  }

  static FinTop discrete(int n) {
    std::vector<Set> all(std::size_t{1} << n);
    std::iota(all.begin(), all.end(), Set{0});
    return {n, std::move(all)};
  }
  static FinTop indiscrete(int n) { return {n, {0, full_set(n)}}; }
  /// {0} open, 1 closed.
  static FinTop sierpinski() { return {2, {0, 0b01, 0b11}}; }

  /// Sum of two spaces; points of `b` are shifted by a.size().
  static FinTop disjoint_union(const FinTop &a, const FinTop &b) {
    std::vector<Set> opens;
    for (Set x : a.opens())
      for (Set y : b.opens()) opens.push_back(x | (y << a.size()));
    return {a.size() + b.size(), std::move(opens)};
  }

  int size() const { return n_; }
  Set full() const { return full_set(n_); }
  const std::vector<Set> &opens() const { return opens_; }
  bool is_open(Set s) const { return std::binary_search(opens_.begin(), opens_.end(), s); }
  Set minimal_open(int x) const { return minimal_[static_cast<std::size_t>(x)]; }

  friend bool operator==(const FinTop &a, const FinTop &b) { return a.n_ == b.n_ && a.opens_ == b.opens_; }

private:
  int n_;
  std::vector<Set> opens_;
  std::vector<Set> minimal_;
};

inline Set interior(const FinTop &T, Set s) {
  Set out = 0;
  for (Set o : T.opens())
    if (subset_of(o, s)) out |= o;
  return out;
}

inline Set closure(const FinTop &T, Set s) { return T.full() & ~interior(T, T.full() & ~s); }

inline bool is_clopen(const FinTop &T, Set s) { return T.is_open(s) && T.is_open(T.full() & ~s); }

/// S = Int(Cl(S)); S must be open.
inline bool is_regular_open(const FinTop &T, Set s) {
  if (!T.is_open(s)) throw std::invalid_argument("is_regular_open: " + set_str(s) + " is not open");
  return interior(T, closure(T, s)) == s;
}

/// Closes `base` under unions. The empty set is always included.
inline std::vector<Set> union_closure(const std::vector<Set> &base) {
  std::set<Set> out{0};
  for (Set b : base) {
    std::vector<Set> add;
    for (Set o : out) add.push_back(o | b);
    out.insert(add.begin(), add.end());
  }
  return {out.begin(), out.end()};
}

/// The topology generated by the regular open sets Int(Cl(O)). These are
/// closed under finite intersection already, so only unions are added.
inline FinTop semiregularize(const FinTop &T) {
  std::vector<Set> base;
  for (Set o : T.opens()) base.push_back(interior(T, closure(T, o)));
  return {T.size(), union_closure(base)};
}

inline bool is_connected(const FinTop &T) {
  for (Set o : T.opens())
    if (o != 0 && o != T.full() && T.is_open(T.full() & ~o)) return false;
  return true;
}

/// Connectedness of S with the subspace topology.
inline bool subspace_connected(const FinTop &T, Set s) {
  std::set<Set> rel;
  for (Set o : T.opens()) rel.insert(o & s);
  for (Set r : rel)
    if (r != 0 && r != s && rel.count(s & ~r)) return false;
  return true;
}

inline bool is_hausdorff(const FinTop &T) {
  for (int x = 0; x < T.size(); ++x)
    for (int y = x + 1; y < T.size(); ++y)
      if (T.minimal_open(x) & T.minimal_open(y)) return false;
  return true;
}

inline bool is_t1(const FinTop &T) {
  for (int x = 0; x < T.size(); ++x)
    if (!T.is_open(T.full() & ~bit(x))) return false;
  return true;
}

/// Every minimal open neighbourhood is connected (they form a base).
inline bool is_locally_connected(const FinTop &T) {
  for (int x = 0; x < T.size(); ++x)
    if (!subspace_connected(T, T.minimal_open(x))) return false;
  return true;
}

struct HomeoMap {
  std::vector<int> perm;

  Set image(Set s) const {
    Set out = 0;
    for (int x : members(s)) out |= bit(perm[static_cast<std::size_t>(x)]);
    return out;
  }
  friend bool operator==(const HomeoMap &, const HomeoMap &) = default;
};

inline bool is_homeomorphism(const FinTop &A, const FinTop &B, const HomeoMap &f) {
  if (A.size() != B.size() || A.opens().size() != B.opens().size()) return false;
  if (static_cast<int>(f.perm.size()) != A.size()) return false;
  Set seen = 0;
  for (int y : f.perm) {
    if (y < 0 || y >= A.size() || (seen & bit(y))) return false;
    seen |= bit(y);
  }
  // Injective on opens with equally many opens on both sides, so images
  // being open makes preimages open too.
  for (Set o : A.opens())
    if (!B.is_open(f.image(o))) return false;
  return true;
}

/// All homeomorphisms A -> B in lexicographic permutation order. Candidates
/// are pruned point by point on the size of the minimal open neighbourhood.
inline std::vector<HomeoMap> homeomorphisms(const FinTop &A, const FinTop &B) {
  std::vector<HomeoMap> out;
  const int n = A.size();
  if (n != B.size() || A.opens().size() != B.opens().size()) return out;
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::function<void(int, Set)> rec = [&](int x, Set used) {
    if (x == n) {
      HomeoMap f{perm};
      if (is_homeomorphism(A, B, f)) out.push_back(std::move(f));
      return;
    }
    for (int y = 0; y < n; ++y) {
      if (used & bit(y)) continue;
      if (count(A.minimal_open(x)) != count(B.minimal_open(y))) continue;
      perm[static_cast<std::size_t>(x)] = y;
      rec(x + 1, used | bit(y));
    }
  };
  rec(0, 0);
  return out;
}

/// In a finite space S is discrete iff each minimal open set meets S in at
/// most one point.
inline bool is_discrete_subset(const FinTop &T, Set s) {
  for (int x = 0; x < T.size(); ++x)
    if (count(T.minimal_open(x) & s) > 1) return false;
  return true;
}

/// Discrete subsets in increasing bitmask order.
inline std::vector<Set> discrete_subsets(const FinTop &T) {
  std::vector<Set> out;
  for (Set s = 0; s <= T.full(); ++s)
    if (is_discrete_subset(T, s)) out.push_back(s);
  return out;
}

namespace detail {

using Tuple = std::vector<int>;

inline void ordered_tuples(Set from, int k, Tuple &cur, std::vector<Tuple> &out) {
  if (static_cast<int>(cur.size()) == k) { out.push_back(cur); return; }
  for (int x : members(from)) {
    cur.push_back(x);
    ordered_tuples(from & ~bit(x), k, cur, out);
    cur.pop_back();
  }
}

// True iff the group acts transitively on `targets` (all sets of one size).
inline bool transitive_on_sets(const std::vector<HomeoMap> &group, const std::vector<Set> &targets) {
  if (targets.empty()) return true;
  std::set<Set> orbit;
  for (const HomeoMap &g : group) orbit.insert(g.image(targets.front()));
  return orbit.size() == targets.size();
}

// True iff the group acts transitively on the orderings of `targets`, i.e.
// every bijection between two target sets extends to a group element.
inline bool transitive_on_orderings(const std::vector<HomeoMap> &group, const std::vector<Set> &targets,
                                    int k) {
  if (targets.empty()) return true;
  std::set<Tuple> orbit;
  Tuple cur;
  std::vector<Tuple> start;
  ordered_tuples(targets.front(), k, cur, start);
  for (const HomeoMap &g : group) {
    Tuple t;
    for (int x : start.front()) t.push_back(g.perm[static_cast<std::size_t>(x)]);
    orbit.insert(std::move(t));
  }
  std::size_t orderings = 1;
  for (int i = 2; i <= k; ++i) orderings *= static_cast<std::size_t>(i);
  return orbit.size() == targets.size() * orderings;
}

inline std::vector<Set> subsets_of_size(const FinTop &T, int k) {
  std::vector<Set> out;
  for (Set s = 0; s <= T.full(); ++s)
    if (count(s) == k) out.push_back(s);
  return out;
}

}  // namespace detail

/// Any two k-subsets are related by a self-homeomorphism.
inline bool is_n_homogeneous(const FinTop &T, int k) {
  if (k < 1 || k > T.size()) throw std::invalid_argument("is_n_homogeneous: need 1 <= k <= n");
  return detail::transitive_on_sets(homeomorphisms(T, T), detail::subsets_of_size(T, k));
}

/// Every bijection between k-subsets extends to a self-homeomorphism.
inline bool is_strongly_n_homogeneous(const FinTop &T, int k) {
  if (k < 1 || k > T.size()) throw std::invalid_argument("is_strongly_n_homogeneous: need 1 <= k <= n");
  return detail::transitive_on_orderings(homeomorphisms(T, T), detail::subsets_of_size(T, k), k);
}

namespace detail {
inline std::vector<std::vector<Set>> discrete_by_size(const FinTop &T) {
  std::vector<std::vector<Set>> by(static_cast<std::size_t>(T.size() + 1));
  for (Set s : discrete_subsets(T)) by[static_cast<std::size_t>(count(s))].push_back(s);
  return by;
}
}  // namespace detail

inline bool is_dh(const FinTop &T) {
  auto group = homeomorphisms(T, T);
  for (const auto &sets : detail::discrete_by_size(T))
    if (!detail::transitive_on_sets(group, sets)) return false;
  return true;
}

inline bool is_sdh(const FinTop &T) {
  auto group = homeomorphisms(T, T);
  auto by = detail::discrete_by_size(T);
  for (std::size_t k = 1; k < by.size(); ++k)
    if (!detail::transitive_on_orderings(group, by[k], static_cast<int>(k))) return false;
  return true;
}

struct ClopenFamily {
  std::vector<std::pair<int, Set>> cells;  // (a, V_a), sorted by a
  Set remainder = 0;                       // complement of the union, clopen
};

struct SeparationFailure {
  enum class Reason { not_discrete, not_clopen_at_point };
  Reason reason;
  int witness;  // point whose minimal open set breaks the precondition
  std::string message;
};

/// Pairwise disjoint clopen V_a containing a, with clopen remainder. Requires
/// A discrete and the minimal open set of every a in A to be clopen, which is
/// the finite analogue of a zero-dimensional space around the marked points.
inline std::variant<ClopenFamily, SeparationFailure> clopen_separation(const FinTop &T, Set A) {
  for (int x = 0; x < T.size(); ++x)
    if (count(T.minimal_open(x) & A) > 1)
      return SeparationFailure{SeparationFailure::Reason::not_discrete, x,
                               "minimal open set of " + std::to_string(x) + " meets A in " +
                                   set_str(T.minimal_open(x) & A)};
  for (int a : members(A))
    if (!is_clopen(T, T.minimal_open(a)))
      return SeparationFailure{SeparationFailure::Reason::not_clopen_at_point, a,
                               "minimal open set " + set_str(T.minimal_open(a)) + " of " + std::to_string(a) +
                                   " is not closed"};
  ClopenFamily fam;
  Set used = 0;
  for (int a : members(A)) {
    Set v = T.minimal_open(a);
    for (int b : members(A & ~bit(a))) v &= ~T.minimal_open(b);
    fam.cells.emplace_back(a, v);
    used |= v;
  }
  fam.remainder = T.full() & ~used;
  return fam;
}

/// Checks f(Int Cl O) = Int Cl f(O) for every open O and that f is also a
/// homeomorphism of the semi-regularization.
inline bool homeo_semireg_commute(const FinTop &T, const HomeoMap &f) {
  if (!is_homeomorphism(T, T, f)) throw std::invalid_argument("homeo_semireg_commute: not a homeomorphism");
  for (Set o : T.opens())
    if (f.image(interior(T, closure(T, o))) != interior(T, closure(T, f.image(o)))) return false;
  FinTop S = semiregularize(T);
  return is_homeomorphism(S, S, f);
}

struct EnumerateOptions {
  bool allow_large = false;  // permit n in [5, 7]
};

/// Calls visit(T) once for every topology on n labelled points.
///
/// Topologies on a finite set correspond one-to-one to preorders (x <= y iff
/// y lies in U_x). Preorders are built one point at a time: the new point k
/// picks the old points below it (a down-closed set) and above it (an
/// up-closed set), with everything below already below everything above.
inline void for_each_topology(int n, const std::function<void(const FinTop &)> &visit,
                              EnumerateOptions opt = {}) {
  if (n < 1) throw std::invalid_argument("enumerate_topologies: n must be >= 1");
  if (n > 7 || (n > 4 && !opt.allow_large))
    throw std::invalid_argument("enumerate_topologies: n = " + std::to_string(n) +
                                (n > 7 ? " is beyond the supported range" : " needs allow_large"));
  std::vector<Set> up(static_cast<std::size_t>(n));
  std::function<void(int)> rec = [&](int k) {
    if (k == n) {
      std::vector<Set> opens;
      for (Set s = 0; s <= full_set(n); ++s) {
        bool ok = true;
        for (int x : members(s)) ok = ok && subset_of(up[static_cast<std::size_t>(x)], s);
        if (ok) opens.push_back(s);
      }
      visit(FinTop(n, std::move(opens)));
      return;
    }
    const Set old = full_set(k);
    for (Set below = 0; below <= old; ++below) {
      bool down_closed = true;
      for (int x : members(below))
        for (int z = 0; z < k; ++z)
          if ((up[static_cast<std::size_t>(z)] & bit(x)) && !(below & bit(z))) down_closed = false;
      if (!down_closed) continue;
      for (Set above = 0; above <= old; ++above) {
        bool ok = true;
        for (int y : members(above)) ok = ok && subset_of(up[static_cast<std::size_t>(y)], above);
        for (int x : members(below)) ok = ok && subset_of(above, up[static_cast<std::size_t>(x)]);
        if (!ok) continue;
        auto saved = up;
        for (int x : members(below)) up[static_cast<std::size_t>(x)] |= bit(k);
        up[static_cast<std::size_t>(k)] = above | bit(k);
        rec(k + 1);
        up = std::move(saved);
      }
    }
  };
  rec(0);
}

inline std::vector<FinTop> enumerate_topologies(int n, EnumerateOptions opt = {}) {
  std::vector<FinTop> out;
  for_each_topology(n, [&](const FinTop &T) { out.push_back(T); }, opt);
  return out;
}

}  // namespace dhlab::fintop
