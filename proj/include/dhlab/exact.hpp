// SPDX-License-Identifier: Apache-2.0
//
// Exact arithmetic over Q and the quadratic field Q(sqrt 3).
//
// Rat is a canonical rational (gcd(num, den) = 1, den > 0) backed by GMP.
// Quad3 holds r + s*sqrt3 with rational r, s. Since sqrt3 is irrational the
// pair (r, s) is unique for every field element, so equality is structural
// and the sign of any element is decidable without floating point.

#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace dhlab {

class Rat {
public:
  Rat() = default;
  Rat(long v) : q_(v) {}  // NOLINT: implicit from integers is intended
  Rat(const mpz_class &num, const mpz_class &den) : q_(num, den) {
    if (den == 0) throw std::domain_error("Rat: zero denominator");
    q_.canonicalize();
  }
  explicit Rat(const mpz_class &v) : q_(v) {}
  explicit Rat(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

  /// Parses "p/q" or the integer shorthand "p". Whitespace is not accepted.
  static Rat parse(std::string_view text);

  mpz_class num() const { return q_.get_num(); }
  mpz_class den() const { return q_.get_den(); }
  const mpq_class &raw() const { return q_; }

  int sign() const { return sgn(q_); }
  bool is_zero() const { return sgn(q_) == 0; }
  double to_double() const { return q_.get_d(); }

  /// Canonical text form, always "p/q" (integers print as "p/1").
  std::string str() const {
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
  }

  // GMP keeps mpq results canonical, so arithmetic skips canonicalize().
  friend Rat operator+(const Rat &a, const Rat &b) { return Rat(Canonical{}, a.q_ + b.q_); }
  friend Rat operator-(const Rat &a, const Rat &b) { return Rat(Canonical{}, a.q_ - b.q_); }
  friend Rat operator*(const Rat &a, const Rat &b) { return Rat(Canonical{}, a.q_ * b.q_); }
  friend Rat operator/(const Rat &a, const Rat &b) {
    if (b.is_zero()) throw std::domain_error("Rat: division by zero");
    return Rat(Canonical{}, a.q_ / b.q_);
  }
  friend Rat operator-(const Rat &a) { return Rat(Canonical{}, -a.q_); }
  Rat &operator+=(const Rat &o) { q_ += o.q_; return *this; }
  Rat &operator-=(const Rat &o) { q_ -= o.q_; return *this; }
  Rat &operator*=(const Rat &o) { q_ *= o.q_; return *this; }

  friend bool operator==(const Rat &a, const Rat &b) { return a.q_ == b.q_; }
  friend std::strong_ordering operator<=>(const Rat &a, const Rat &b) {
    int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

private:
  struct Canonical {};
  Rat(Canonical, mpq_class q) : q_(std::move(q)) {}

  mpq_class q_;
};

inline Rat abs(const Rat &a) { return a.sign() < 0 ? -a : a; }

/// Largest integer <= a.
inline mpz_class floor(const Rat &a) {
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), a.raw().get_num_mpz_t(), a.raw().get_den_mpz_t());
  return out;
}

/// 10^k as an exact rational (k may be negative).
inline Rat pow10(int k) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(k < 0 ? -k : k));
  return k < 0 ? Rat(mpz_class(1), p) : Rat(p);
}

namespace detail {

inline bool parse_integer(std::string_view s, mpz_class &out) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (std::size_t j = i; j < s.size(); ++j)
    if (s[j] < '0' || s[j] > '9') return false;
  std::string digits(s.substr(s[0] == '+' ? 1 : 0));
  return out.set_str(digits, 10) == 0;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline Rat Rat::parse(std::string_view text) {
  mpz_class n, d(1);
  auto slash = text.find('/');
  bool ok = slash == std::string_view::npos
                ? detail::parse_integer(text, n)
                : detail::parse_integer(text.substr(0, slash), n) &&
                      detail::parse_integer(text.substr(slash + 1), d);
  if (!ok) throw std::invalid_argument("not a rational \"p/q\": '" + std::string(text) + "'");
  if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  return Rat(n, d);
}

/// Element r + s*sqrt3 of Q(sqrt 3).
class Quad3 {
public:
  Quad3() = default;
  Quad3(Rat r) : r_(std::move(r)) {}  // NOLINT: rationals embed in the field
  Quad3(long r) : r_(r) {}            // NOLINT
  Quad3(Rat r, Rat s) : r_(std::move(r)), s_(std::move(s)) {}

  /// Accepts "A + B*sqrt3", "A - B*sqrt3", "B*sqrt3" or "A" with A, B in
  /// "p/q" form.
  static Quad3 parse(std::string_view text);

  const Rat &rational_part() const { return r_; }
  const Rat &sqrt3_part() const { return s_; }

  /// Sign of the real number r + s*sqrt3.
  int sign() const {
    int sr = r_.sign(), ss = s_.sign();
    if (ss == 0) return sr;
    if (sr == 0) return ss;
    if (sr == ss) return sr;
    // Opposite signs: the term with the larger square dominates.
    mpq_class rr = r_.raw() * r_.raw();
    mpq_class ss3 = 3 * s_.raw() * s_.raw();
    int c = cmp(rr, ss3);
    if (c == 0) return 0;  // unreachable for rationals; kept for totality
    return c > 0 ? sr : ss;
  }

  bool is_zero() const { return r_.is_zero() && s_.is_zero(); }

  double to_double() const;

  std::string str() const {
    return r_.str() + (s_.sign() < 0 ? " - " + (-s_).str() : " + " + s_.str()) + "*sqrt3";
  }

  friend Quad3 operator+(const Quad3 &a, const Quad3 &b) { return {a.r_ + b.r_, a.s_ + b.s_}; }
  friend Quad3 operator-(const Quad3 &a, const Quad3 &b) { return {a.r_ - b.r_, a.s_ - b.s_}; }
  friend Quad3 operator-(const Quad3 &a) { return {-a.r_, -a.s_}; }
  friend Quad3 operator*(const Quad3 &a, const Quad3 &b) {
    return {a.r_ * b.r_ + Rat(3) * a.s_ * b.s_, a.r_ * b.s_ + b.r_ * a.s_};
  }

  friend bool operator==(const Quad3 &a, const Quad3 &b) { return a.r_ == b.r_ && a.s_ == b.s_; }
  friend std::strong_ordering operator<=>(const Quad3 &a, const Quad3 &b) {
    int c = (a - b).sign();
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

private:
  Rat r_;
  Rat s_;
};

inline Quad3 abs(const Quad3 &a) { return a.sign() < 0 ? -a : a; }

/// sqrt3 as a Quad3 constant.
inline Quad3 sqrt3() { return {Rat(0), Rat(1)}; }

/// Rational bracket lo <= sqrt3 < hi = lo + 2^-bits.
inline std::pair<Rat, Rat> sqrt3_bracket(unsigned bits) {
  mpz_class scaled = mpz_class(3) << (2 * bits);
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
  mpz_class den = mpz_class(1) << bits;
  return {Rat(root, den), Rat(mpz_class(root + 1), den)};
}

/// Rational interval [lo, hi] containing x, of width |s| * 2^-bits.
inline std::pair<Rat, Rat> enclose(const Quad3 &x, unsigned bits) {
  auto [lo, hi] = sqrt3_bracket(bits);
  const Rat &s = x.sqrt3_part();
  if (s.sign() >= 0) return {x.rational_part() + s * lo, x.rational_part() + s * hi};
  return {x.rational_part() + s * hi, x.rational_part() + s * lo};
}

namespace detail {
inline unsigned bits_for(const Rat &s, unsigned extra) {
  mpz_class mag = floor(abs(s)) + 1;
  return static_cast<unsigned>(mpz_sizeinbase(mag.get_mpz_t(), 2)) + extra;
}
}  // namespace detail

/// A rational q with 0 < q <= x, for x > 0.
inline Rat positive_lower_bound(const Quad3 &x) {
  if (x.sign() <= 0) throw std::domain_error("positive_lower_bound: argument not positive");
  for (unsigned extra = 8;; extra *= 2) {
    auto lo = enclose(x, detail::bits_for(x.sqrt3_part(), extra)).first;
    if (lo.sign() > 0) return lo;
  }
}

/// Largest integer <= x, exactly.
inline mpz_class floor(const Quad3 &x) {
  auto lo = enclose(x, detail::bits_for(x.sqrt3_part(), 4)).first;
  mpz_class n = floor(lo);  // n <= x and x - n < 2
  while (Quad3(Rat(mpz_class(n + 1))) <= x) ++n;
  return n;
}

inline double Quad3::to_double() const {
  auto [lo, hi] = enclose(*this, detail::bits_for(s_, 64));
  return ((lo + hi) * Rat(1, 2)).to_double();
}

inline Quad3 Quad3::parse(std::string_view text) {
  std::string_view t = detail::trim(text);
  constexpr std::string_view tag = "*sqrt3";
  auto bad = [&] { return std::invalid_argument("not a Q(sqrt3) value: '" + std::string(text) + "'"); };
  if (t.size() < tag.size() || t.substr(t.size() - tag.size()) != tag) {
    try {
      return Quad3(Rat::parse(t));
    } catch (const std::invalid_argument &) {
      throw bad();
    }
  }
  t.remove_suffix(tag.size());
  // Split at the last binary '+' or '-' that is preceded by a space.
  std::size_t split = std::string_view::npos;
  for (std::size_t i = t.size(); i-- > 1;)
    if ((t[i] == '+' || t[i] == '-') && t[i - 1] == ' ') { split = i; break; }
  try {
    if (split == std::string_view::npos) return {Rat(0), Rat::parse(detail::trim(t))};
    Rat r = Rat::parse(detail::trim(t.substr(0, split)));
    Rat s = Rat::parse(detail::trim(t.substr(split + 1)));
    return {r, t[split] == '-' ? -s : s};
  } catch (const std::invalid_argument &) {
    throw bad();
  }
}

}  // namespace dhlab
