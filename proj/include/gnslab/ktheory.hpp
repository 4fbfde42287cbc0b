#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "error.hpp"

namespace gnslab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::map<std::uint64_t, std::uint64_t> factorize(std::uint64_t n) {
  std::map<std::uint64_t, std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    while (n % d == 0) {
      ++out[d];
      n /= d;
    }
  if (n > 1) ++out[n];
  return out;
}

/// prod_p p^{e_p} with e_p in N u {inf}; unlisted primes have exponent 0.
class SupernaturalNumber {
 public:
  struct Exponent {
    std::uint64_t value = 0;
    bool infinite = false;
    bool operator==(const Exponent&) const = default;
  };

  SupernaturalNumber() = default;

  void set(std::uint64_t p, Exponent e) {
    if (!is_prime(p)) throw Error(Errc::InvalidArgument, "SupernaturalNumber: " + std::to_string(p) + " is not prime");
    if (!e.infinite && e.value == 0)
      exps_.erase(p);
    else
      exps_[p] = e;
  }
  void set_finite(std::uint64_t p, std::uint64_t e) { set(p, {e, false}); }
  void set_infinite(std::uint64_t p) { set(p, {0, true}); }

  Exponent exponent(std::uint64_t p) const {
    const auto it = exps_.find(p);
    return it == exps_.end() ? Exponent{} : it->second;
  }
  const std::map<std::uint64_t, Exponent>& exponents() const { return exps_; }

  std::set<std::uint64_t> infinite_primes() const {
    std::set<std::uint64_t> out;
    for (const auto& [p, e] : exps_)
      if (e.infinite) out.insert(p);
    return out;
  }

  /// n | m exponent-wise.
  bool divides(const SupernaturalNumber& m) const {
    for (const auto& [p, e] : exps_) {
      const Exponent f = m.exponent(p);
      if (f.infinite) continue;
      if (e.infinite || e.value > f.value) return false;
    }
    return true;
  }

  /// "1", "2^inf", "2^2*3^inf"
  std::string to_string() const {
    if (exps_.empty()) return "1";
    std::string out;
    for (const auto& [p, e] : exps_) {
      if (!out.empty()) out += "*";
      out += std::to_string(p);
      if (e.infinite)
        out += "^inf";
      else if (e.value != 1)
        out += "^" + std::to_string(e.value);
    }
    return out;
  }

  static SupernaturalNumber parse(const std::string& text) {
    SupernaturalNumber n;
    if (text == "1" || text.empty()) return n;
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t end = std::min(text.find('*', start), text.size());
      const std::string factor = text.substr(start, end - start);
      const std::size_t caret = factor.find('^');
      try {
        const std::uint64_t p = std::stoull(factor.substr(0, caret));
        if (caret == std::string::npos) {
          n.set_finite(p, n.exponent(p).value + 1);
        } else {
          const std::string e = factor.substr(caret + 1);
          if (e == "inf")
            n.set_infinite(p);
          else
            n.set_finite(p, std::stoull(e));
        }
      } catch (const std::logic_error&) {
        throw Error(Errc::InvalidArgument, "SupernaturalNumber: cannot parse '" + factor + "'");
      }
      start = end + 1;
    }
    return n;
  }

  bool operator==(const SupernaturalNumber&) const = default;

 private:
  std::map<std::uint64_t, Exponent> exps_;
};

/// Finite prefix n_0 | n_1 | ... of a UHF type plus the primes the user
/// declares to have unbounded exponent.
class UHFType {
 public:
  UHFType(std::vector<std::uint64_t> sequence, std::set<std::uint64_t> infinite_primes = {})
      : seq_(std::move(sequence)), inf_(std::move(infinite_primes)) {
    if (seq_.empty() || seq_.front() < 1)
      throw Error(Errc::BrokenDivisibilityChain, "UHFType: sequence must start with n_0 >= 1");
    for (std::size_t i = 1; i < seq_.size(); ++i)
      if (seq_[i] <= seq_[i - 1] || seq_[i] % seq_[i - 1] != 0)
        throw Error(Errc::BrokenDivisibilityChain, "UHFType: n_{i-1} must properly divide n_i", i);
    for (std::uint64_t p : inf_)
      if (!is_prime(p)) throw Error(Errc::InvalidArgument, "UHFType: marker " + std::to_string(p) + " is not prime");
  }

  const std::vector<std::uint64_t>& sequence() const { return seq_; }
  const std::set<std::uint64_t>& infinite_primes() const { return inf_; }

 private:
  std::vector<std::uint64_t> seq_;
  std::set<std::uint64_t> inf_;
};

inline SupernaturalNumber sn_from_type(const UHFType& t) {
  SupernaturalNumber n;
  for (std::uint64_t v : t.sequence())
    for (const auto& [p, e] : factorize(v))
      if (e > n.exponent(p).value) n.set_finite(p, e);
  for (std::uint64_t p : t.infinite_primes()) n.set_infinite(p);
  return n;
}

/// q in Q(n): the reduced denominator only involves admissible prime powers.
inline bool q_contains(const SupernaturalNumber& n, const Rational& q) {
  BigInt den = boost::multiprecision::denominator(q);
  for (const auto& [p, e] : n.exponents()) {
    std::uint64_t removed = 0;
    while (den % p == 0 && (e.infinite || removed < e.value)) {
      den /= p;
      ++removed;
    }
  }
  return den == 1;
}

inline bool q_isomorphic(const SupernaturalNumber& n, const SupernaturalNumber& m) {
  return n.infinite_primes() == m.infinite_primes();
}

/// Finite product of copies of Z and Q(delta); the empty product is 0.
class GroupExpr {
 public:
  enum class Factor { Z, Q };

  GroupExpr() = default;
  explicit GroupExpr(std::vector<Factor> factors) : factors_(std::move(factors)) {
    std::sort(factors_.begin(), factors_.end());
  }

  static GroupExpr zero() { return GroupExpr(); }
  static GroupExpr z() { return GroupExpr({Factor::Z}); }
  static GroupExpr q() { return GroupExpr({Factor::Q}); }
  static GroupExpr z_times_q() { return GroupExpr({Factor::Z, Factor::Q}); }

  const std::vector<Factor>& factors() const { return factors_; }

  /// Rank of the group tensored with the rationals.
  std::size_t rational_rank() const { return factors_.size(); }

  std::string to_string() const {
    if (factors_.empty()) return "0";
    std::string out;
    for (Factor f : factors_) {
      if (!out.empty()) out += " x ";
      out += f == Factor::Z ? "Z" : "Q(delta)";
    }
    return out;
  }

  bool operator==(const GroupExpr&) const = default;

 private:
  std::vector<Factor> factors_;
};

enum class UnitaryGroup { U, U_omega };

/// pi_k of the unitary group of a UHF algebra, and of the stabilizer of a
/// pure state.
inline GroupExpr homotopy_group(unsigned k, UnitaryGroup which) {
  if (k % 2 == 0) return GroupExpr::zero();
  if (which == UnitaryGroup::U_omega && k == 1) return GroupExpr::z_times_q();
  return GroupExpr::q();
}

inline GroupExpr k_theory(unsigned k) {
  if (k > 1) throw Error(Errc::InvalidArgument, "k_theory: k must be 0 or 1");
  return k == 0 ? GroupExpr::q() : GroupExpr::zero();
}

using RationalMatrix2 = std::array<std::array<Rational, 2>, 2>;

inline RationalMatrix2 multiply(const RationalMatrix2& a, const RationalMatrix2& b) {
  RationalMatrix2 c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}

/// g_n = (1 0; 1 + 1/n  1/n)
inline RationalMatrix2 colimit_generator(std::uint64_t n) {
  const Rational inv(BigInt(1), BigInt(n));
  return {{{Rational(1), Rational(0)}, {Rational(1) + inv, inv}}};
}

/// Connecting map (1 0; n_ij - 1  n_ij)
inline RationalMatrix2 connecting_map(std::uint64_t nij) {
  return {{{Rational(1), Rational(0)}, {Rational(BigInt(nij) - 1), Rational(BigInt(nij))}}};
}

/// Exact check of g_j (g_ij)_* = g_i.
inline bool colimit_matrix_check(std::uint64_t ni, std::uint64_t nj) {
  if (ni == 0 || nj == 0 || nj % ni != 0)
    throw Error(Errc::NotDivisible, "colimit_matrix_check: n_i must divide n_j");
  return multiply(colimit_generator(nj), connecting_map(nj / ni)) == colimit_generator(ni);
}

}  // namespace gnslab
