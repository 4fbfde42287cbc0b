#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "gnslab/ktheory.hpp"

using namespace gnslab;

namespace {

template <class F>
Errc error_of(F f) {
  try {
    f();
  } catch (const Error& ex) {
    return ex.code();
  }
  return Errc::InvalidArgument;
}

Rational frac(long long p, long long q) { return Rational(BigInt(p), BigInt(q)); }

SupernaturalNumber two_inf() { return SupernaturalNumber::parse("2^inf"); }

// Membership in the union of n_j^{-1} Z over a finite type prefix.
bool union_form_contains(const std::vector<std::uint64_t>& seq, const Rational& q) {
  const BigInt den = boost::multiprecision::denominator(q);
  for (std::uint64_t n : seq)
    if (BigInt(n) % den == 0) return true;
  return false;
}

}  // namespace

TEST(Primes, Factorization) {
  EXPECT_TRUE(is_prime(2));
  EXPECT_TRUE(is_prime(9973));
  EXPECT_FALSE(is_prime(1));
  EXPECT_FALSE(is_prime(91));
  EXPECT_EQ(factorize(360), (std::map<std::uint64_t, std::uint64_t>{{2, 3}, {3, 2}, {5, 1}}));
  EXPECT_TRUE(factorize(1).empty());
}

TEST(Supernatural, ParseAndPrint) {
  EXPECT_EQ(SupernaturalNumber::parse("1").to_string(), "1");
  EXPECT_EQ(two_inf().to_string(), "2^inf");
  EXPECT_EQ(SupernaturalNumber::parse("3^inf*2^2").to_string(), "2^2*3^inf");
  EXPECT_EQ(SupernaturalNumber::parse("5").exponent(5).value, 1u);
  EXPECT_EQ(error_of([] { SupernaturalNumber::parse("4^2"); }), Errc::InvalidArgument);
  EXPECT_EQ(error_of([] { SupernaturalNumber::parse("2^x"); }), Errc::InvalidArgument);
  SupernaturalNumber n;
  EXPECT_EQ(error_of([&] { n.set_finite(6, 1); }), Errc::InvalidArgument);
}

TEST(SnFromType, Examples) {
  EXPECT_EQ(sn_from_type(UHFType({2, 4, 8}, {2})).to_string(), "2^inf");
  EXPECT_EQ(sn_from_type(UHFType({6, 12, 36})).to_string(), "2^2*3^2");
  EXPECT_EQ(sn_from_type(UHFType({1})).to_string(), "1");
  EXPECT_EQ(error_of([] { UHFType({4, 6}); }), Errc::BrokenDivisibilityChain);
  EXPECT_EQ(error_of([] { UHFType({4, 4}); }), Errc::BrokenDivisibilityChain);
  EXPECT_EQ(error_of([] { UHFType({}); }), Errc::BrokenDivisibilityChain);
  EXPECT_EQ(error_of([] { UHFType({0, 2}); }), Errc::BrokenDivisibilityChain);
  EXPECT_EQ(error_of([] { UHFType({2}, {4}); }), Errc::InvalidArgument);
}

TEST(QContains, Examples) {
  EXPECT_TRUE(q_contains(two_inf(), frac(3, 8)));
  EXPECT_FALSE(q_contains(two_inf(), frac(1, 3)));
  EXPECT_TRUE(q_contains(SupernaturalNumber::parse("2^inf*3"), frac(5, 6)));
  EXPECT_FALSE(q_contains(SupernaturalNumber::parse("2^inf*3"), frac(5, 9)));
  EXPECT_TRUE(q_contains(SupernaturalNumber::parse("1"), frac(-7, 1)));
  // 6/4 reduces to 3/2.
  EXPECT_TRUE(q_contains(SupernaturalNumber::parse("2"), frac(6, 4)));
}

TEST(QContains, AgreesWithUnionFormExhaustively) {
  const std::vector<std::vector<std::uint64_t>> types = {{1}, {2, 4, 8, 16}, {6, 12, 36, 180}, {3, 15, 105, 1155},
                                                         {2, 6, 30, 210, 2310, 30030}};
  for (const auto& seq : types) {
    const SupernaturalNumber n = sn_from_type(UHFType(seq));
    for (long long den = 1; den <= 10000; ++den) {
      const Rational q = frac(1, den);
      ASSERT_EQ(q_contains(n, q), union_form_contains(seq, q)) << "den " << den;
    }
  }
}

TEST(QContains, InfiniteExponentsMatchLargePowers) {
  const SupernaturalNumber n = SupernaturalNumber::parse("2^inf*3");
  const BigInt big = BigInt(3) << 40;
  for (long long den = 1; den <= 10000; ++den) ASSERT_EQ(q_contains(n, frac(1, den)), big % den == 0);
}

TEST(QContains, GroupAndMonotonicity) {
  std::mt19937_64 rng(701);
  const SupernaturalNumber small = SupernaturalNumber::parse("2^3*3");
  const SupernaturalNumber large = SupernaturalNumber::parse("2^inf*3^2*5");
  ASSERT_TRUE(small.divides(large));
  ASSERT_FALSE(large.divides(small));
  EXPECT_TRUE(q_contains(small, Rational(1)));
  std::uniform_int_distribution<int> num(-1000, 1000), pick(0, 7);
  const std::array<long long, 8> dens = {1, 2, 3, 4, 6, 8, 12, 24};
  for (int t = 0; t < 1000; ++t) {
    const Rational a = frac(num(rng), dens[static_cast<std::size_t>(pick(rng))]);
    const Rational b = frac(num(rng), dens[static_cast<std::size_t>(pick(rng))]);
    ASSERT_TRUE(q_contains(small, a));
    ASSERT_TRUE(q_contains(small, a - b));
    ASSERT_TRUE(q_contains(large, a));
    const Rational c = frac(num(rng), 1 + pick(rng) * 11);
    if (q_contains(small, c)) ASSERT_TRUE(q_contains(large, c));
  }
}

TEST(QIsomorphic, Examples) {
  EXPECT_TRUE(q_isomorphic(two_inf(), SupernaturalNumber::parse("2^inf*3^2")));
  EXPECT_FALSE(q_isomorphic(two_inf(), SupernaturalNumber::parse("3^inf")));
  const SupernaturalNumber n = SupernaturalNumber::parse("2^4*5^inf*7");
  EXPECT_TRUE(q_isomorphic(n, n));
}

TEST(Groups, TheoremTables) {
  EXPECT_EQ(homotopy_group(2, UnitaryGroup::U), GroupExpr::zero());
  EXPECT_EQ(homotopy_group(1, UnitaryGroup::U_omega).to_string(), "Z x Q(delta)");
  EXPECT_EQ(homotopy_group(1, UnitaryGroup::U).to_string(), "Q(delta)");
  for (unsigned k = 0; k < 20; ++k) {
    const GroupExpr u = homotopy_group(k, UnitaryGroup::U), uo = homotopy_group(k, UnitaryGroup::U_omega);
    if (k % 2 == 0) {
      EXPECT_EQ(u.to_string(), "0");
      EXPECT_EQ(uo.to_string(), "0");
    } else {
      EXPECT_EQ(u.to_string(), "Q(delta)");
      EXPECT_EQ(uo.to_string(), k == 1 ? "Z x Q(delta)" : "Q(delta)");
    }
  }
  EXPECT_EQ(homotopy_group(1, UnitaryGroup::U).rational_rank(), 1u);
  EXPECT_EQ(homotopy_group(1, UnitaryGroup::U_omega).rational_rank(), 2u);
  EXPECT_EQ(k_theory(0).to_string(), "Q(delta)");
  EXPECT_EQ(k_theory(1).to_string(), "0");
  EXPECT_EQ(error_of([] { k_theory(2); }), Errc::InvalidArgument);
  EXPECT_EQ(GroupExpr({GroupExpr::Factor::Q, GroupExpr::Factor::Z}), GroupExpr::z_times_q());
}

TEST(Colimit, Examples) {
  EXPECT_TRUE(colimit_matrix_check(2, 8));
  EXPECT_TRUE(colimit_matrix_check(5, 5));
  EXPECT_TRUE(colimit_matrix_check(3, 12));
  EXPECT_EQ(error_of([] { colimit_matrix_check(3, 8); }), Errc::NotDivisible);
  EXPECT_EQ(error_of([] { colimit_matrix_check(0, 8); }), Errc::NotDivisible);
  const RationalMatrix2 g = colimit_generator(4);
  EXPECT_EQ(g[1][0], frac(5, 4));
  EXPECT_EQ(g[1][1], frac(1, 4));
}

TEST(Colimit, AllDivisorPairsAndComposition) {
  for (int a = 1; a <= 10; ++a)
    for (int b = a; b <= 10; ++b) EXPECT_TRUE(colimit_matrix_check(1ull << a, 1ull << b));
  for (std::uint64_t ni = 1; ni <= 60; ++ni)
    for (std::uint64_t nj = ni; nj <= 360; nj += ni) ASSERT_TRUE(colimit_matrix_check(ni, nj));
  // Connecting maps compose along a chain n_i | n_j | n_k.
  for (std::uint64_t x : {2u, 3u, 6u})
    for (std::uint64_t y : {2u, 5u, 7u})
      EXPECT_EQ(multiply(connecting_map(y), connecting_map(x)), connecting_map(x * y));
}
