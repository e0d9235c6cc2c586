#include <gtest/gtest.h>

#include <random>

#include "cdfwbpp/groebner.hpp"
#include "oracles.hpp"

using namespace cdfwbpp;

namespace {

ContextPtr xy() { return Context::make({"x", "y"}); }

Poly P(const char* text, const ContextPtr& ctx) { return parse_poly(text, ctx); }

GroebnerBasis gb(const ContextPtr& ctx, std::initializer_list<const char*> gens) {
  std::vector<Poly> ps;
  for (const char* g : gens) ps.push_back(P(g, ctx));
  return buchberger(ctx, ps, MonomialOrder::graded_lex());
}

}  // namespace

TEST(Groebner, ReduceExamples) {
  auto ctx = xy();
  auto B = gb(ctx, {"x^2 - y", "y^2"});
  EXPECT_TRUE(reduce(P("x^2 - y", ctx), B).is_zero());
  EXPECT_EQ(reduce(P("7/3", ctx), gb(ctx, {})), P("7/3", ctx));
  EXPECT_TRUE(reduce(P("x^2*y", ctx), B).is_zero());
}

TEST(Groebner, BuchbergerExamples) {
  auto ctx = xy();
  EXPECT_EQ(gb(ctx, {"x"}).generators(), std::vector<Poly>{P("x", ctx)});
  EXPECT_TRUE(gb(ctx, {}).generators().empty());
  // Golden basis computed independently with sympy's groebner(order='grlex').
  auto B = gb(ctx, {"x^2 + y", "x*y"});
  std::vector<Poly> expected{P("y^2", ctx), P("x*y", ctx), P("x^2 + y", ctx)};
  EXPECT_EQ(B.generators(), expected);
}

TEST(Groebner, MembershipExamples) {
  auto ctx = xy();
  EXPECT_TRUE(ideal_contains(gb(ctx, {"x"}), P("x^3*y", ctx)));
  EXPECT_FALSE(ideal_contains(gb(ctx, {"x^2"}), P("x", ctx)));
  EXPECT_TRUE(ideal_contains(gb(ctx, {"x - y"}), P("x^2 - y^2", ctx)));
}

TEST(Groebner, IdealEqualityExamples) {
  auto ctx = xy();
  EXPECT_TRUE(ideal_equal(gb(ctx, {"x"}), gb(ctx, {"2*x"})));
  EXPECT_FALSE(ideal_equal(gb(ctx, {"x"}), gb(ctx, {"x", "y"})));
  EXPECT_TRUE(ideal_equal(gb(ctx, {"x^2 - y"}), gb(ctx, {"y - x^2", "x^3 - x*y"})));
}

TEST(Groebner, LexOrderEliminates) {
  auto ctx = xy();
  auto B = buchberger(ctx, {P("x^2 - y", ctx), P("x*y - 1", ctx)}, MonomialOrder::lex());
  bool has_univariate_y = false;
  for (const auto& g : B.generators()) has_univariate_y |= !g.mentions(0);
  EXPECT_TRUE(has_univariate_y);
  EXPECT_TRUE(ideal_contains(B, P("y^3 - 1", ctx)));
}

TEST(Groebner, ResourceCapsAreReported) {
  auto ctx = Context::make({"x", "y", "z"});
  ResourceLimits tiny;
  tiny.max_degree = 2;
  try {
    buchberger(ctx, {P("x^3 - y", ctx)}, MonomialOrder::graded_lex(), tiny);
    FAIL() << "expected a resource limit";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kResourceLimit);
  }
}

TEST(Groebner, IncrementalMatchesBatch) {
  std::mt19937_64 rng(21);
  auto ctx = Context::make({"x", "y", "z"});
  for (int i = 0; i < 40; ++i) {
    std::vector<Poly> gens;
    IncrementalGroebner inc(ctx, MonomialOrder::graded_lex());
    for (int g = 0; g < 3; ++g) {
      gens.push_back(oracle::random_poly(rng, ctx, 2, 3, 3));
      inc.add(gens.back());
    }
    auto batch = buchberger(ctx, gens, MonomialOrder::graded_lex());
    EXPECT_EQ(inc.generators(), batch.generators());
  }
}

TEST(GroebnerProperty, MembershipAgreesWithMacaulayOracle) {
  std::mt19937_64 rng(22);
  auto ctx = Context::make({"x", "y"});
  int members = 0;
  for (int i = 0; i < 60; ++i) {
    std::vector<Poly> gens{oracle::random_poly(rng, ctx, 2, 2, 2), oracle::random_poly(rng, ctx, 2, 2, 2)};
    auto B = buchberger(ctx, gens, MonomialOrder::graded_lex());
    // Half the probes are constructed members, half are random.
    Poly probe = oracle::random_poly(rng, ctx, 2, 3, 3);
    if (i % 2 == 0) probe = probe * gens[0] + oracle::random_poly(rng, ctx, 1, 2, 3) * gens[1];
    bool gb_member = ideal_contains(B, probe);
    // Degree bound large enough for two quadrics in two variables at this
    // probe degree; a member certificate at low degree implies membership.
    bool la_member = oracle::macaulay_member(gens, probe, 8);
    EXPECT_EQ(gb_member, la_member) << probe.to_string();
    members += gb_member;
  }
  EXPECT_GT(members, 0);
}

TEST(GroebnerProperty, ReductionIsIdempotentAndBasisContainsGenerators) {
  std::mt19937_64 rng(23);
  auto ctx = Context::make({"x", "y", "z"});
  for (int i = 0; i < 60; ++i) {
    std::vector<Poly> gens;
    for (int g = 0; g < 3; ++g) gens.push_back(oracle::random_poly(rng, ctx, 3, 3, 3));
    auto B = buchberger(ctx, gens, MonomialOrder::graded_lex());
    for (const auto& g : gens) EXPECT_TRUE(reduce(g, B).is_zero());
    Poly p = oracle::random_poly(rng, ctx, 4, 5, 5);
    Poly r = reduce(p, B);
    EXPECT_EQ(reduce(r, B), r);
    for (const auto& g : B.generators()) {
      EXPECT_EQ(leading_term(g, B.order()).coeff, 1);
    }
  }
}
