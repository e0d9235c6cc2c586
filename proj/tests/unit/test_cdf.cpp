#include <gtest/gtest.h>

#include <random>

#include "cdfwbpp/cdf.hpp"
#include "cdfwbpp/io.hpp"
#include "oracles.hpp"

using namespace cdfwbpp;

namespace {

CdfSeries load(const char* name) {
  return parse_cdf(read_text_file(std::string(CDFWBPP_MODELS_DIR) + "/" + name)).series;
}

CdfSeries parse(const char* text) { return parse_cdf(text).series; }

std::vector<Rat> seq(std::initializer_list<long> v) {
  std::vector<Rat> out;
  for (long x : v) out.emplace_back(x);
  return out;
}

std::vector<Rat> table(const CdfSeries& s, std::uint32_t N) { return coeff_table(s, N).sequence(); }

std::vector<Rat> via_lie(const CdfSeries& s, std::uint32_t N) {
  std::vector<Rat> out;
  for (std::uint32_t n = 0; n <= N; ++n) out.push_back(coeff_via_lie(s, {n}));
  return out;
}

const std::vector<std::string> kX{"x1"};

TruncSeries X(std::uint32_t order) { return TruncSeries::variable(1, order, 0); }
TruncSeries one(std::uint32_t order) { return TruncSeries::constant(1, order, 1); }

// Builds y = F(x, y) over the axes (x, y) with e^y available as a generator.
CdfSeries cayley_equation() {
  return parse(R"(vars x y
gens e
init e = 1
d/dx e = 0
d/dy e = e
expr = x*e
)");
}

std::vector<const char*> example_models() {
  return {"exp.cdf", "sin.cdf", "sin2cos2.cdf", "cayley.cdf", "erf_companion.cdf", "exp2_direct.cdf",
          "exp2_square.cdf", "sinh_closed.cdf", "sinh_restrict.cdf"};
}

}  // namespace

TEST(Cdf, Autonomize) {
  CdfSeries f = parse("vars x\ngens f\ninit f = 0\nd/dx f = x\nexpr = f\n");
  EXPECT_EQ(f.system.order(), 2u);
  EXPECT_EQ(table(f, 4), seq({0, 0, 1, 0, 0}));
  CdfSeries e = load("exp.cdf");
  EXPECT_EQ(e.system.order(), 1u);
  EXPECT_EQ(e.system.context()->names(), std::vector<std::string>{"e"});
  CdfSeries erf = load("erf_companion.cdf");
  EXPECT_EQ(erf.system.order(), 2u);
  // e^{x^2}: exponential coefficients (2k)!/k! at n = 2k.
  EXPECT_EQ(table(erf, 6), seq({1, 0, 2, 0, 12, 0, 120}));
}

TEST(Cdf, LieDerivative) {
  CdfSeries p = load("sin2cos2.cdf");
  EXPECT_TRUE(lie_derivative(p.system, 0, p.expr).is_zero());
  EXPECT_TRUE(lie_derivative(p.system, 0, Poly::constant(p.system.context(), 5)).is_zero());
  CdfSeries c = load("cayley.cdf");
  EXPECT_EQ(lie_derivative(c.system, 0, c.expr), parse_poly("D*E", c.system.context()));
  EXPECT_THROW(lie_derivative(c.system, 1, c.expr), Error);
}

TEST(Cdf, CoefficientExamples) {
  EXPECT_EQ(coeff_via_lie(load("sin.cdf"), {3}), -1);
  EXPECT_EQ(coeff_via_lie(c_constant(kX, Rat(3, 7)), {0}), Rat(3, 7));
  EXPECT_EQ(coeff_via_lie(load("cayley.cdf"), {4}), 64);
  EXPECT_EQ(table(load("exp.cdf"), 5), seq({1, 1, 1, 1, 1, 1}));
  EXPECT_EQ(table(load("sin.cdf"), 5), seq({0, 1, 0, -1, 0, 1}));
  EXPECT_EQ(table(load("cayley.cdf"), 5), seq({0, 1, 2, 9, 64, 625}));
  EXPECT_EQ(via_lie(load("cayley.cdf"), 6), seq({0, 1, 2, 9, 64, 625, 7776}));
}

TEST(Cdf, Zeroness) {
  auto v = zeroness(load("sin2cos2.cdf"));
  EXPECT_TRUE(v.zero());
  EXPECT_LE(v.stats.chain_length, 2u);
  auto s = zeroness(load("sin.cdf"));
  ASSERT_TRUE(s.nonzero());
  EXPECT_EQ(parikh(s.witness, 1), Exponent{1});
  EXPECT_EQ(s.value, 1);
  EXPECT_TRUE(equivalent(load("exp2_direct.cdf"), load("exp2_square.cdf")).zero());
  EXPECT_TRUE(equivalent(load("sin.cdf"), load("sin.cdf")).zero());
  EXPECT_TRUE(equivalent(load("sinh_restrict.cdf"), load("sinh_closed.cdf")).zero());
  EXPECT_EQ(table(load("sinh_restrict.cdf"), 8), table(load("sinh_closed.cdf"), 8));
  CdfSeries two = parse("vars x y\ngens e\ninit e = 1\nd/dx e = e\nd/dy e = e\nexpr = e\n");
  EXPECT_THROW(equivalent(load("exp.cdf"), two), Error);
}

TEST(Cdf, ExpressionClosures) {
  CdfSeries s = load("sin.cdf");
  EXPECT_TRUE(zeroness(c_add(s, c_scale(-1, s))).zero());
  CdfSeries one_minus_x = c_sub(c_constant(kX, 1), c_atom(kX, 0));
  EXPECT_EQ(table(c_inverse(one_minus_x), 8), t_inverse(t_sub(one(8), X(8))).sequence());
  EXPECT_EQ(table(c_derive(s, 0), 5), seq({1, 0, -1, 0, 1, 0}));
  EXPECT_THROW(c_inverse(s), Error);
  CdfSeries e = load("exp.cdf");
  EXPECT_EQ(coeff_table(c_mul(s, e), 8), t_mul(coeff_table(s, 8), coeff_table(e, 8)));
  EXPECT_EQ(coeff_table(c_add(s, e), 8), t_add(coeff_table(s, 8), coeff_table(e, 8)));
  EXPECT_EQ(coeff_table(c_scale(Rat(-2, 3), e), 8), t_scale(Rat(-2, 3), coeff_table(e, 8)));
  EXPECT_EQ(coeff_table(c_inverse(e), 8), t_inverse(coeff_table(e, 8)));
}

TEST(Cdf, StrongComposition) {
  CdfSeries ey = parse("vars x y\ngens e\ninit e = 1\nd/dx e = 0\nd/dy e = e\nexpr = e\n");
  CdfSeries g = c_sub(load("exp.cdf"), c_constant(kX, 1));
  EXPECT_EQ(table(compose_strong(ey, {g}), 8), seq({1, 1, 2, 5, 15, 52, 203, 877, 4140}));
  CdfSeries y = c_atom({"x", "y"}, 1);
  CdfSeries sin = load("sin.cdf");
  EXPECT_EQ(table(compose_strong(y, {sin}), 8), table(sin, 8));
  CdfSeries y2 = c_mul(y, y);
  EXPECT_EQ(coeff_table(compose_strong(y2, {sin}), 8), t_mul(coeff_table(sin, 8), coeff_table(sin, 8)));
  try {
    compose_strong(ey, {load("exp.cdf")});
    FAIL() << "expected a composability error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotComposable);
  }
}

TEST(Cdf, RegularRestriction) {
  CdfSeries e = load("exp.cdf");
  EXPECT_EQ(table(restrict_regular(e, *ConstraintExpr::mod(0, 1, 2)), 5), seq({0, 1, 0, 1, 0, 1}));
  EXPECT_EQ(table(restrict_regular(e, *ConstraintExpr::conj({})), 6), table(e, 6));
  EXPECT_EQ(table(restrict_regular(e, *ConstraintExpr::eq(0, 2)), 4), seq({0, 0, 1, 0, 0}));
  EXPECT_EQ(table(restrict_regular(e, *ConstraintExpr::at_least(0, 3)), 5), seq({0, 0, 0, 1, 1, 1}));
  EXPECT_EQ(table(restrict_regular(e, *ConstraintExpr::truth(false)), 3), seq({0, 0, 0, 0}));
}

TEST(Cdf, Constraints) {
  auto phi = ConstraintExpr::at_least(0, 2);
  EXPECT_EQ(to_string(*phi), "!(z1 == 0 || z1 == 1)");
  EXPECT_EQ(to_string(*ConstraintExpr::mod(1, 1, 2), {"a", "b"}), "b % 2 == 1");
  EXPECT_FALSE(phi->holds({1}));
  EXPECT_TRUE(phi->holds({5}));
  EXPECT_EQ(ConstraintExpr::conj({ConstraintExpr::eq(0, 1), ConstraintExpr::eq(2, 0)})->arity(), 3u);
  EXPECT_THROW(ConstraintExpr::mod(0, 0, 0), Error);
}

TEST(Cdf, MonoidRecognizerChecksLaws) {
  // Z_2 as a recognizer for odd sizes.
  MonoidRecognizer z2({{0, 1}, {1, 0}}, 0, {1}, {false, true});
  EXPECT_TRUE(z2.recognizes({3}));
  EXPECT_FALSE(z2.recognizes({4}));
  try {
    MonoidRecognizer bad({{0, 1}, {0, 1}}, 0, {1}, {false, true});
    FAIL() << "expected a law violation";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConstraint);
  }
  EXPECT_THROW(MonoidRecognizer({{0, 1}, {1, 1}}, 1, {1}, {false, true}), Error);
  EXPECT_THROW(MonoidRecognizer({{0, 2}, {1, 0}}, 0, {1}, {false, true}), Error);
}

TEST(Cdf, MonoidCompilationRecognizesTheConstraint) {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 100; ++i) {
    std::size_t dim = 1 + i % 2;
    auto phi = oracle::random_constraint(rng, dim, 2);
    auto rec = MonoidRecognizer::compile(*phi, dim);
    for (std::uint32_t d = 0; d <= 8; ++d) {
      for (const auto& n : exponents_of_degree(dim, d)) EXPECT_EQ(rec.recognizes(n), phi->holds(n)) << to_string(*phi);
    }
  }
}

TEST(Cdf, ImplicitSolve) {
  std::vector<std::string> xy{"x", "y"};
  CdfSeries x = c_atom(xy, 0);
  CdfSeries y = c_atom(xy, 1);
  CdfSeries F = c_add(x, c_mul(y, y));
  CdfVector sol = implicit_solve(CdfVector(F.system, {F.expr}));
  EXPECT_EQ(table(sol.at(0), 6), seq({0, 1, 2, 12, 120, 1680, 30240}));
  EXPECT_EQ(via_lie(sol.at(0), 6), table(sol.at(0), 6));

  CdfVector id = implicit_solve(CdfVector(x.system, {x.expr}));
  EXPECT_EQ(table(id.at(0), 4), seq({0, 1, 0, 0, 0}));

  CdfSeries cay = cayley_equation();
  CdfVector tree = implicit_solve(CdfVector(cay.system, {cay.expr}));
  EXPECT_EQ(table(tree.at(0), 6), seq({0, 1, 2, 9, 64, 625, 7776}));

  CdfSeries bad = c_add(c_constant(xy, 1), c_mul(x, y));
  auto wp = well_posed(CdfVector(bad.system, {bad.expr}));
  EXPECT_FALSE(wp.ok);
  EXPECT_FALSE(wp.diagnostic.empty());
  try {
    implicit_solve(CdfVector(bad.system, {bad.expr}));
    FAIL() << "expected NOT_WELL_POSED";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotWellPosed);
  }
  CdfSeries loop = c_add(x, c_scale(2, y));
  EXPECT_FALSE(well_posed(CdfVector(loop.system, {loop.expr})).ok);
}

TEST(Cdf, ImplicitSolveMatchesOracleOnSystems) {
  // y1 = x + y2^2, y2 = x*y1: nilpotent Jacobian, mutually recursive.
  std::vector<std::string> axes{"x", "y1", "y2"};
  CdfSeries x = c_atom(axes, 0);
  CdfSeries y1 = c_atom(axes, 1);
  CdfSeries y2 = c_atom(axes, 2);
  MergedSeries m = merge(c_add(x, c_mul(y2, y2)), c_mul(x, y1));
  CdfVector sol = implicit_solve(CdfVector(m.system, {m.first, m.second}));
  const std::uint32_t N = 8;
  TruncSeries tx = TruncSeries::variable(3, N, 0);
  TruncSeries t1 = TruncSeries::variable(3, N, 1);
  TruncSeries t2 = TruncSeries::variable(3, N, 2);
  auto oracle_sol = t_solve_implicit({t_add(tx, t_mul(t2, t2)), t_mul(tx, t1)}, N);
  EXPECT_EQ(coeff_table(sol.at(0), N), oracle_sol[0]);
  EXPECT_EQ(coeff_table(sol.at(1), N), oracle_sol[1]);
}

TEST(Cdf, WbppBridge) {
  CdfSeries e = load("exp.cdf");
  Wbpp w = to_wbpp(e);
  for (const auto& [word, v] : coeffs_up_to(w, w.start_config(), 5)) EXPECT_EQ(v, 1);
  CdfSeries back = from_wbpp(w);
  EXPECT_TRUE(back == e);
  CdfSeries sin = load("sin.cdf");
  Wbpp ws = to_wbpp(sin);
  TruncSeries t = coeff_table(sin, 5);
  for (const auto& [word, v] : coeffs_up_to(ws, ws.start_config(), 5)) EXPECT_EQ(v, t.get(parikh(word, 1)));
  // A non-variable expression gets its own start nonterminal.
  Wbpp wp = to_wbpp(load("sin2cos2.cdf"));
  EXPECT_TRUE(zeroness(wp, wp.start_config()).zero());
  Wbpp running = parse_wbpp(read_text_file(std::string(CDFWBPP_MODELS_DIR) + "/running.wbpp")).model;
  EXPECT_THROW(from_wbpp(running), Error);
}

TEST(CdfProperty, TableAgreesWithLieOnExamples) {
  for (const char* name : example_models()) {
    CdfSeries s = load(name);
    TruncSeries t = coeff_table(s, 6);
    for (std::uint32_t n = 0; n <= 6; ++n) EXPECT_EQ(t.get({n}), coeff_via_lie(s, {n})) << name << " " << n;
  }
  std::mt19937_64 rng(52);
  for (int i = 0; i < 30; ++i) {
    CdfSeries s = oracle::random_block_system(rng, 2, false, 1);
    TruncSeries t = coeff_table(s, 6);
    for (std::uint32_t d = 0; d <= 6; ++d) {
      for (const auto& n : exponents_of_degree(2, d)) EXPECT_EQ(t.get(n), coeff_via_lie(s, n));
    }
  }
}

TEST(CdfProperty, MixedPartialsAreConsistent) {
  std::vector<CdfSeries> all;
  for (const char* name : example_models()) all.push_back(load(name));
  std::mt19937_64 rng(53);
  for (int i = 0; i < 10; ++i) all.push_back(oracle::random_block_system(rng, 2, false, 1));
  all.push_back(parse("vars x y\ngens e\ninit e = 1\nd/dx e = e\nd/dy e = 2*e\nexpr = e^2 - x*y\n"));
  for (const auto& s : all) {
    for (std::uint32_t d = 0; d <= 4; ++d) {
      for (const auto& n : exponents_of_degree(s.system.dim(), d)) {
        std::vector<std::size_t> w;
        for (std::size_t j = 0; j < n.size(); ++j) w.insert(w.end(), n[j], j);
        Rat first = coeff_via_word(s, w);
        for (const auto& p : oracle::permutations_of(w)) EXPECT_EQ(coeff_via_word(s, p), first);
      }
    }
  }
}

TEST(CdfProperty, DenominatorBound) {
  std::mt19937_64 rng(54);
  for (int i = 0; i < 50; ++i) {
    int q = 2 + i % 5;
    CdfSeries s = oracle::random_block_system(rng, 1 + i % 2, true, q);
    TruncSeries t = coeff_table(s, 6);
    for (const auto& [n, v] : t.entries()) {
      Rat scaled = v;
      for (std::uint32_t k = 0; k < total_degree(n); ++k) scaled *= q;
      EXPECT_TRUE(is_integer(scaled)) << to_string(v) << " at " << exponent_to_string(n);
    }
  }
}

TEST(CdfProperty, RestrictionEqualsMasking) {
  std::mt19937_64 rng(55);
  for (int i = 0; i < 50; ++i) {
    std::size_t dim = 1 + i % 2;
    CdfSeries s = oracle::random_block_system(rng, dim, false, 1);
    auto phi = oracle::random_constraint(rng, dim, 2);
    TruncSeries masked = t_mask(coeff_table(s, 6), [&](const Exponent& n) { return phi->holds(n); });
    EXPECT_EQ(coeff_table(restrict_regular(s, *phi), 6), masked) << to_string(*phi);
  }
}

TEST(CdfProperty, ClosuresMatchTableOracle) {
  std::mt19937_64 rng(56);
  for (int i = 0; i < 20; ++i) {
    CdfSeries a = oracle::random_block_system(rng, 1, false, 1);
    CdfSeries b = oracle::random_block_system(rng, 1, false, 1);
    const std::uint32_t N = 8;
    TruncSeries ta = coeff_table(a, N);
    TruncSeries tb = coeff_table(b, N);
    EXPECT_EQ(coeff_table(c_add(a, b), N), t_add(ta, tb));
    EXPECT_EQ(coeff_table(c_mul(a, b), N), t_mul(ta, tb));
    EXPECT_EQ(coeff_table(c_derive(a, 0), N - 1), t_derive(ta, 0));
    if (ta.constant_term() != 0) {
      EXPECT_EQ(coeff_table(c_inverse(a), N), t_inverse(ta));
    }
    // b - b(0) is composable into any outer series.
    CdfSeries g = c_sub(b, c_constant(kX, tb.constant_term()));
    CdfSeries outer = parse("vars x y\ngens e\ninit e = 1\nd/dx e = e\nd/dy e = e\nexpr = e*y + y^2\n");
    TruncSeries touter = coeff_table(outer, N);
    TruncSeries tg = t_sub(tb, TruncSeries::constant(1, N, tb.constant_term()));
    EXPECT_EQ(coeff_table(compose_strong(outer, {g}), N), t_compose(touter, {tg}));
  }
}

TEST(CdfProperty, ZeroVerdictsHaveZeroTables) {
  // Two copies of one random system: the difference is zero, yet the
  // saturation sees two unrelated generator blocks.
  std::mt19937_64 rng(57);
  ResourceLimits limits;
  limits.max_degree = 12;
  int zeros = 0;
  for (int i = 0; i < 30; ++i) {
    CdfSeries a = oracle::random_block_system(rng, 1 + i % 2, false, 1);
    CdfSeries b = c_sub(a, a);
    auto v = zeroness(b, limits);
    ASSERT_FALSE(v.nonzero());
    if (v.zero()) {
      ++zeros;
      EXPECT_TRUE(coeff_table(b, static_cast<std::uint32_t>(v.stats.chain_length) + 2).is_zero());
    }
    auto w = zeroness(a, limits);
    if (w.nonzero()) {
      auto n = parikh(w.witness, a.system.dim());
      EXPECT_EQ(coeff_table(a, total_degree(n)).get(n), w.value);
    } else if (w.zero()) {
      EXPECT_TRUE(coeff_table(a, static_cast<std::uint32_t>(w.stats.chain_length) + 2).is_zero());
    }
  }
  EXPECT_GE(zeros, 20);
}
