#include <gtest/gtest.h>

#include <filesystem>
#include <functional>
#include <random>

#include "cdfwbpp/io.hpp"
#include "oracles.hpp"

using namespace cdfwbpp;

namespace {

std::string model(const std::string& name) { return read_text_file(std::string(CDFWBPP_MODELS_DIR) + "/" + name); }

std::vector<std::string> models_with(const std::string& ext) {
  std::vector<std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(CDFWBPP_MODELS_DIR)) {
    if (entry.path().extension() == ext) out.push_back(entry.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Expects a parse error whose message names `line`.
void expect_parse_error(const std::function<void()>& f, int line) {
  try {
    f();
    ADD_FAILURE() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse) << e.what();
    EXPECT_NE(std::string(e.what()).find("line " + std::to_string(line)), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(Io, WbppModelsRoundTrip) {
  auto names = models_with(".wbpp");
  ASSERT_FALSE(names.empty());
  for (const auto& name : names) {
    Wbpp m = parse_wbpp(model(name)).model;
    WbppFile again = parse_wbpp(print_wbpp(m));
    EXPECT_EQ(again.model, m) << name;
    EXPECT_TRUE(again.warnings.empty()) << name;
  }
}

TEST(Io, RandomWbppRoundTrip) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    Wbpp m = oracle::random_wbpp(rng, 2, 3, 2);
    EXPECT_EQ(parse_wbpp(print_wbpp(m)).model, m);
  }
}

TEST(Io, BppRoundTrip) {
  for (const auto& name : models_with(".bpp")) {
    BppSpec b = parse_bpp(model(name));
    std::string printed = print_bpp(b);
    EXPECT_EQ(print_bpp(parse_bpp(printed)), printed) << name;
    EXPECT_EQ(bpp_to_wbpp(parse_bpp(printed)), bpp_to_wbpp(b)) << name;
  }
  BppSpec b = parse_bpp(model("running.bpp"));
  ASSERT_EQ(b.nonterminals.size(), 2u);
  EXPECT_EQ(b.start, "S");
  ASSERT_EQ(b.rules[1].size(), 2u);
  EXPECT_EQ(b.rules[1][0].action, "a");
  EXPECT_EQ(b.rules[1][0].merge, (std::vector<std::string>{"X", "X"}));
  EXPECT_TRUE(b.rules[1][1].merge.empty());
}

TEST(Io, CdfModelsRoundTrip) {
  auto names = models_with(".cdf");
  ASSERT_FALSE(names.empty());
  for (const auto& name : names) {
    CdfFile f = parse_cdf(model(name));
    CdfFile again = parse_cdf(print_cdf(f.series));
    EXPECT_EQ(again.series, f.series) << name;
    EXPECT_EQ(coeff_table(again.series, 5), coeff_table(f.series, 5)) << name;
  }
}

TEST(Io, RestrictIsCompiledOnLoad) {
  CdfFile f = parse_cdf(model("sinh_restrict.cdf"));
  ASSERT_TRUE(f.constraint);
  ASSERT_TRUE(f.recognizer.has_value());
  EXPECT_EQ(f.recognizer->size(), 2u);
  CdfFile closed = parse_cdf(model("sinh_closed.cdf"));
  EXPECT_EQ(coeff_table(f.series, 7), coeff_table(closed.series, 7));
  EXPECT_FALSE(closed.constraint);
}

TEST(Io, SpecRoundTrip) {
  for (const auto& name : models_with(".spec")) {
    SpecFile f = parse_spec(model(name));
    SpecFile again = parse_spec(print_spec(f));
    EXPECT_EQ(again.sorts, f.sorts) << name;
    ASSERT_EQ(again.definitions.size(), f.definitions.size()) << name;
    for (std::size_t i = 0; i < f.definitions.size(); ++i) {
      EXPECT_EQ(again.definitions[i].first, f.definitions[i].first) << name;
      EXPECT_TRUE(structurally_equal(*again.definitions[i].second, *f.definitions[i].second)) << name;
    }
  }
}

TEST(Io, MissingLinesWarn) {
  WbppFile w = parse_wbpp("alphabet a\nnonterminals S T\nstart S\noutput S = 1\ndelta a S = T\n");
  ASSERT_EQ(w.warnings.size(), 2u);
  EXPECT_NE(w.warnings[0].find("output"), std::string::npos);
  EXPECT_NE(w.warnings[1].find("transition"), std::string::npos);
  EXPECT_EQ(w.model.output()[1], 0);
  EXPECT_TRUE(w.model.delta(0, 1).is_zero());

  CdfFile c = parse_cdf("vars x1\ngens e f\ninit e = 1\nd/dx1 e = e\nexpr = e + f\n");
  ASSERT_EQ(c.warnings.size(), 2u);
  EXPECT_NE(c.warnings[0].find("initial"), std::string::npos);
  EXPECT_NE(c.warnings[1].find("derivative"), std::string::npos);
}

TEST(Io, ParseErrorsCarryLineNumbers) {
  expect_parse_error([] { parse_wbpp("alphabet a\nnonterminals S\nstart Q\n"); }, 3);
  expect_parse_error([] { parse_wbpp("alphabet a\nnonterminals S\nstart S\ndelta a S = 2S\n"); }, 4);
  expect_parse_error([] { parse_wbpp("alphabet a\nnonterminals S\nstart S\nbogus line\n"); }, 4);
  expect_parse_error([] { parse_bpp("start S\nrule S = a.(S|\n"); }, 2);
  expect_parse_error([] { parse_cdf("vars x1\ngens e\ninit e = 1\nd/dx2 e = e\nexpr = e\n"); }, 4);
  expect_parse_error([] { parse_spec("sorts 1\nspecies A { SET(X1 }\n"); }, 2);
}

TEST(Io, UnknownLetterInDelta) {
  try {
    parse_wbpp("alphabet a\nnonterminals S\nstart S\ndelta b S = 1\n");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_TRUE(e.kind() == ErrorKind::kParse || e.kind() == ErrorKind::kUnknownLetter);
  }
}

TEST(Io, ConstraintParsing) {
  std::vector<std::string> axes{"x", "y"};
  struct Case {
    const char* text;
    std::function<bool(std::uint32_t, std::uint32_t)> truth;
  };
  std::vector<Case> cases{
      {"x == 2", [](auto x, auto) { return x == 2; }},
      {"x != 2", [](auto x, auto) { return x != 2; }},
      {"x >= 3", [](auto x, auto) { return x >= 3; }},
      {"x <= 3", [](auto x, auto) { return x <= 3; }},
      {"x > 1 && y < 2", [](auto x, auto y) { return x > 1 && y < 2; }},
      {"x < 0", [](auto, auto) { return false; }},
      {"x % 3 == 1 || y % 2 == 0", [](auto x, auto y) { return x % 3 == 1 || y % 2 == 0; }},
      {"!(x == y) || true", [](auto, auto) { return true; }},
      {"z2 == 4", [](auto, auto y) { return y == 4; }},
      {"!(x % 2 == 0) && !(y >= 2)", [](auto x, auto y) { return x % 2 == 1 && y < 2; }},
  };
  for (const auto& c : cases) {
    if (std::string(c.text).find("x == y") != std::string::npos) {
      EXPECT_THROW(parse_constraint(c.text, axes), Error);
      continue;
    }
    ConstraintPtr phi = parse_constraint(c.text, axes);
    ConstraintPtr again = parse_constraint(to_string(*phi, axes), axes);
    for (std::uint32_t x = 0; x < 8; ++x) {
      for (std::uint32_t y = 0; y < 8; ++y) {
        EXPECT_EQ(phi->holds({x, y}), c.truth(x, y)) << c.text << " at " << x << "," << y;
        EXPECT_EQ(again->holds({x, y}), c.truth(x, y)) << c.text;
      }
    }
  }
  EXPECT_THROW(parse_constraint("w == 1", axes), Error);
  EXPECT_THROW(parse_constraint("x % 0 == 0", axes), Error);
}

TEST(Io, CommentsAndBlankLines) {
  WbppFile w = parse_wbpp("# header\n\nalphabet a   # trailing\nnonterminals S\nstart S\noutput S = 1\ndelta a S = S\n");
  EXPECT_TRUE(w.warnings.empty());
  EXPECT_EQ(evaluate(w.model, w.model.start_config(), w.model.parse_word("aaa")), 1);
}
