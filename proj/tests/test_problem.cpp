#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "skorohod/checks.hpp"
#include "skorohod/errors.hpp"
#include "skorohod/problem.hpp"

using namespace skorohod;

namespace {

std::string parse_error(const std::string& text) {
  try {
    problem::parse(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Builtins, Shapes) {
  EXPECT_EQ(problem::builtin_names().size(), 5u);
  const auto sq = problem::builtin("square");
  EXPECT_EQ(sq.expansion.terms().size(), 2u);
  EXPECT_FALSE(sq.drift_tail_bound.has_value());
  EXPECT_EQ(problem::constant_tail(sq), 0.0);
  const auto sine = problem::builtin("sine", 9);
  EXPECT_EQ(sine.expansion.max_degree(), 9);
  ASSERT_TRUE(sine.drift_tail_bound.has_value());
  EXPECT_NEAR(problem::constant_tail(sine), std::sqrt(*sine.drift_tail_bound / 12), 1e-18);
  EXPECT_LT(problem::builtin("sine", 11).drift_tail_bound.value(), *sine.drift_tail_bound);
  EXPECT_THROW(problem::builtin("cosine"), ParseError);
  EXPECT_THROW(problem::builtin("sine", 0), DomainError);
  EXPECT_THROW(problem::builtin("sine", 13), CapacityError);
}

TEST(Parse, Document) {
  const auto p = problem::parse(R"({
    "K": 2, "taus": [0.5],
    "terms": [
      {"coeff": {"kind": "polynomial", "data": [0, 1]}, "exponents": [0, 1]},
      {"coeff": {"kind": "exppoly", "data": {"prefactor": [2], "exponent": {"breakpoints": [0, 0.5, 1], "pieces": [[0, -1], [-0.25, -0.5]]}}},
       "exponents": [1, 0]}
    ]})");
  EXPECT_EQ(p.expansion.slots(), 2);
  ASSERT_EQ(p.expansion.terms().size(), 2u);
  EXPECT_EQ(p.expansion.terms()[1].coeff.kind(), chaos::CoefficientKind::ExpPoly);
  EXPECT_NEAR(p.expansion.terms()[1].coeff.value(0.75), 2 * std::exp(-0.625), 1e-15);

  const auto b = problem::parse(R"({"builtin": "sine", "truncation": 5})");
  EXPECT_EQ(b.expansion.max_degree(), 5);
  EXPECT_EQ(b.expansion, problem::builtin("sine", 5).expansion);
}

TEST(Parse, SyntaxErrorsCarryLineAndColumn) {
  const auto msg = parse_error("{\n  \"K\": 1,\n  \"terms\": [,]\n}");
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("column"), std::string::npos) << msg;
}

TEST(Parse, FieldErrorsCarryPath) {
  EXPECT_NE(parse_error(R"({"terms": []})").find("'K'"), std::string::npos);
  EXPECT_NE(parse_error(R"({"K": 2, "taus": [], "terms": []})").find("'taus'"), std::string::npos);
  EXPECT_NE(parse_error(R"({"K": 2, "taus": [1.5], "terms": []})").find("'taus[0]'"), std::string::npos);
  const auto bad_kind = parse_error(
      R"({"K": 1, "terms": [{"coeff": {"kind": "polynomial", "data": [1]}, "exponents": [0]},
                           {"coeff": {"kind": "spline", "data": [1]}, "exponents": [1]}]})");
  EXPECT_NE(bad_kind.find("'terms[1].coeff.kind'"), std::string::npos) << bad_kind;
  const auto bad_exp = parse_error(R"({"K": 1, "terms": [{"coeff": {"kind": "polynomial", "data": [1]}, "exponents": [-1]}]})");
  EXPECT_NE(bad_exp.find("'terms[0].exponents[0]'"), std::string::npos) << bad_exp;
  const auto bad_data = parse_error(R"({"K": 1, "terms": [{"coeff": {"kind": "polynomial", "data": ["x"]}, "exponents": [1]}]})");
  EXPECT_NE(bad_data.find("'terms[0].coeff.data[0]'"), std::string::npos) << bad_data;
  EXPECT_FALSE(parse_error(R"({"builtin": "nope"})").empty());
}

TEST(Parse, CapacityErrorNamesTheTerm) {
  try {
    problem::parse(R"({"K": 1, "terms": [{"coeff": {"kind": "polynomial", "data": [1]}, "exponents": [2]},
                                          {"coeff": {"kind": "polynomial", "data": [1]}, "exponents": [20]}]})");
    FAIL() << "expected a capacity error";
  } catch (const CapacityError& e) {
    EXPECT_NE(std::string(e.what()).find("term 1"), std::string::npos) << e.what();
  }
}

TEST(LoadFile, MissingFile) { EXPECT_THROW(problem::load_file("/nonexistent/problem.json"), IoError); }

TEST(Serialize, RoundTripsBuiltinsAndRandomExpansions) {
  for (const auto& name : problem::builtin_names()) {
    const auto u = problem::builtin(name).expansion;
    const auto text = problem::serialize(u);
    EXPECT_EQ(problem::parse(text).expansion, u) << name;
    EXPECT_EQ(problem::serialize(problem::parse(text).expansion), text) << name;
  }
  sampling::Rng rng(77);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const auto u = checks::random_expansion(rng, 3, {unif(rng), unif(rng)}, 6, 4);
    EXPECT_EQ(problem::parse(problem::serialize(u)).expansion, u);
  }
  const auto user = chaos::Coefficient::user_pair([](double s) { return s; }, [](double) { return 1.0; });
  EXPECT_THROW(problem::serialize(chaos::ChaosExpansion(1, {}, {{user, {1}}})), UnsupportedError);
}
