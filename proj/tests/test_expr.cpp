#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "uninet/errors.hpp"
#include "uninet/expr.hpp"
#include "uninet/random.hpp"

using namespace uninet;

namespace {

LogicExpr in(std::size_t i) { return LogicExpr::input(i); }

LogicExpr uni(LogicExpr a, LogicExpr b) {
  return LogicExpr::binary(0.5, std::move(a), std::move(b));
}

LogicExpr random_expr(Rng& rng, int depth) {
  const auto pick = rng.below(depth > 0 ? 6 : 3);
  if (pick == 0) return LogicExpr::constant(rng.below(2) == 1);
  if (pick <= 2) return in(rng.below(40));
  if (pick == 3) return LogicExpr::negate(random_expr(rng, depth - 1));
  static const double alphas[] = {0.0, 0.5, 1.0, 0.3, 0.71, 0.02};
  return LogicExpr::binary(alphas[rng.below(6)], random_expr(rng, depth - 1),
                           random_expr(rng, depth - 1));
}

}  // namespace

TEST(Render, TableShapes) {
  const auto breast = uni(uni(in(28), in(34)), uni(in(6), in(34)));
  EXPECT_EQ(render(breast), "((28) uni (34)) uni ((6) uni (34))");
  EXPECT_EQ(render(LogicExpr::negate(uni(in(1), in(6)))), "1-((1) uni (6))");
  EXPECT_EQ(render(in(5)), "(5)");
  EXPECT_EQ(render(LogicExpr::binary(0.3, in(0), in(1))), "(0) op[0.30] (1)");
  EXPECT_EQ(render(LogicExpr::binary(0.97, in(0), LogicExpr::constant(true))), "(0) and 1");
  EXPECT_EQ(render(LogicExpr::binary(0.0, in(2), LogicExpr::constant(false))), "(2) or 0");
}

TEST(Render, LeafNames) {
  const std::vector<std::string> names{"age", "mass"};
  EXPECT_EQ(render(LogicExpr::binary(1.0, in(0), in(1)), names), "(age) and (mass)");
}

TEST(Parse, RoundTripExamples) {
  for (const std::string text :
       {"((28) uni (34)) uni ((6) uni (34))", "1-((1) uni (6))", "(5)", "1", "0",
        "(0) op[0.30] (1-(3))", "1-(1-(2))", "((0) and (1)) or 0"}) {
    EXPECT_EQ(render(parse_expression(text)), text);
  }
}

TEST(Parse, RandomTreesRoundTrip) {
  Rng rng(31);
  for (int i = 0; i < 2000; ++i) {
    const auto e = random_expr(rng, 4);
    const auto text = render(e);
    const auto back = parse_expression(text);
    EXPECT_TRUE(same_shape(e, back)) << text;
    EXPECT_EQ(render(back), text);
  }
}

TEST(Parse, Errors) {
  for (const std::string bad : {"", "(", "(a)", "(1) xor (2)", "(1) uni", "(1) uni (2) extra",
                                "op[0.3]", "(1) op[abc] (2)", "2"}) {
    EXPECT_THROW(parse_expression(bad), DataError) << bad;
  }
}

TEST(Expr, Evaluate) {
  const std::vector<double> t{0.9, 0.8, 0.1};
  EXPECT_NEAR(LogicExpr::binary(1.0, in(0), in(1)).evaluate(t), 0.7, 1e-12);
  EXPECT_NEAR(LogicExpr::binary(0.0, in(1), in(2)).evaluate(t), 0.9, 1e-12);
  EXPECT_NEAR(LogicExpr::negate(in(2)).evaluate(t), 0.9, 1e-12);
  EXPECT_NEAR(LogicExpr::binary(1.0, in(0), LogicExpr::constant(true)).evaluate(t), 0.9, 1e-12);
  EXPECT_NEAR(LogicExpr::binary(0.0, in(0), LogicExpr::constant(false)).evaluate(t), 0.9, 1e-12);
}

TEST(Expr, Counts) {
  const auto e = LogicExpr::negate(uni(uni(in(3), in(7)), LogicExpr::constant(true)));
  EXPECT_EQ(e.leaf_count(), 2u);
  EXPECT_EQ(e.binary_depth(), 2u);
  EXPECT_EQ(e.max_input_index(), 7u);
  EXPECT_TRUE(e.has_inputs());
  EXPECT_FALSE(LogicExpr::negate(LogicExpr::constant(false)).has_inputs());
}

TEST(Expr, SameShapeIgnoresNamedAlphaNoise) {
  EXPECT_TRUE(same_shape(LogicExpr::binary(0.98, in(0), in(1)),
                         LogicExpr::binary(1.0, in(0), in(1))));
  EXPECT_FALSE(same_shape(LogicExpr::binary(0.98, in(0), in(1)),
                          LogicExpr::binary(0.5, in(0), in(1))));
  EXPECT_FALSE(same_shape(LogicExpr::binary(0.3, in(0), in(1)),
                          LogicExpr::binary(0.32, in(0), in(1))));
  EXPECT_FALSE(same_shape(uni(in(0), in(1)), uni(in(1), in(0))));
}

TEST(Expr, Json) {
  const auto j = expr_to_json(LogicExpr::negate(LogicExpr::binary(0.0, in(1), in(2))));
  EXPECT_EQ(j.at("type"), "not");
  EXPECT_EQ(j.at("child").at("op"), "or");
  EXPECT_EQ(j.at("child").at("left").at("index"), 1);
}
