#include <fmt/core.h>

#include "doctest.h"
#include "fixtures.hpp"
#include "spcdt/error.hpp"

using namespace spcdt;

namespace {

const char* kSmallTree =
    "x < 2.5\n"
    "  y < 1 then class = a (100.00 % of 3 examples)\n"
    "  y >= 1 then class = b (75.00 % of 4 examples)\n"
    "x >= 2.5 then class = b (100.00 % of 9 examples)\n";

Dataset xy(const std::string& rows) { return fixtures::from_csv("x,y,class\n" + rows); }

// Printed leaf annotations are rounded to two decimals.
void check_annotations_reproduced(const DecisionTree& printed, const Dataset& data) {
  const DecisionTree refreshed = refresh_leaf_stats(printed, data);
  for (NodeId id : printed.leaves()) {
    CAPTURE(id);
    CHECK(refreshed.node(id).leaf().count == printed.node(id).leaf().count);
    CHECK(fmt::format("{:.2f}", refreshed.node(id).leaf().purity_pct) ==
          fmt::format("{:.2f}", printed.node(id).leaf().purity_pct));
  }
}

}  // namespace

TEST_SUITE("tree") {
  TEST_CASE("parse indented listing") {
    const DecisionTree t = parse_tree_text(kSmallTree);
    REQUIRE(t.size() == 5);
    const SplitNode& root = t.node(0).split();
    CHECK(root.attribute == "x");
    CHECK(root.threshold == 2.5);
    CHECK(t.node(root.low).split().attribute == "y");
    CHECK(t.node(root.high).leaf().count == 9);
    CHECK(t.node(2).leaf().class_name == "a");
    CHECK(t.node(3).leaf().purity_pct == 75.0);
    CHECK(t.leaves() == std::vector<NodeId>{2, 3, 4});
    CHECK(t.subtree_count(1) == 7);
  }

  TEST_CASE("indentation is not needed") {
    std::string flat;
    for (char c : std::string(kSmallTree)) {
      if (c != ' ' || (!flat.empty() && flat.back() != '\n')) flat += c;
    }
    CHECK(parse_tree_text(flat) == parse_tree_text(kSmallTree));
  }

  TEST_CASE("unicode operator, bullets, bold and comma decimals") {
    const DecisionTree t = parse_tree_text(
        "- **x** < 2,5\n"
        " \xE2\x80\xA2 y < 1 then classe = **a** (100,00 % of 3 cases)\n"
        " \xE2\x80\xA2 y \xE2\x89\xA5 1 then classe = b (75,00 % of 4 cases)\n"
        "- x >= 2,5 then class = b (100.00 % of 9 examples)\n");
    CHECK(t == parse_tree_text(kSmallTree));
  }

  TEST_CASE("bare leaves and single-leaf trees") {
    const DecisionTree t = parse_tree_text("then class = only\n");
    CHECK(t.size() == 1);
    CHECK(t.node(0).leaf().class_name == "only");
  }

  TEST_CASE("malformed listings are rejected") {
    CHECK_THROWS_AS(parse_tree_text(""), ParseError);
    CHECK_THROWS_AS(parse_tree_text("x < 1 then class = a\n"), ParseError);
    CHECK_THROWS_AS(parse_tree_text("x < 1 then class = a\nx >= 2 then class = b\n"), ParseError);
    CHECK_THROWS_AS(parse_tree_text("x <= 1 then class = a\nx > 1 then class = b\n"), ParseError);
    CHECK_THROWS_AS(parse_tree_text("x < 1\nx >= 1 then class = b\n"), ParseError);
    CHECK_THROWS_AS(parse_tree_text("x < 1 then class = a\nx >= 1 then class = b\nthen class = c\n"),
                    ParseError);
    try {
      parse_tree_text("x < 1 then class = a\nx >= abc then class = b\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }

  TEST_CASE("annotation consistency is validated") {
    CHECK_THROWS_AS(parse_tree_text("x < 1 then class = a (50.00 % of 3 examples)\nx >= 1 then class = b\n"),
                    InputError);
  }

  TEST_CASE("text and JSON round trips") {
    for (const char* name : {"iris", "wine", "wbc_five_attr", "wbc_full", "wbc_split"}) {
      CAPTURE(name);
      const DecisionTree t = fixtures::tree(name);
      CHECK(parse_tree_text(print_tree_text(t)) == t);
      const std::string json = tree_to_json(t);
      CHECK(tree_from_json(json) == t);
      CHECK(tree_to_json(tree_from_json(json)) == json);
    }
  }

  TEST_CASE("JSON reader is strict") {
    CHECK_THROWS_AS(tree_from_json("{\"kind\": \"leaf\"}"), SchemaError);
    CHECK_THROWS_AS(tree_from_json("{\"kind\": \"leaf\", \"class\": \"a\", \"colour\": 1}"), SchemaError);
    CHECK_THROWS_AS(tree_from_json("{\"kind\": \"split\", \"attribute\": \"x\", \"threshold\": 1,"
                                   " \"low\": {\"kind\": \"leaf\", \"class\": \"a\"}}"),
                    SchemaError);
    CHECK_THROWS_AS(tree_from_json("[1]"), InputError);
    CHECK_THROWS_AS(tree_from_json("{"), InputError);
    const DecisionTree t = tree_from_json(
        "{\"kind\": \"split\", \"attribute\": \"x\", \"threshold\": 1,"
        " \"low\": {\"kind\": \"leaf\", \"class\": \"a\"}, \"high\": {\"kind\": \"leaf\", \"class\": \"b\"}}");
    CHECK(t.size() == 3);
    CHECK(t.node(2).leaf().class_name == "b");
  }

  TEST_CASE("boundary values go high, missing values follow the larger subtree") {
    const DecisionTree t = parse_tree_text(kSmallTree);
    const Dataset d = xy("2.5,0,a\n2.4999,0,a\n?,0,a\n1,?,a\n");
    CHECK(predict(t, d, d.cases()[0]).class_name == "b");
    CHECK(predict(t, d, d.cases()[1]).class_name == "a");

    // x missing: high side holds 9 annotated cases against 7.
    const Prediction p = predict(t, d, d.cases()[2]);
    CHECK(p.path.front().missing);
    CHECK(p.path.front().branch == Branch::High);
    // y missing: 4 > 3, so high.
    CHECK(predict(t, d, d.cases()[3]).class_name == "b");
  }

  TEST_CASE("missing-value ties go low") {
    const DecisionTree t = parse_tree_text("x < 1 then class = a (100.00 % of 2 examples)\n"
                                           "x >= 1 then class = b (100.00 % of 2 examples)\n");
    CHECK(missing_value_branch(t, 0) == Branch::Low);
    const DecisionTree bare = parse_tree_text("x < 1 then class = a\nx >= 1 then class = b\n");
    CHECK(missing_value_branch(bare, 0) == Branch::Low);
  }

  TEST_CASE("unknown split attributes are schema errors") {
    const DecisionTree t = parse_tree_text(kSmallTree);
    CHECK_THROWS_AS(evaluate(t, fixtures::from_csv("x,class\n1,a\n")), SchemaError);
  }

  TEST_CASE("iris evaluation matches the published table") {
    const EvaluationReport r = evaluate(fixtures::tree("iris"), fixtures::iris());
    CHECK(r.confusion == std::vector<std::vector<std::size_t>>{{50, 0, 0}, {0, 47, 3}, {0, 1, 49}});
    CHECK(r.errors == 4);
    CHECK(fmt::format("{:.4f}", r.error_rate) == "0.0267");
    check_annotations_reproduced(fixtures::tree("iris"), fixtures::iris());
  }

  TEST_CASE("wine evaluation matches the published table") {
    const EvaluationReport r = evaluate(fixtures::tree("wine"), fixtures::wine());
    CHECK(fmt::format("{:.4f}", r.error_rate) == "0.0225");
    CHECK(fmt::format("{:.4f}", r.per_class[0].recall) == "0.9492");
    CHECK(fmt::format("{:.4f}", r.per_class[1].recall) == "0.9859");
    CHECK(fmt::format("{:.4f}", r.per_class[2].recall) == "1.0000");
    check_annotations_reproduced(fixtures::tree("wine"), fixtures::wine());
  }

  TEST_CASE("metrics against a hand-computed matrix") {
    const DecisionTree t = parse_tree_text("x < 1 then class = a\nx >= 1 then class = b\n");
    // actual a: 0 0 5 (one wrong); actual b: 2 3 (right), 0.5 (wrong)
    const Dataset d = xy("0,0,a\n0,0,a\n5,0,a\n2,0,b\n3,0,b\n0.5,0,b\n");
    const EvaluationReport r = evaluate(t, d);
    CHECK(r.confusion == std::vector<std::vector<std::size_t>>{{2, 1}, {1, 2}});
    CHECK(r.per_class[0].recall == doctest::Approx(2.0 / 3.0));
    CHECK(r.per_class[0].one_minus_precision == doctest::Approx(1.0 / 3.0));
    CHECK(r.error_rate == doctest::Approx(2.0 / 6.0));
  }

  TEST_CASE("classes only the tree knows get a column") {
    const DecisionTree t = parse_tree_text("x < 1 then class = a\nx >= 1 then class = z\n");
    const EvaluationReport r = evaluate(t, xy("0,0,a\n2,0,a\n"));
    CHECK(r.classes == std::vector<std::string>{"a", "z"});
    CHECK(r.per_class[1].recall == 0.0);
    CHECK(r.per_class[1].one_minus_precision == 1.0);
  }

  TEST_CASE("evaluation table layout") {
    const std::string text = format_evaluation(evaluate(fixtures::tree("iris"), fixtures::iris()));
    CHECK(text.rfind("Error rate 0.0267\n", 0) == 0);
    CHECK(text.find("Confusion matrix") != std::string::npos);
    CHECK(text.find("Iris-versicolor  0.9400  0.0208") != std::string::npos);
  }

  TEST_CASE("refresh on an empty leaf") {
    const DecisionTree t = parse_tree_text(kSmallTree);
    const DecisionTree r = refresh_leaf_stats(t, xy("5,0,b\n"));
    CHECK(r.node(2).leaf().count == 0);
    CHECK(r.node(2).leaf().purity_pct == 100.0);
    CHECK(r.node(4).leaf().count == 1);
  }

  TEST_CASE("adjust threshold") {
    const DecisionTree t = fixtures::tree("iris");
    const DecisionTree moved = adjust_threshold(t, 0, 2.6);
    CHECK(moved.node(0).split().threshold == 2.6);
    CHECK(moved.node(2) == t.node(2));
    CHECK(t.node(0).split().threshold == 2.45);
    CHECK_THROWS_AS(adjust_threshold(t, 1, 1.0), InvalidEditError);
    CHECK_THROWS_AS(adjust_threshold(t, 99, 1.0), NotFoundError);
    CHECK_THROWS_AS(adjust_threshold(t, 0, std::numeric_limits<double>::infinity()), InvalidEditError);
  }

  TEST_CASE("builder renumbers in pre-order") {
    TreeBuilder b;
    const NodeId hi = b.leaf("b");
    const NodeId lo = b.leaf("a");
    const NodeId root = b.split("x", 1.0, lo, hi);
    const DecisionTree t = b.build(root);
    CHECK(t.root() == 0);
    CHECK(t.node(1).leaf().class_name == "a");
    CHECK(t.path_to(2) == std::vector<PathCondition>{{0, "x", 1.0, Branch::High}});
    CHECK(t.parent(2) == NodeId{0});
    CHECK_FALSE(t.parent(0));
  }

  TEST_CASE("arena validation") {
    std::vector<TreeNode> bad{{0, SplitNode{"x", 1.0, 1, 1}}, {1, LeafNode{"a"}}};
    CHECK_THROWS_AS(DecisionTree{bad}, InputError);
    std::vector<TreeNode> orphan{{0, LeafNode{"a"}}, {1, LeafNode{"b"}}};
    CHECK_THROWS_AS(DecisionTree{orphan}, InputError);
  }
}
