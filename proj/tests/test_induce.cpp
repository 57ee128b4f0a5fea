#include <map>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "spcdt/error.hpp"

using namespace spcdt;

TEST_SUITE("induce") {
  TEST_CASE("root split agrees with exhaustive search") {
    std::mt19937 rng(20240611);
    for (int trial = 0; trial < 300; ++trial) {
      const Dataset d = oracles::random_dataset(rng, 12, 3);
      CAPTURE(trial);
      const DecisionTree t = induce_id3(d);
      const auto expected = oracles::best_root_split(d);
      if (!expected) {
        CHECK(t.is_leaf(t.root()));
        continue;
      }
      REQUIRE_FALSE(t.is_leaf(t.root()));
      const SplitNode& root = t.node(t.root()).split();
      CHECK(root.attribute == d.attributes()[expected->attribute].name);
      CHECK(root.threshold == expected->threshold);
    }
  }

  TEST_CASE("impure leaves have no informative split left") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      const Dataset d = oracles::random_dataset(rng, 30, 3);
      const DecisionTree t = induce_id3(d);
      std::map<NodeId, std::vector<std::size_t>> reaching;
      for (const Case& c : d.cases()) reaching[predict(t, d, c).leaf].push_back(c.id);
      for (const auto& [leaf, ids] : reaching) {
        const Dataset part = d.subset(ids);
        CAPTURE(trial);
        CHECK_FALSE(oracles::best_root_split(part).has_value());
      }
      CHECK(evaluate(t, d).total == d.size());
    }
  }

  TEST_CASE("leaf annotations equal the training statistics") {
    const Dataset& wbc = fixtures::wbc();
    const DecisionTree t = induce_id3(wbc);
    CHECK(refresh_leaf_stats(t, wbc) == t);
    std::size_t total = 0;
    for (NodeId id : t.leaves()) total += t.node(id).leaf().count;
    CHECK(total == wbc.size());
  }

  TEST_CASE("pure data yields a single leaf") {
    const Dataset d = fixtures::from_csv("x,class\n1,a\n2,a\n");
    const DecisionTree t = induce_id3(d);
    CHECK(t.size() == 1);
    CHECK(t.node(0).leaf().count == 2);
  }

  TEST_CASE("majority ties favor the earlier class") {
    const Dataset d = fixtures::from_csv("x,class\n1,b\n1,a\n");
    const DecisionTree t = induce_id3(d);
    CHECK(t.node(0).leaf().class_name == "b");
    CHECK(t.node(0).leaf().purity_pct == 50.0);
  }

  TEST_CASE("depth and leaf size limits") {
    const Dataset& iris = fixtures::iris();
    const DecisionTree stump = induce_id3(iris, {1, 1, 1e-9});
    CHECK(stump.size() == 3);
    const DecisionTree coarse = induce_id3(iris, {20, 32, 1e-9});
    for (NodeId id : coarse.leaves()) CHECK(coarse.node(id).leaf().count >= 20);
  }

  TEST_CASE("iris root is the petal split") {
    const DecisionTree t = induce_id3(fixtures::iris());
    const SplitNode& root = t.node(0).split();
    CHECK(root.attribute == "petal-length");
    CHECK(root.threshold == doctest::Approx(2.45));
  }

  TEST_CASE("missing values join the larger side") {
    const Dataset d = fixtures::from_csv("x,class\n1,a\n2,a\n3,a\n8,b\n?,a\n");
    const DecisionTree t = induce_id3(d);
    REQUIRE_FALSE(t.is_leaf(0));
    CHECK(t.node(0).split().threshold == 5.5);
    CHECK(t.node(t.node(0).split().low).leaf().count == 4);
    CHECK(predict(t, d, d.cases()[4]).class_name == "a");
  }

  TEST_CASE("deterministic") {
    CHECK(induce_id3(fixtures::wine()) == induce_id3(fixtures::wine()));
  }

  TEST_CASE("empty input") {
    CHECK_THROWS_AS(induce_id3(Dataset({"x"}, {})), InputError);
  }
}
