#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "spcdt/analysis.hpp"
#include "spcdt/pairing.hpp"

using namespace spcdt;

namespace {

const AttributeSlack& slack(const LeafOvergen& leaf, const std::string& attr) {
  for (const AttributeSlack& a : leaf.attributes) {
    if (a.attribute == attr) return a;
  }
  FAIL("attribute not on path: " << attr);
  throw;
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("slack against a declared range") {
    CsvOptions opt;
    opt.declared_ranges["x"] = {0, 10};
    const Dataset d = fixtures::from_csv("x,class\n1.5,a\n2.4,a\n7,b\n", opt);
    const DecisionTree t = parse_tree_text("x < 2.5 then class = a\nx >= 2.5 then class = b\n");
    const OvergenReport r = overgeneralization(t, d);
    REQUIRE(r.leaves.size() == 2);

    const AttributeSlack& low = slack(r.leaves[0], "x");
    CHECK(low.rule == Interval{0, 2.5});
    CHECK(low.data == Interval{1.5, 2.4});
    CHECK(low.slack_low == doctest::Approx(1.5));
    CHECK(low.slack_high == doctest::Approx(0.1));

    const AttributeSlack& high = slack(r.leaves[1], "x");
    CHECK(high.rule == Interval{2.5, 10});
    CHECK(high.slack_low == doctest::Approx(4.5));
    CHECK(high.slack_high == doctest::Approx(3.0));
  }

  TEST_CASE("leaf without cases reports the whole rule") {
    const Dataset d = fixtures::from_csv("x,class\n1,a\n2,a\n");
    const DecisionTree t = parse_tree_text("x < 5 then class = a\nx >= 5 then class = b\n");
    const OvergenReport r = overgeneralization(t, d);
    const AttributeSlack& high = slack(r.leaves[1], "x");
    CHECK(r.leaves[1].covered == 0);
    CHECK_FALSE(high.data.has_value());
    CHECK(high.slack_low == high.rule.width());
    CHECK(high.slack_high == high.rule.width());
  }

  TEST_CASE("setosa leaf stops short of the root threshold") {
    const OvergenReport r = overgeneralization(fixtures::tree("iris"), fixtures::iris());
    const LeafOvergen& setosa = r.leaves.front();
    CHECK(setosa.class_name == "Iris-setosa");
    CHECK(setosa.covered == 50);
    const AttributeSlack& pl = slack(setosa, "petal-length");
    CHECK(pl.slack_low == doctest::Approx(0.0));
    CHECK(pl.slack_high == doctest::Approx(0.55));
  }

  TEST_CASE("slack is never negative and data lies inside the rule") {
    for (const char* name : {"wbc_five_attr", "wbc_full", "wbc_split"}) {
      const OvergenReport r = overgeneralization(fixtures::tree(name), fixtures::wbc());
      for (const LeafOvergen& l : r.leaves) {
        for (const AttributeSlack& a : l.attributes) {
          CHECK(a.slack_low >= 0.0);
          CHECK(a.slack_high >= 0.0);
          if (a.data) {
            CHECK(a.rule.lo <= a.data->lo);
            CHECK(a.data->hi <= a.rule.hi);
          }
        }
      }
    }
  }

  TEST_CASE("iris root margin") {
    const MarginReport r = margins(fixtures::tree("iris"), fixtures::iris(), 0.1);
    const NodeMargin& root = r.nodes.front();
    CHECK(root.attribute == "petal-length");
    CHECK(root.reaching == 150);
    CHECK(root.nearest_low == doctest::Approx(1.9));
    CHECK(root.nearest_high == doctest::Approx(3.0));
    CHECK(root.borderline.empty());
  }

  TEST_CASE("integer-valued WBC attribute at a half threshold") {
    const MarginReport r = margins(fixtures::tree("wbc_five_attr"), fixtures::wbc(), 0.5);
    const NodeMargin& root = r.nodes.front();
    CHECK(root.threshold == 2.5);
    CHECK(root.nearest_low == doctest::Approx(2.0));
    CHECK(root.nearest_high == doctest::Approx(3.0));
    CHECK_FALSE(root.borderline.empty());
    for (const BorderlineCase& b : root.borderline) CHECK(b.distance == doctest::Approx(0.5));
  }

  TEST_CASE("default epsilon is one percent of the range") {
    const MarginReport r = margins(fixtures::tree("iris"), fixtures::iris());
    const Interval range = attribute_range(fixtures::iris(), "petal-length");
    CHECK(r.nodes.front().epsilon == doctest::Approx(0.01 * range.width()));
  }

  TEST_CASE("non-positive epsilon lists nothing") {
    for (double eps : {0.0, -1.0}) {
      const MarginReport r = margins(fixtures::tree("wbc_full"), fixtures::wbc(), eps);
      for (const NodeMargin& m : r.nodes) CHECK(m.borderline.empty());
    }
  }

  TEST_CASE("borderline sets grow with epsilon") {
    const DecisionTree t = fixtures::tree("iris");
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int trial = 0; trial < 30; ++trial) {
      double a = u(rng), b = u(rng);
      if (a > b) std::swap(a, b);
      const MarginReport small = margins(t, fixtures::iris(), a);
      const MarginReport large = margins(t, fixtures::iris(), b);
      for (std::size_t i = 0; i < small.nodes.size(); ++i) {
        CHECK(small.nodes[i].borderline.size() <= large.nodes[i].borderline.size());
        for (const BorderlineCase& c : small.nodes[i].borderline) {
          CHECK(c.distance <= a);
          const auto& big = large.nodes[i].borderline;
          CHECK(std::find(big.begin(), big.end(), c) != big.end());
        }
      }
    }
  }

  TEST_CASE("split comparison against the same data") {
    const DecisionTree t = fixtures::tree("wbc_split");
    const Dataset& wbc = fixtures::wbc();
    const SplitCompareReport r = split_compare(t, wbc, wbc);
    CHECK(r.train == r.validation);
    CHECK(r.missing_in_train.empty());
    CHECK(r.missing_in_validation.empty() == true);
    for (const LeafCoverage& c : r.coverage) {
      CHECK(c.train_count == c.validation_count);
      CHECK(c.plot_id.has_value());
    }
  }

  TEST_CASE("split comparison on a partition") {
    const Dataset& wbc = fixtures::wbc();
    const auto [train, validation] = split(wbc, 0.7, 11);
    const DecisionTree t = induce_id3(train);
    const SplitCompareReport r = split_compare(t, train, validation);
    std::size_t tc = 0, vc = 0;
    for (const LeafCoverage& c : r.coverage) {
      tc += c.train_count;
      vc += c.validation_count;
      const bool lost = c.train_count > 0 && c.validation_count == 0;
      CHECK(lost == (std::find(r.missing_in_validation.begin(), r.missing_in_validation.end(), c.leaf) !=
                     r.missing_in_validation.end()));
    }
    CHECK(tc == train.size());
    CHECK(vc == validation.size());
    CHECK(r.train.total + r.validation.total == wbc.size());
    CHECK(r.train.error_rate <= r.validation.error_rate);
  }

  TEST_CASE("reports serialize and format") {
    const DecisionTree t = fixtures::tree("iris");
    const Dataset& iris = fixtures::iris();
    CHECK(to_json(overgeneralization(t, iris))["report"] == "overgen");
    CHECK(to_json(margins(t, iris))["report"] == "margins");
    CHECK(to_json(split_compare(t, iris, iris))["report"] == "split-compare");
    CHECK(format_report(margins(t, iris)).find("petal-length") != std::string::npos);
    CHECK(format_report(overgeneralization(t, iris)).find("Iris-setosa") != std::string::npos);
    CHECK_FALSE(format_report(split_compare(t, iris, iris)).empty());
  }
}
