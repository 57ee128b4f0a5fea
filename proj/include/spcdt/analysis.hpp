#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "spcdt/dataset.hpp"
#include "spcdt/scene_json.hpp"
#include "spcdt/tree.hpp"

namespace spcdt {

struct AttributeSlack {
  std::string attribute;
  Interval rule;                // leaf rule interval clipped to the attribute range
  std::optional<Interval> data;  // min/max of covered known values; none if no case
  double slack_low = 0.0;
  double slack_high = 0.0;
  bool operator==(const AttributeSlack&) const = default;
};

struct LeafOvergen {
  NodeId leaf = 0;
  std::string class_name;
  std::size_t covered = 0;
  std::vector<AttributeSlack> attributes;  // attributes on the leaf's path, first-use order
  bool operator==(const LeafOvergen&) const = default;
};

struct OvergenReport {
  std::vector<LeafOvergen> leaves;
  bool operator==(const OvergenReport&) const = default;
};

/// How far each leaf's rule interval reaches past the data it covers. A leaf
/// with no covered values reports the full rule width on both sides.
OvergenReport overgeneralization(const DecisionTree& tree, const Dataset& dataset);

struct BorderlineCase {
  std::size_t case_id = 0;
  double value = 0.0;
  double distance = 0.0;
  Branch side = Branch::Low;
  bool opposite_class = false;  // label differs from the majority on its side
  bool operator==(const BorderlineCase&) const = default;
};

struct NodeMargin {
  NodeId node = 0;
  std::string attribute;
  double threshold = 0.0;
  double epsilon = 0.0;
  std::size_t reaching = 0;
  std::optional<double> nearest_low;   // largest value below the threshold
  std::optional<double> nearest_high;  // smallest value at or above it
  std::vector<BorderlineCase> borderline;
  bool operator==(const NodeMargin&) const = default;
};

struct MarginReport {
  std::vector<NodeMargin> nodes;
  bool operator==(const MarginReport&) const = default;
};

/// Default epsilon: 1% of the split attribute's range width.
inline constexpr double kDefaultMarginFraction = 0.01;

/// Nearest values on both sides of every split and the cases within
/// `epsilon` of it. A non-positive epsilon lists no borderline cases.
MarginReport margins(const DecisionTree& tree, const Dataset& dataset, std::optional<double> epsilon = std::nullopt);

struct LeafCoverage {
  NodeId leaf = 0;
  std::string class_name;
  std::optional<std::size_t> plot_id;  // decided region drawing the leaf
  std::optional<std::size_t> region;
  std::size_t train_count = 0;
  std::size_t validation_count = 0;
  bool operator==(const LeafCoverage&) const = default;
};

struct SplitCompareReport {
  EvaluationReport train;
  EvaluationReport validation;
  std::vector<LeafCoverage> coverage;  // leaves in pre-order
  std::vector<NodeId> missing_in_validation;  // train_count > 0, validation_count == 0
  std::vector<NodeId> missing_in_train;       // validation_count > 0, train_count == 0
  bool operator==(const SplitCompareReport&) const = default;
};

SplitCompareReport split_compare(const DecisionTree& tree, const Dataset& train, const Dataset& validation);

Json to_json(const OvergenReport& report);
Json to_json(const MarginReport& report);
Json to_json(const SplitCompareReport& report);

std::string format_report(const OvergenReport& report);
std::string format_report(const MarginReport& report);
std::string format_report(const SplitCompareReport& report);

}  // namespace spcdt
