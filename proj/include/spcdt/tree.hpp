#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spcdt/dataset.hpp"

namespace spcdt {

using NodeId = std::size_t;

/// Side of a split: Low is `value < threshold`, High is `value >= threshold`.
enum class Branch { Low, High };

std::string_view to_string(Branch b);

struct SplitNode {
  std::string attribute;
  double threshold = 0.0;
  NodeId low = 0;
  NodeId high = 0;

  NodeId child(Branch b) const { return b == Branch::Low ? low : high; }
  bool operator==(const SplitNode&) const = default;
};

struct LeafNode {
  std::string class_name;
  double purity_pct = 100.0;
  std::size_t count = 0;

  bool operator==(const LeafNode&) const = default;
};

struct TreeNode {
  NodeId id = 0;
  std::variant<SplitNode, LeafNode> body;

  bool is_leaf() const { return std::holds_alternative<LeafNode>(body); }
  const SplitNode& split() const { return std::get<SplitNode>(body); }
  const LeafNode& leaf() const { return std::get<LeafNode>(body); }
  bool operator==(const TreeNode&) const = default;
};

/// A single condition on a root-to-node path.
struct PathCondition {
  NodeId node = 0;
  std::string attribute;
  double threshold = 0.0;
  Branch branch = Branch::Low;

  bool operator==(const PathCondition&) const = default;
};

/// Binary threshold tree stored as an arena indexed by node id. Values are
/// immutable; edits return new trees.
class DecisionTree {
 public:
  /// Validates a proper binary tree: ids equal arena positions, every node
  /// other than the root has exactly one parent, and all nodes are reachable.
  explicit DecisionTree(std::vector<TreeNode> nodes, NodeId root = 0);

  NodeId root() const { return root_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<TreeNode>& nodes() const { return nodes_; }

  /// Throws NotFoundError for ids outside the arena.
  const TreeNode& node(NodeId id) const;
  bool is_leaf(NodeId id) const { return node(id).is_leaf(); }

  std::optional<NodeId> parent(NodeId id) const;
  std::vector<NodeId> preorder() const;
  std::vector<NodeId> leaves() const;
  std::vector<NodeId> splits() const;

  /// Sum of the leaf `count` annotations under `id`.
  std::size_t subtree_count(NodeId id) const;

  /// Conditions from the root down to (not including) `id`.
  std::vector<PathCondition> path_to(NodeId id) const;

  /// Split attributes in order of first pre-order appearance.
  std::vector<std::string> attributes_used() const;

  bool operator==(const DecisionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
  std::vector<std::optional<NodeId>> parents_;
  NodeId root_ = 0;
};

/// Bottom-up construction helper. `build` renumbers the nodes reachable from
/// `root` in pre-order (low child first), so the result's root id is 0.
class TreeBuilder {
 public:
  NodeId leaf(std::string class_name, double purity_pct = 100.0, std::size_t count = 0);
  NodeId split(std::string attribute, double threshold, NodeId low, NodeId high);
  DecisionTree build(NodeId root) const;

 private:
  std::vector<std::variant<SplitNode, LeafNode>> nodes_;
};

/// Resolves every split's attribute name against a dataset schema.
class TreeBinding {
 public:
  /// Throws SchemaError if a split names an attribute the dataset lacks.
  TreeBinding(const DecisionTree& tree, const Dataset& schema);
  std::size_t attribute_index(NodeId split) const { return attribute_of_[split]; }

 private:
  std::vector<std::size_t> attribute_of_;
};

struct PathStep {
  NodeId node = 0;
  Branch branch = Branch::Low;
  bool missing = false;  // value absent; branch chosen by the missing-value rule

  bool operator==(const PathStep&) const = default;
};

struct Prediction {
  std::string class_name;
  NodeId leaf = 0;
  std::vector<PathStep> path;
};

/// Branch taken by a case whose split value is missing: the child whose
/// subtree annotations hold more cases, low on ties and when both are zero.
Branch missing_value_branch(const DecisionTree& tree, NodeId split);

/// Branch for a known value: equality goes to the high side.
inline Branch branch_for(double value, double threshold) {
  return value < threshold ? Branch::Low : Branch::High;
}

Prediction predict(const DecisionTree& tree, const TreeBinding& binding, const Case& c);
Prediction predict(const DecisionTree& tree, const Dataset& schema, const Case& c);

struct ClassMetrics {
  double recall = 0.0;
  double one_minus_precision = 0.0;

  bool operator==(const ClassMetrics&) const = default;
};

/// Confusion matrix with rows = actual class, columns = predicted class.
/// `classes` is the dataset class order followed by any tree-only classes.
struct EvaluationReport {
  std::vector<std::string> classes;
  std::vector<std::vector<std::size_t>> confusion;
  std::vector<ClassMetrics> per_class;
  std::size_t total = 0;
  std::size_t errors = 0;
  double error_rate = 0.0;

  std::size_t row_sum(std::size_t actual) const;
  std::size_t column_sum(std::size_t predicted) const;
  bool operator==(const EvaluationReport&) const = default;
};

EvaluationReport evaluate(const DecisionTree& tree, const Dataset& dataset);

/// Aligned plain-text table: error rate, then per-class recall and
/// 1-precision next to the confusion matrix with row and column sums.
std::string format_evaluation(const EvaluationReport& report);

/// Recomputes every leaf's count and purity (the share of the leaf's own class)
/// from the cases reaching it.
/// Missing values are routed with the input tree's annotations.
DecisionTree refresh_leaf_stats(const DecisionTree& tree, const Dataset& dataset);

/// Copy of `tree` with one split threshold replaced. Throws InvalidEditError
/// for leaves and NotFoundError for unknown ids.
DecisionTree adjust_threshold(const DecisionTree& tree, NodeId node, double new_threshold);

struct InduceParams {
  std::size_t min_leaf = 1;
  std::size_t max_depth = 32;
  double min_gain = 1e-9;
};

/// Entropy-gain induction with binary midpoint thresholds.
DecisionTree induce_id3(const Dataset& train, const InduceParams& params = {});

/// Gains closer than this are ties, resolved by attribute order and then by
/// the smaller threshold.
inline constexpr double kGainTieTolerance = 1e-12;

// Tree text format.
DecisionTree parse_tree_text(std::string_view text);
std::string print_tree_text(const DecisionTree& tree);

// Canonical JSON: nested node objects with a fixed key order.
std::string tree_to_json(const DecisionTree& tree);
DecisionTree tree_from_json(std::string_view json);

}  // namespace spcdt
