#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "spcdt/error.hpp"
#include "spcdt/tree.hpp"

namespace spcdt {

std::string_view to_string(Branch b) { return b == Branch::Low ? "low" : "high"; }

namespace {

void check_leaf(const LeafNode& leaf, NodeId id) {
  if (leaf.class_name.empty()) throw SchemaError(fmt::format("leaf {} has no class", id));
  if (!(leaf.purity_pct >= 0.0 && leaf.purity_pct <= 100.0)) {
    throw SchemaError(fmt::format("leaf {} purity {} outside [0, 100]", id, leaf.purity_pct));
  }
  // Annotations are printed with two decimals, so the implied majority count
  // may be off by up to 0.005% of the leaf size.
  const double majority = leaf.purity_pct * static_cast<double>(leaf.count) / 100.0;
  const double slack = 0.005 * static_cast<double>(leaf.count) / 100.0 + 1e-9;
  if (std::abs(majority - std::round(majority)) > slack) {
    throw SchemaError(fmt::format("leaf {}: {}% of {} is not a whole number of cases", id,
                                  leaf.purity_pct, leaf.count));
  }
}

}  // namespace

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, NodeId root)
    : nodes_(std::move(nodes)), parents_(nodes_.size()), root_(root) {
  if (nodes_.empty()) throw SchemaError("tree has no nodes");
  if (root_ >= nodes_.size()) throw SchemaError(fmt::format("root {} is not a node", root_));
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id != i) {
      throw SchemaError(fmt::format("node ids must be dense: position {} holds id {}", i, nodes_[i].id));
    }
  }

  std::size_t leaves = 0;
  std::size_t splits = 0;
  for (const TreeNode& n : nodes_) {
    if (n.is_leaf()) {
      check_leaf(n.leaf(), n.id);
      ++leaves;
      continue;
    }
    ++splits;
    const SplitNode& s = n.split();
    if (s.attribute.empty()) throw SchemaError(fmt::format("split {} has no attribute", n.id));
    if (!std::isfinite(s.threshold)) {
      throw SchemaError(fmt::format("split {} has a non-finite threshold", n.id));
    }
    for (NodeId child : {s.low, s.high}) {
      if (child >= nodes_.size()) {
        throw SchemaError(fmt::format("split {} references unknown node {}", n.id, child));
      }
      if (child == root_ || parents_[child]) {
        throw SchemaError(fmt::format("node {} has more than one parent", child));
      }
      parents_[child] = n.id;
    }
  }
  if (leaves != splits + 1) {
    throw SchemaError(fmt::format("not a proper binary tree: {} leaves for {} splits", leaves, splits));
  }
  if (preorder().size() != nodes_.size()) throw SchemaError("tree has unreachable nodes");
}

const TreeNode& DecisionTree::node(NodeId id) const {
  if (id >= nodes_.size()) throw NotFoundError(fmt::format("unknown node {}", id));
  return nodes_[id];
}

std::optional<NodeId> DecisionTree::parent(NodeId id) const {
  node(id);
  return parents_[id];
}

std::vector<NodeId> DecisionTree::preorder() const {
  std::vector<NodeId> out;
  std::vector<NodeId> stack{root_};
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    out.push_back(id);
    if (out.size() > nodes_.size()) break;  // cycle guard during validation
    if (!nodes_[id].is_leaf()) {
      stack.push_back(nodes_[id].split().high);
      stack.push_back(nodes_[id].split().low);
    }
  }
  return out;
}

std::vector<NodeId> DecisionTree::leaves() const {
  std::vector<NodeId> out;
  for (NodeId id : preorder()) {
    if (nodes_[id].is_leaf()) out.push_back(id);
  }
  return out;
}

std::vector<NodeId> DecisionTree::splits() const {
  std::vector<NodeId> out;
  for (NodeId id : preorder()) {
    if (!nodes_[id].is_leaf()) out.push_back(id);
  }
  return out;
}

std::size_t DecisionTree::subtree_count(NodeId id) const {
  const TreeNode& n = node(id);
  if (n.is_leaf()) return n.leaf().count;
  return subtree_count(n.split().low) + subtree_count(n.split().high);
}

std::vector<PathCondition> DecisionTree::path_to(NodeId id) const {
  std::vector<PathCondition> path;
  NodeId current = id;
  while (auto p = parent(current)) {
    const SplitNode& s = nodes_[*p].split();
    path.push_back({*p, s.attribute, s.threshold, s.low == current ? Branch::Low : Branch::High});
    current = *p;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<std::string> DecisionTree::attributes_used() const {
  std::vector<std::string> out;
  for (NodeId id : preorder()) {
    if (nodes_[id].is_leaf()) continue;
    const std::string& a = nodes_[id].split().attribute;
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  return out;
}

NodeId TreeBuilder::leaf(std::string class_name, double purity_pct, std::size_t count) {
  nodes_.emplace_back(LeafNode{std::move(class_name), purity_pct, count});
  return nodes_.size() - 1;
}

NodeId TreeBuilder::split(std::string attribute, double threshold, NodeId low, NodeId high) {
  if (low >= nodes_.size() || high >= nodes_.size()) {
    throw SchemaError("split references a node that was not built yet");
  }
  nodes_.emplace_back(SplitNode{std::move(attribute), threshold, low, high});
  return nodes_.size() - 1;
}

DecisionTree TreeBuilder::build(NodeId root) const {
  if (root >= nodes_.size()) throw SchemaError("builder root is not a node");
  std::vector<TreeNode> out;
  // Pre-order renumbering; children are assigned ids as they are emitted.
  auto emit = [&](auto&& self, NodeId old) -> NodeId {
    const NodeId id = out.size();
    out.push_back(TreeNode{id, nodes_[old]});
    if (const auto* s = std::get_if<SplitNode>(&nodes_[old])) {
      const NodeId low = self(self, s->low);
      const NodeId high = self(self, s->high);
      auto& mine = std::get<SplitNode>(out[id].body);
      mine.low = low;
      mine.high = high;
    }
    return id;
  };
  emit(emit, root);
  return DecisionTree(std::move(out), 0);
}

TreeBinding::TreeBinding(const DecisionTree& tree, const Dataset& schema)
    : attribute_of_(tree.size(), 0) {
  for (const TreeNode& n : tree.nodes()) {
    if (n.is_leaf()) continue;
    auto idx = schema.find_attribute(n.split().attribute);
    if (!idx) {
      throw SchemaError(fmt::format("tree splits on '{}', which the dataset does not have",
                                    n.split().attribute));
    }
    attribute_of_[n.id] = *idx;
  }
}

Branch missing_value_branch(const DecisionTree& tree, NodeId split) {
  const SplitNode& s = tree.node(split).split();
  return tree.subtree_count(s.high) > tree.subtree_count(s.low) ? Branch::High : Branch::Low;
}

Prediction predict(const DecisionTree& tree, const TreeBinding& binding, const Case& c) {
  Prediction out;
  NodeId id = tree.root();
  while (!tree.node(id).is_leaf()) {
    const SplitNode& s = tree.node(id).split();
    const Value& v = c.values.at(binding.attribute_index(id));
    PathStep step{id, Branch::Low, !v.has_value()};
    step.branch = v ? branch_for(*v, s.threshold) : missing_value_branch(tree, id);
    out.path.push_back(step);
    id = s.child(step.branch);
  }
  out.leaf = id;
  out.class_name = tree.node(id).leaf().class_name;
  return out;
}

Prediction predict(const DecisionTree& tree, const Dataset& schema, const Case& c) {
  return predict(tree, TreeBinding(tree, schema), c);
}

DecisionTree refresh_leaf_stats(const DecisionTree& tree, const Dataset& dataset) {
  const TreeBinding binding(tree, dataset);
  const std::size_t n_classes = dataset.classes().size();
  std::vector<std::vector<std::size_t>> per_leaf(tree.size(), std::vector<std::size_t>(n_classes, 0));
  for (const Case& c : dataset.cases()) {
    const Prediction p = predict(tree, binding, c);
    ++per_leaf[p.leaf][*dataset.find_class(c.label)];
  }

  std::vector<TreeNode> nodes = tree.nodes();
  for (TreeNode& n : nodes) {
    if (!n.is_leaf()) continue;
    auto& leaf = std::get<LeafNode>(n.body);
    const auto& counts = per_leaf[n.id];
    std::size_t total = 0;
    for (std::size_t k : counts) total += k;
    const auto own = dataset.find_class(leaf.class_name);
    const std::size_t hits = own ? counts[*own] : 0;
    leaf.count = total;
    leaf.purity_pct = total == 0 ? 100.0 : 100.0 * static_cast<double>(hits) / static_cast<double>(total);
  }
  return DecisionTree(std::move(nodes), tree.root());
}

DecisionTree adjust_threshold(const DecisionTree& tree, NodeId node, double new_threshold) {
  const TreeNode& target = tree.node(node);
  if (target.is_leaf()) throw InvalidEditError(fmt::format("node {} is a leaf", node));
  if (!std::isfinite(new_threshold)) throw InvalidEditError("threshold must be finite");
  std::vector<TreeNode> nodes = tree.nodes();
  std::get<SplitNode>(nodes[node].body).threshold = new_threshold;
  return DecisionTree(std::move(nodes), tree.root());
}

}  // namespace spcdt
