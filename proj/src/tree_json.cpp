#include <algorithm>
#include <optional>

#include "json.hpp"

#include <fmt/core.h>

#include "spcdt/error.hpp"
#include "spcdt/tree.hpp"

namespace spcdt {

namespace {

using ojson = nlohmann::ordered_json;

ojson node_to_json(const DecisionTree& tree, NodeId id) {
  const TreeNode& n = tree.node(id);
  ojson j;
  j["node_id"] = n.id;
  if (n.is_leaf()) {
    j["kind"] = "leaf";
    j["class"] = n.leaf().class_name;
    j["purity_pct"] = n.leaf().purity_pct;
    j["count"] = n.leaf().count;
  } else {
    j["kind"] = "split";
    j["attribute"] = n.split().attribute;
    j["threshold"] = n.split().threshold;
    j["low"] = node_to_json(tree, n.split().low);
    j["high"] = node_to_json(tree, n.split().high);
  }
  return j;
}

struct Reader {
  std::vector<std::optional<TreeNode>> by_id;
  std::size_t with_ids = 0;
  std::size_t without_ids = 0;
  std::size_t next_auto = 0;

  template <class T>
  static T field(const ojson& j, const char* key, const char* what) {
    if (!j.contains(key)) throw SchemaError(fmt::format("{} node lacks '{}'", what, key));
    try {
      return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw SchemaError(fmt::format("{} node field '{}' has the wrong type", what, key));
    }
  }

  NodeId read(const ojson& j) {
    if (!j.is_object()) throw SchemaError("tree node must be a JSON object");
    const std::string kind = field<std::string>(j, "kind", "tree");
    static const std::vector<std::string> split_keys{"node_id", "kind", "attribute", "threshold", "low", "high"};
    static const std::vector<std::string> leaf_keys{"node_id", "kind", "class", "purity_pct", "count"};
    const auto& allowed = kind == "split" ? split_keys : leaf_keys;
    if (kind != "split" && kind != "leaf") throw SchemaError(fmt::format("unknown node kind '{}'", kind));
    for (const auto& [key, _] : j.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        throw SchemaError(fmt::format("unexpected key '{}' in {} node", key, kind));
      }
    }

    NodeId id;
    if (j.contains("node_id")) {
      const auto& raw = j.at("node_id");
      if (!raw.is_number_unsigned()) throw SchemaError("node_id must be a non-negative integer");
      id = raw.get<NodeId>();
      ++with_ids;
    } else {
      id = next_auto++;
      ++without_ids;
    }
    if (with_ids && without_ids) throw SchemaError("either every node carries node_id or none does");

    TreeNode node{id, LeafNode{}};
    if (id >= by_id.size()) by_id.resize(id + 1);
    if (by_id[id]) throw SchemaError(fmt::format("duplicate node_id {}", id));
    by_id[id] = node;  // reserve before recursing

    if (kind == "leaf") {
      LeafNode leaf;
      leaf.class_name = field<std::string>(j, "class", "leaf");
      leaf.purity_pct = j.contains("purity_pct") ? field<double>(j, "purity_pct", "leaf") : 100.0;
      if (j.contains("count")) {
        if (!j.at("count").is_number_unsigned()) throw SchemaError("leaf count must be a non-negative integer");
        leaf.count = j.at("count").get<std::size_t>();
      }
      node.body = leaf;
    } else {
      SplitNode split;
      split.attribute = field<std::string>(j, "attribute", "split");
      if (!j.contains("threshold") || !j.at("threshold").is_number()) {
        throw SchemaError("split node needs a numeric 'threshold'");
      }
      split.threshold = j.at("threshold").get<double>();
      if (!j.contains("low") || !j.contains("high")) throw SchemaError("split node needs 'low' and 'high'");
      split.low = read(j.at("low"));
      split.high = read(j.at("high"));
      node.body = split;
    }
    by_id[id] = node;
    return id;
  }
};

}  // namespace

std::string tree_to_json(const DecisionTree& tree) { return node_to_json(tree, tree.root()).dump(2) + "\n"; }

DecisionTree tree_from_json(std::string_view json) {
  ojson doc;
  try {
    doc = ojson::parse(json);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(fmt::format("invalid JSON: {}", e.what()));
  }
  Reader reader;
  const NodeId root = reader.read(doc);
  std::vector<TreeNode> nodes;
  nodes.reserve(reader.by_id.size());
  for (std::size_t i = 0; i < reader.by_id.size(); ++i) {
    if (!reader.by_id[i]) throw SchemaError(fmt::format("node ids are not dense: {} is missing", i));
    nodes.push_back(*reader.by_id[i]);
  }
  return DecisionTree(std::move(nodes), root);
}

}  // namespace spcdt
