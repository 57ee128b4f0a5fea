#include "spcdt/analysis.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include <fmt/core.h>

#include "spcdt/pairing.hpp"

namespace spcdt {

namespace {

// Cases reaching each node, in case order.
std::vector<std::vector<std::size_t>> reaching_cases(const DecisionTree& tree, const Dataset& dataset) {
  std::vector<std::vector<std::size_t>> out(tree.size());
  const TreeBinding binding(tree, dataset);
  for (const Case& c : dataset.cases()) {
    const Prediction p = predict(tree, binding, c);
    for (const PathStep& s : p.path) out[s.node].push_back(c.id);
    out[p.leaf].push_back(c.id);
  }
  return out;
}

std::string aligned(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) line += "  ";
      line += fmt::format("{:<{}}", row[c], width[c]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + '\n';
  }
  return out;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt::format("{:g}", *v) : "-"; }

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

OvergenReport overgeneralization(const DecisionTree& tree, const Dataset& dataset) {
  const auto reaching = reaching_cases(tree, dataset);
  OvergenReport report;
  for (NodeId leaf : tree.leaves()) {
    LeafOvergen entry;
    entry.leaf = leaf;
    entry.class_name = tree.node(leaf).leaf().class_name;
    entry.covered = reaching[leaf].size();

    const auto path = tree.path_to(leaf);
    std::vector<std::string> attrs;
    for (const PathCondition& c : path) {
      if (std::find(attrs.begin(), attrs.end(), c.attribute) == attrs.end()) attrs.push_back(c.attribute);
    }
    for (const std::string& a : attrs) {
      AttributeSlack s;
      s.attribute = a;
      s.rule = attribute_range(dataset, a);
      for (const PathCondition& c : path) {
        if (c.attribute != a) continue;
        if (c.branch == Branch::Low) {
          s.rule.hi = std::min(s.rule.hi, c.threshold);
        } else {
          s.rule.lo = std::max(s.rule.lo, c.threshold);
        }
      }
      if (s.rule.hi < s.rule.lo) s.rule.hi = s.rule.lo;

      const std::size_t index = dataset.attribute_index(a);
      for (std::size_t id : reaching[leaf]) {
        const Value& v = dataset.cases()[id].values[index];
        if (!v) continue;
        if (!s.data) {
          s.data = Interval{*v, *v};
        } else {
          s.data->lo = std::min(s.data->lo, *v);
          s.data->hi = std::max(s.data->hi, *v);
        }
      }
      if (s.data) {
        s.slack_low = std::max(0.0, s.data->lo - s.rule.lo);
        s.slack_high = std::max(0.0, s.rule.hi - s.data->hi);
      } else {
        s.slack_low = s.slack_high = s.rule.width();
      }
      entry.attributes.push_back(std::move(s));
    }
    report.leaves.push_back(std::move(entry));
  }
  return report;
}

MarginReport margins(const DecisionTree& tree, const Dataset& dataset, std::optional<double> epsilon) {
  const auto reaching = reaching_cases(tree, dataset);
  MarginReport report;
  for (NodeId id : tree.splits()) {
    const SplitNode& s = tree.node(id).split();
    NodeMargin m;
    m.node = id;
    m.attribute = s.attribute;
    m.threshold = s.threshold;
    m.epsilon = epsilon ? *epsilon : kDefaultMarginFraction * attribute_range(dataset, s.attribute).width();
    m.reaching = reaching[id].size();

    const std::size_t index = dataset.attribute_index(s.attribute);
    std::map<Branch, std::vector<std::size_t>> votes;
    for (Branch b : {Branch::Low, Branch::High}) votes[b].assign(dataset.classes().size(), 0);
    for (std::size_t cid : reaching[id]) {
      const Case& c = dataset.cases()[cid];
      const Value& v = c.values[index];
      if (!v) continue;
      const Branch side = branch_for(*v, s.threshold);
      ++votes[side][*dataset.find_class(c.label)];
      if (side == Branch::Low) {
        m.nearest_low = m.nearest_low ? std::max(*m.nearest_low, *v) : *v;
      } else {
        m.nearest_high = m.nearest_high ? std::min(*m.nearest_high, *v) : *v;
      }
    }
    auto majority = [&](Branch b) {
      const auto& counts = votes[b];
      return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    };
    if (m.epsilon > 0.0) {
      for (std::size_t cid : reaching[id]) {
        const Case& c = dataset.cases()[cid];
        const Value& v = c.values[index];
        if (!v) continue;
        const double d = std::abs(*v - s.threshold);
        if (d > m.epsilon) continue;
        const Branch side = branch_for(*v, s.threshold);
        m.borderline.push_back({c.id, *v, d, side, *dataset.find_class(c.label) != majority(side)});
      }
    }
    report.nodes.push_back(std::move(m));
  }
  return report;
}

SplitCompareReport split_compare(const DecisionTree& tree, const Dataset& train, const Dataset& validation) {
  SplitCompareReport report;
  report.train = evaluate(tree, train);
  report.validation = evaluate(tree, validation);

  const PairingPlan plan = derive_plot_units(tree, train);
  std::map<NodeId, std::pair<std::size_t, std::size_t>> drawn;
  for (const PlotUnit& p : plan.plots) {
    for (const Region& r : p.regions) {
      if (r.decided()) drawn[r.node] = {p.plot_id, r.index};
    }
  }

  const auto on_train = reaching_cases(tree, train);
  const auto on_validation = reaching_cases(tree, validation);
  for (NodeId leaf : tree.leaves()) {
    LeafCoverage c;
    c.leaf = leaf;
    c.class_name = tree.node(leaf).leaf().class_name;
    if (auto it = drawn.find(leaf); it != drawn.end()) {
      c.plot_id = it->second.first;
      c.region = it->second.second;
    }
    c.train_count = on_train[leaf].size();
    c.validation_count = on_validation[leaf].size();
    if (c.train_count > 0 && c.validation_count == 0) report.missing_in_validation.push_back(leaf);
    if (c.validation_count > 0 && c.train_count == 0) report.missing_in_train.push_back(leaf);
    report.coverage.push_back(std::move(c));
  }
  return report;
}

Json to_json(const OvergenReport& report) {
  Json leaves = Json::array();
  for (const LeafOvergen& l : report.leaves) {
    Json attrs = Json::array();
    for (const AttributeSlack& a : l.attributes) {
      attrs.push_back({{"attribute", a.attribute},
                       {"rule_interval", Json::array({a.rule.lo, a.rule.hi})},
                       {"data_interval", a.data ? Json::array({a.data->lo, a.data->hi}) : Json(nullptr)},
                       {"slack_low", a.slack_low},
                       {"slack_high", a.slack_high}});
    }
    leaves.push_back(
        {{"leaf_id", l.leaf}, {"class", l.class_name}, {"covered", l.covered}, {"attributes", std::move(attrs)}});
  }
  return Json{{"report", "overgen"}, {"leaves", std::move(leaves)}};
}

Json to_json(const MarginReport& report) {
  Json nodes = Json::array();
  for (const NodeMargin& m : report.nodes) {
    Json borderline = Json::array();
    for (const BorderlineCase& b : m.borderline) {
      borderline.push_back({{"case_id", b.case_id},
                            {"value", b.value},
                            {"distance", b.distance},
                            {"side", std::string(to_string(b.side))},
                            {"opposite_class", b.opposite_class}});
    }
    nodes.push_back({{"node_id", m.node},
                     {"attribute", m.attribute},
                     {"threshold", m.threshold},
                     {"epsilon", m.epsilon},
                     {"reaching", m.reaching},
                     {"nearest_low", opt_json(m.nearest_low)},
                     {"nearest_high", opt_json(m.nearest_high)},
                     {"borderline", std::move(borderline)}});
  }
  return Json{{"report", "margins"}, {"nodes", std::move(nodes)}};
}

Json to_json(const SplitCompareReport& report) {
  Json coverage = Json::array();
  for (const LeafCoverage& c : report.coverage) {
    coverage.push_back({{"leaf_id", c.leaf},
                        {"class", c.class_name},
                        {"plot_id", c.plot_id ? Json(*c.plot_id) : Json(nullptr)},
                        {"region", c.region ? Json(*c.region) : Json(nullptr)},
                        {"train_count", c.train_count},
                        {"validation_count", c.validation_count}});
  }
  return Json{{"report", "split-compare"},
              {"train", evaluation_to_json(report.train)},
              {"validation", evaluation_to_json(report.validation)},
              {"coverage", std::move(coverage)},
              {"missing_in_validation", report.missing_in_validation},
              {"missing_in_train", report.missing_in_train}};
}

std::string format_report(const OvergenReport& report) {
  std::vector<std::vector<std::string>> rows{
      {"Leaf", "Class", "Covered", "Attribute", "Rule interval", "Data interval", "Slack low", "Slack high"}};
  for (const LeafOvergen& l : report.leaves) {
    for (const AttributeSlack& a : l.attributes) {
      rows.push_back({std::to_string(l.leaf), l.class_name, std::to_string(l.covered), a.attribute,
                      fmt::format("[{:g}, {:g}]", a.rule.lo, a.rule.hi),
                      a.data ? fmt::format("[{:g}, {:g}]", a.data->lo, a.data->hi) : "empty",
                      fmt::format("{:.4f}", a.slack_low), fmt::format("{:.4f}", a.slack_high)});
    }
  }
  return "Overgeneralization\n" + aligned(rows);
}

std::string format_report(const MarginReport& report) {
  std::vector<std::vector<std::string>> rows{
      {"Node", "Attribute", "Threshold", "Nearest low", "Nearest high", "Epsilon", "Borderline", "Opposite"}};
  for (const NodeMargin& m : report.nodes) {
    const auto opposite = std::count_if(m.borderline.begin(), m.borderline.end(),
                                        [](const BorderlineCase& b) { return b.opposite_class; });
    rows.push_back({std::to_string(m.node), m.attribute, fmt::format("{:g}", m.threshold), fmt_opt(m.nearest_low),
                    fmt_opt(m.nearest_high), fmt::format("{:.4f}", m.epsilon), std::to_string(m.borderline.size()),
                    std::to_string(opposite)});
  }
  return "Margins\n" + aligned(rows);
}

std::string format_report(const SplitCompareReport& report) {
  std::string out = "Training data\n" + format_evaluation(report.train);
  out += "\nValidation data\n" + format_evaluation(report.validation);
  std::vector<std::vector<std::string>> rows{{"Leaf", "Class", "Plot", "Region", "Train", "Validation"}};
  for (const LeafCoverage& c : report.coverage) {
    rows.push_back({std::to_string(c.leaf), c.class_name, c.plot_id ? std::to_string(*c.plot_id) : "-",
                    c.region ? std::to_string(*c.region) : "-", std::to_string(c.train_count),
                    std::to_string(c.validation_count)});
  }
  out += "\nCoverage\n" + aligned(rows);
  auto list = [](const std::vector<NodeId>& ids) {
    std::string s;
    for (NodeId id : ids) s += (s.empty() ? "" : ", ") + std::to_string(id);
    return s.empty() ? std::string("none") : s;
  };
  out += "Leaves without validation cases: " + list(report.missing_in_validation) + "\n";
  out += "Leaves without training cases: " + list(report.missing_in_train) + "\n";
  return out;
}

}  // namespace spcdt
