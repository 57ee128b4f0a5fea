#include "spcdt/pairing.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include <fmt/core.h>

#include "spcdt/error.hpp"

namespace spcdt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct OpenBox {
  double h_lo = -kInf, h_hi = kInf;
  double v_lo = -kInf, v_hi = kInf;
};

AxisInterval clamp_to(double lo, double hi, const Interval& extent) {
  AxisInterval out;
  out.closed_high = hi == kInf;
  out.lo = std::max(lo, extent.lo);
  out.hi = std::min(hi, extent.hi);
  if (out.hi < out.lo) out.hi = out.lo;
  return out;
}

Interval hull(Interval range, const std::vector<double>& thresholds) {
  for (double t : thresholds) {
    range.lo = std::min(range.lo, t);
    range.hi = std::max(range.hi, t);
  }
  return range;
}

void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

class PlanBuilder {
 public:
  PlanBuilder(const DecisionTree& tree, const Dataset& dataset)
      : tree_(tree), dataset_(dataset), binding_(tree, dataset), coverage_(tree.size(), 0) {
    for (const Case& c : dataset.cases()) {
      const Prediction p = predict(tree, binding_, c);
      for (const PathStep& step : p.path) ++coverage_[step.node];
      ++coverage_[p.leaf];
    }
  }

  PairingPlan build() {
    PairingPlan plan;
    if (tree_.is_leaf(tree_.root())) {
      plan.diagnostic = "the tree is a single leaf; there are no splits to pair";
      return plan;
    }

    struct Pending {
      NodeId root;
      std::optional<std::size_t> parent;
    };
    std::deque<Pending> queue{{tree_.root(), std::nullopt}};
    std::size_t next_shade = 0;
    while (!queue.empty()) {
      const Pending job = queue.front();
      queue.pop_front();

      PlotUnit plot;
      plot.plot_id = plan.plots.size();
      plot.root_node = job.root;
      plot.parent_plot = job.parent;
      plot.h_attr = attribute(job.root);
      plot.v_attr = choose_vertical(job.root, plot.h_attr);
      plot.h_index = dataset_.attribute_index(plot.h_attr);
      plot.v_index = dataset_.attribute_index(plot.v_attr);

      std::vector<Region> regions;
      absorb(plot, job.root, /*vertical_phase=*/false, OpenBox{}, {}, regions);

      sort_unique(plot.h_thresholds);
      sort_unique(plot.v_thresholds);
      plot.h_extent = hull(attribute_range(dataset_, plot.h_attr), plot.h_thresholds);
      plot.v_extent = plot.degenerate() ? plot.h_extent
                                        : hull(attribute_range(dataset_, plot.v_attr), plot.v_thresholds);

      for (Region& r : regions) {
        r.index = plot.regions.size();
        r.h = clamp_to(r.h.lo, r.h.hi, plot.h_extent);
        r.v = clamp_to(r.v.lo, r.v.hi, plot.v_extent);
        if (r.kind == RegionKind::Undecided) {
          r.shade_key = next_shade++;
          r.dest_plot = plan.plots.size() + 1 + queue.size();
          queue.push_back({r.node, plot.plot_id});
        }
        plot.regions.push_back(std::move(r));
      }
      for (NodeId id : plot.absorbed) plan.routing[id] = plot.plot_id;
      plan.plots.push_back(std::move(plot));
    }
    return plan;
  }

 private:
  const std::string& attribute(NodeId id) const { return tree_.node(id).split().attribute; }

  // Candidates are the first other-attribute splits below the root's chain
  // of same-attribute splits, in pre-order.
  void collect_candidates(NodeId id, const std::string& h, std::vector<NodeId>& out) const {
    if (tree_.is_leaf(id)) return;
    const SplitNode& s = tree_.node(id).split();
    if (s.attribute != h) {
      out.push_back(id);
      return;
    }
    collect_candidates(s.low, h, out);
    collect_candidates(s.high, h, out);
  }

  std::string choose_vertical(NodeId root, const std::string& h) const {
    std::vector<NodeId> candidates;
    collect_candidates(root, h, candidates);
    if (candidates.empty()) return h;
    NodeId best = candidates.front();
    for (NodeId c : candidates) {
      if (coverage_[c] > coverage_[best]) best = c;
    }
    return attribute(best);
  }

  void absorb(PlotUnit& plot, NodeId id, bool vertical_phase, OpenBox box, std::vector<PathCondition> rule,
              std::vector<Region>& regions) {
    auto emit = [&](RegionKind kind) {
      Region r;
      r.kind = kind;
      r.node = id;
      r.h = {box.h_lo, box.h_hi, false};
      r.v = {box.v_lo, box.v_hi, false};
      r.rule = rule;
      if (kind == RegionKind::Decided) r.class_name = tree_.node(id).leaf().class_name;
      regions.push_back(std::move(r));
    };

    if (tree_.is_leaf(id)) {
      emit(RegionKind::Decided);
      return;
    }
    const SplitNode& s = tree_.node(id).split();
    const bool on_h = s.attribute == plot.h_attr && !vertical_phase;
    const bool on_v = s.attribute == plot.v_attr && !plot.degenerate();
    if (!on_h && !on_v) {
      emit(RegionKind::Undecided);
      return;
    }

    plot.absorbed.push_back(id);
    (on_h ? plot.h_thresholds : plot.v_thresholds).push_back(s.threshold);
    for (Branch b : {Branch::Low, Branch::High}) {
      OpenBox child = box;
      double& lo = on_h ? child.h_lo : child.v_lo;
      double& hi = on_h ? child.h_hi : child.v_hi;
      if (b == Branch::Low) {
        hi = std::min(hi, s.threshold);
      } else {
        lo = std::max(lo, s.threshold);
      }
      std::vector<PathCondition> child_rule = rule;
      child_rule.push_back({id, s.attribute, s.threshold, b});
      absorb(plot, s.child(b), vertical_phase || on_v, child, std::move(child_rule), regions);
    }
  }

  const DecisionTree& tree_;
  const Dataset& dataset_;
  TreeBinding binding_;
  std::vector<std::size_t> coverage_;
};

}  // namespace

const PlotUnit& PairingPlan::plot(std::size_t plot_id) const {
  if (plot_id >= plots.size()) throw NotFoundError(fmt::format("unknown plot {}", plot_id));
  return plots[plot_id];
}

PairingPlan derive_plot_units(const DecisionTree& tree, const Dataset& dataset) {
  return PlanBuilder(tree, dataset).build();
}

const Region& region_of(const PairingPlan& plan, std::size_t plot_id, double x, double y) {
  const PlotUnit& plot = plan.plot(plot_id);
  if (!plot.h_extent.contains(x) || !plot.v_extent.contains(y)) {
    throw InputError(fmt::format("point ({}, {}) lies outside plot {}", x, y, plot_id));
  }
  for (const Region& r : plot.regions) {
    if (r.contains(x, y)) return r;
  }
  throw Error(fmt::format("plot {} has no region containing ({}, {})", plot_id, x, y));
}

RegionHit locate_in_plot(const PairingPlan& plan, const DecisionTree& tree, std::size_t plot_id,
                         const Case& c) {
  const PlotUnit& plot = plan.plot(plot_id);
  RegionHit hit;
  hit.plot_id = plot_id;
  hit.h_value = c.values.at(plot.h_index);
  hit.v_value = c.values.at(plot.v_index);

  NodeId id = plot.root_node;
  for (;;) {
    auto routed = plan.routing.find(id);
    if (tree.is_leaf(id) || routed == plan.routing.end() || routed->second != plot_id) break;
    const SplitNode& s = tree.node(id).split();
    const bool on_h = s.attribute == plot.h_attr;
    const Value& v = on_h ? hit.h_value : hit.v_value;
    id = s.child(v ? branch_for(*v, s.threshold) : missing_value_branch(tree, id));
  }
  auto region = std::find_if(plot.regions.begin(), plot.regions.end(),
                             [&](const Region& r) { return r.node == id; });
  if (region == plot.regions.end()) throw Error(fmt::format("node {} has no region in plot {}", id, plot_id));
  hit.region = region->index;
  hit.x = hit.h_value ? *hit.h_value : region->h.midpoint();
  hit.y = hit.v_value ? *hit.v_value : region->v.midpoint();
  if (plot.degenerate() && !hit.v_value) hit.y = hit.x;
  return hit;
}

std::vector<RegionHit> route_regions(const PairingPlan& plan, const DecisionTree& tree, const Case& c) {
  std::vector<RegionHit> hits;
  if (plan.empty()) return hits;
  std::size_t plot_id = plan.root_plot;
  for (;;) {
    hits.push_back(locate_in_plot(plan, tree, plot_id, c));
    const Region& r = plan.plots[plot_id].regions[hits.back().region];
    if (r.decided()) break;
    plot_id = r.dest_plot;
  }
  return hits;
}

}  // namespace spcdt
