#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spcdt/dataset.hpp"
#include "spcdt/tree.hpp"

namespace spcdt {

/// [lo, hi), or [lo, hi] when `closed_high` (the upper bound is the plot edge).
struct AxisInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool closed_high = false;

  bool contains(double x) const { return lo <= x && (x < hi || (closed_high && x == hi)); }
  double midpoint() const { return lo + (hi - lo) / 2.0; }
  bool operator==(const AxisInterval&) const = default;
};

enum class RegionKind { Decided, Undecided };

/// One rectangle of a plot. Decided regions stand for a leaf; undecided
/// (gray) regions stand for a subtree continued in `dest_plot`.
struct Region {
  std::size_t index = 0;
  AxisInterval h;
  AxisInterval v;
  RegionKind kind = RegionKind::Decided;
  NodeId node = 0;  // the leaf, or the split that roots dest_plot
  std::string class_name;
  std::size_t dest_plot = 0;
  std::size_t shade_key = 0;
  /// In-plot conditions that carve this rectangle, root first.
  std::vector<PathCondition> rule;

  bool decided() const { return kind == RegionKind::Decided; }
  bool contains(double x, double y) const { return h.contains(x) && v.contains(y); }
  bool operator==(const Region&) const = default;
};

/// One pair of shifted Cartesian coordinates. When `h_attr == v_attr` the
/// plot is degenerate and every constraint lies on the horizontal axis.
struct PlotUnit {
  std::size_t plot_id = 0;
  NodeId root_node = 0;
  std::string h_attr;
  std::string v_attr;
  std::size_t h_index = 0;  // dataset attribute indices
  std::size_t v_index = 0;
  Interval h_extent;
  Interval v_extent;
  std::vector<double> h_thresholds;
  std::vector<double> v_thresholds;
  std::vector<NodeId> absorbed;  // split nodes drawn in this plot, pre-order
  std::vector<Region> regions;
  std::optional<std::size_t> parent_plot;

  bool degenerate() const { return h_attr == v_attr; }
  bool operator==(const PlotUnit&) const = default;
};

struct PairingPlan {
  std::vector<PlotUnit> plots;
  std::size_t root_plot = 0;
  std::map<NodeId, std::size_t> routing;  // split node -> plot that draws it
  std::string diagnostic;                 // set when no plot could be derived

  bool empty() const { return plots.empty(); }
  const PlotUnit& plot(std::size_t plot_id) const;
  bool operator==(const PairingPlan&) const = default;
};

/// Groups the tree's splits into plots. Each plot is rooted at a split whose
/// attribute becomes the horizontal axis. The vertical axis is the first
/// other attribute met below the root's same-attribute chain (the one whose
/// node the most dataset cases reach when branches disagree). The plot draws
/// the horizontal chain, then each vertical-attribute node and its own chain;
/// any other split starts a new plot reached through a gray region.
PairingPlan derive_plot_units(const DecisionTree& tree, const Dataset& dataset);

/// The region of `plot_id` containing (x, y). Throws NotFoundError for an
/// unknown plot and InputError when the point lies outside the plot.
const Region& region_of(const PairingPlan& plan, std::size_t plot_id, double x, double y);

struct RegionHit {
  std::size_t plot_id = 0;
  std::size_t region = 0;
  Value h_value;  // raw values; nullopt when missing
  Value v_value;
  double x = 0.0;  // position used for drawing (imputed when missing)
  double y = 0.0;

  bool imputed() const { return !h_value || !v_value; }
  bool operator==(const RegionHit&) const = default;
};

/// Locates a case in one plot by walking the plot's splits. A missing
/// coordinate follows the tree's missing-value rule and is drawn at the
/// midpoint of the reached region on that axis.
RegionHit locate_in_plot(const PairingPlan& plan, const DecisionTree& tree, std::size_t plot_id,
                         const Case& c);

/// Plots visited from the root plot through gray regions until a decided one.
std::vector<RegionHit> route_regions(const PairingPlan& plan, const DecisionTree& tree, const Case& c);

}  // namespace spcdt
