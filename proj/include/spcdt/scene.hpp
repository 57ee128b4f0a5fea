#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "spcdt/dataset.hpp"
#include "spcdt/pairing.hpp"
#include "spcdt/tree.hpp"

namespace spcdt {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

/// Where a plot sits in scene units and how its axes are oriented. Flips act
/// on the data axes; `swapped` then puts the horizontal attribute on the
/// vertical screen axis.
struct PlotPlacement {
  std::size_t plot_id = 0;
  Point2 origin;
  Point2 size{1.0, 1.0};
  bool h_flipped = false;
  bool v_flipped = false;
  bool swapped = false;
  bool operator==(const PlotPlacement&) const = default;
};

enum class TraceMode { Terminate, Full };
enum class SummaryMode { None, Centers, MinMax };

struct RegionRef {
  std::size_t plot_id = 0;
  std::size_t region = 0;
  auto operator<=>(const RegionRef&) const = default;
};

struct SceneOptions {
  TraceMode trace_mode = TraceMode::Terminate;
  std::set<RegionRef> condensed_regions;
  double jitter = 0.0;
  bool context = false;
  SummaryMode summary = SummaryMode::None;
  std::optional<std::vector<std::size_t>> case_selection;  // nullopt: all cases
  std::set<NodeId> highlighted_nodes;
  double density_base = 0.25;
  bool operator==(const SceneOptions&) const = default;
};

struct SceneVertex {
  std::size_t plot_id = 0;
  std::optional<std::size_t> region;  // none on context plots
  Value h_value;                      // raw pair, untouched by view edits
  Value v_value;
  Point2 data;  // drawn data coordinates (missing values imputed)
  Point2 pos;   // scene position after placement, condensation and jitter
  bool imputed = false;
  bool context = false;
  std::optional<std::size_t> group;  // condensation group
  bool operator==(const SceneVertex&) const = default;
};

struct Polyline {
  std::size_t case_id = 0;
  std::string actual;
  std::string predicted;
  bool misclassified = false;
  std::size_t terminal_plot = 0;
  std::size_t terminal_region = 0;
  bool muted = false;  // drawn gray when a summary is shown
  std::vector<SceneVertex> vertices;
  bool operator==(const Polyline&) const = default;
};

struct AxisThreshold {
  NodeId node = 0;
  double value = 0.0;
  bool highlighted = false;
  bool operator==(const AxisThreshold&) const = default;
};

struct SceneAxis {
  std::string attribute;
  Interval extent;
  std::vector<AxisThreshold> thresholds;
  bool flipped = false;
  bool operator==(const SceneAxis&) const = default;
};

struct SceneRegion {
  Region region;
  std::size_t count = 0;     // density cases routed through the region
  double intensity = 1.0;    // fill intensity in [density_base, 1]
  bool condensed = false;
  Point2 pos;                // lower-left corner in scene units
  Point2 size;
  bool operator==(const SceneRegion&) const = default;
};

struct ScenePlot {
  std::size_t plot_id = 0;
  bool context = false;  // attributes the tree does not use
  SceneAxis h;
  SceneAxis v;
  PlotPlacement placement;
  std::vector<SceneRegion> regions;
  bool operator==(const ScenePlot&) const = default;
};

/// All vertices of one actual class inside one condensed region.
struct CondensedGroup {
  RegionRef region;
  std::string class_name;
  Point2 pos;  // centroid of the member vertices
  std::vector<std::size_t> case_ids;
  bool operator==(const CondensedGroup&) const = default;
};

/// A drawn edge. Edges leaving a condensed group are bundled into one edge
/// per (group, next plot) ending at the centroid of the members' next vertices.
struct SceneEdge {
  std::size_t from_plot = 0;
  std::size_t to_plot = 0;
  Point2 from;
  Point2 to;
  std::string class_name;  // predicted class (majority for bundles)
  std::optional<std::size_t> group;
  std::vector<std::size_t> case_ids;
  bool operator==(const SceneEdge&) const = default;
};

enum class SummaryKind { Center, Min, Max };

struct SummaryLine {
  std::size_t terminal_plot = 0;
  std::size_t terminal_region = 0;
  std::string class_name;
  SummaryKind kind = SummaryKind::Center;
  std::size_t members = 0;
  std::vector<SceneVertex> vertices;
  bool operator==(const SummaryLine&) const = default;
};

/// Everything a scene is computed from.
struct SceneInputs {
  std::shared_ptr<const DecisionTree> tree;
  std::shared_ptr<const PairingPlan> plan;
  std::shared_ptr<const Dataset> dataset;
  std::shared_ptr<const Dataset> density_data;  // null: use `dataset`
  std::vector<PlotPlacement> placements;
  SceneOptions options;
};

/// Render-ready model. A scene is a deterministic function of its inputs;
/// every edit below produces a new scene from edited inputs.
struct SceneGraph {
  SceneInputs inputs;
  std::vector<std::string> classes;
  std::vector<ScenePlot> plots;
  std::vector<Polyline> polylines;
  std::vector<CondensedGroup> groups;
  std::vector<SceneEdge> edges;
  std::vector<SummaryLine> summaries;
  EvaluationReport evaluation;
  std::vector<std::string> warnings;

  const SceneOptions& options() const { return inputs.options; }
  const ScenePlot& plot(std::size_t plot_id) const;
  bool operator==(const SceneGraph& other) const;
};

/// Staircase layout: plot k at (1.25 k, 0.25 k) with unit size.
std::vector<PlotPlacement> default_placement(const PairingPlan& plan);

inline constexpr double kPlotStepX = 1.25;
inline constexpr double kPlotStepY = 0.25;

Polyline route_case(const Case& c, const DecisionTree& tree, const PairingPlan& plan, const Dataset& schema,
                    const std::vector<PlotPlacement>& placements, const SceneOptions& options);

SceneGraph realize(SceneInputs inputs);

SceneGraph build_scene(const DecisionTree& tree, const PairingPlan& plan, const Dataset& dataset,
                       const std::vector<PlotPlacement>& placements, const SceneOptions& options = {});

/// Adds the selected regions to the condensed set.
SceneGraph condense(const SceneGraph& scene, const std::set<RegionRef>& selector);
/// Removes regions from the condensed set.
SceneGraph expand(const SceneGraph& scene, const std::set<RegionRef>& selector);

/// Fill intensity = base + (1 - base) log(1 + n) / log(1 + n_max), with n the
/// number of `dataset` cases routed through each region.
SceneGraph density_shading(const SceneGraph& scene, const Dataset& dataset);

struct Relocate {
  Point2 origin;
};
struct FlipH {};
struct FlipV {};
struct Swap {};
using PlacementEdit = std::variant<Relocate, FlipH, FlipV, Swap>;

/// View-only: raw values and the evaluation are unaffected. Overlapping
/// plots are accepted and listed in `warnings`.
SceneGraph apply_transforms(const SceneGraph& scene, std::size_t plot_id, const PlacementEdit& edit);

/// Spreads coincident vertices along the upper-left/lower-right diagonal,
/// in case-id order, by at most `magnitude` scene units.
SceneGraph jitter_overlaps(const SceneGraph& scene, double magnitude);

SceneGraph context_and_summary(const SceneGraph& scene, bool context, SummaryMode summary);

SceneGraph with_options(const SceneGraph& scene, SceneOptions options);

/// Attributes the tree does not use, paired in schema order (an odd one out
/// is paired with itself).
std::vector<std::pair<std::string, std::string>> context_pairs(const DecisionTree& tree, const Dataset& dataset);

std::string_view to_string(TraceMode mode);
std::string_view to_string(SummaryMode mode);
std::string_view to_string(SummaryKind kind);
TraceMode parse_trace_mode(std::string_view text);
SummaryMode parse_summary_mode(std::string_view text);

}  // namespace spcdt
