#include "spcdt/scene.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include <fmt/core.h>

#include "spcdt/error.hpp"

namespace spcdt {

namespace {

// Geometry of one drawable plot, tree-derived or context.
struct PlotFrame {
  std::size_t plot_id = 0;
  bool context = false;
  std::string h_attr, v_attr;
  std::size_t h_index = 0, v_index = 0;
  Interval h_extent, v_extent;
};

std::vector<PlotFrame> plot_frames(const PairingPlan& plan, const DecisionTree& tree, const Dataset& schema,
                                   bool context) {
  std::vector<PlotFrame> frames;
  for (const PlotUnit& p : plan.plots) {
    frames.push_back({p.plot_id, false, p.h_attr, p.v_attr, p.h_index, p.v_index, p.h_extent, p.v_extent});
  }
  if (context) {
    for (const auto& [h, v] : context_pairs(tree, schema)) {
      frames.push_back({frames.size(), true, h, v, schema.attribute_index(h), schema.attribute_index(v),
                        attribute_range(schema, h), attribute_range(schema, v)});
    }
  }
  return frames;
}

PlotPlacement default_for(const PlotFrame& f, std::size_t plan_size) {
  PlotPlacement p;
  p.plot_id = f.plot_id;
  if (f.context) {
    // Context plots stand to the left of the root plot.
    const double k = static_cast<double>(f.plot_id - plan_size + 1);
    p.origin = {-kPlotStepX * k, 0.0};
  } else {
    const double k = static_cast<double>(f.plot_id);
    p.origin = {kPlotStepX * k, kPlotStepY * k};
  }
  return p;
}

std::vector<PlotPlacement> resolve_placements(const std::vector<PlotFrame>& frames, std::size_t plan_size,
                                              const std::vector<PlotPlacement>& given) {
  std::vector<PlotPlacement> out;
  for (const PlotFrame& f : frames) {
    auto it = std::find_if(given.begin(), given.end(), [&](const PlotPlacement& p) { return p.plot_id == f.plot_id; });
    PlotPlacement p = it != given.end() ? *it : default_for(f, plan_size);
    if (!(p.size.x > 0.0 && p.size.y > 0.0)) {
      throw InvalidEditError(fmt::format("plot {} must have a positive size", f.plot_id));
    }
    out.push_back(p);
  }
  return out;
}

Point2 to_local(const PlotPlacement& p, const Interval& hx, const Interval& vx, Point2 data) {
  double u = (data.x - hx.lo) / hx.width();
  double v = (data.y - vx.lo) / vx.width();
  if (p.h_flipped) u = 1.0 - u;
  if (p.v_flipped) v = 1.0 - v;
  if (p.swapped) std::swap(u, v);
  return {u, v};
}

Point2 to_scene(const PlotPlacement& p, const PlotFrame& f, Point2 data) {
  const Point2 local = to_local(p, f.h_extent, f.v_extent, data);
  return {p.origin.x + local.x * p.size.x, p.origin.y + local.y * p.size.y};
}

SceneVertex make_vertex(const PlotFrame& frame, const PlotPlacement& placement, const Value& h, const Value& v,
                        Point2 data, std::optional<std::size_t> region) {
  SceneVertex vert;
  vert.plot_id = frame.plot_id;
  vert.region = region;
  vert.h_value = h;
  vert.v_value = v;
  vert.data = data;
  vert.pos = to_scene(placement, frame, data);
  vert.imputed = !h || !v;
  vert.context = frame.context;
  return vert;
}

Polyline route_with_frames(const Case& c, const DecisionTree& tree, const PairingPlan& plan,
                           const TreeBinding& binding, const std::vector<PlotFrame>& frames,
                           const std::vector<PlotPlacement>& placements, TraceMode mode) {
  Polyline line;
  line.case_id = c.id;
  line.actual = c.label;
  line.predicted = predict(tree, binding, c).class_name;
  line.misclassified = line.actual != line.predicted;

  for (const PlotFrame& f : frames) {
    if (!f.context) continue;
    const Value& h = c.values[f.h_index];
    const Value& v = c.values[f.v_index];
    Point2 data{h ? *h : f.h_extent.lo + f.h_extent.width() / 2.0, v ? *v : f.v_extent.lo + f.v_extent.width() / 2.0};
    line.vertices.push_back(make_vertex(f, placements[f.plot_id], h, v, data, std::nullopt));
  }
  if (plan.empty()) return line;

  const std::vector<RegionHit> route = route_regions(plan, tree, c);
  line.terminal_plot = route.back().plot_id;
  line.terminal_region = route.back().region;

  std::vector<RegionHit> hits;
  if (mode == TraceMode::Full) {
    for (const PlotUnit& p : plan.plots) hits.push_back(locate_in_plot(plan, tree, p.plot_id, c));
  } else {
    hits = route;
  }
  for (const RegionHit& hit : hits) {
    line.vertices.push_back(make_vertex(frames[hit.plot_id], placements[hit.plot_id], hit.h_value, hit.v_value,
                                        {hit.x, hit.y}, hit.region));
  }
  return line;
}

Point2 centroid(const std::vector<Point2>& pts) {
  Point2 sum;
  for (const Point2& p : pts) {
    sum.x += p.x;
    sum.y += p.y;
  }
  const double n = static_cast<double>(pts.size());
  return {sum.x / n, sum.y / n};
}

bool overlaps(const PlotPlacement& a, const PlotPlacement& b) {
  const double w = std::min(a.origin.x + a.size.x, b.origin.x + b.size.x) - std::max(a.origin.x, b.origin.x);
  const double h = std::min(a.origin.y + a.size.y, b.origin.y + b.size.y) - std::max(a.origin.y, b.origin.y);
  return w > 0.0 && h > 0.0;
}

std::size_t class_rank(const std::vector<std::string>& classes, const std::string& name) {
  return static_cast<std::size_t>(std::find(classes.begin(), classes.end(), name) - classes.begin());
}

void build_regions(SceneGraph& scene, const std::vector<PlotFrame>& frames,
                   const std::vector<PlotPlacement>& placements) {
  const PairingPlan& plan = *scene.inputs.plan;
  const Dataset& density = scene.inputs.density_data ? *scene.inputs.density_data : *scene.inputs.dataset;
  const SceneOptions& opt = scene.inputs.options;

  std::vector<std::vector<std::size_t>> counts;
  for (const PlotUnit& p : plan.plots) counts.emplace_back(p.regions.size(), 0);
  for (const Case& c : density.cases()) {
    for (const RegionHit& hit : route_regions(plan, *scene.inputs.tree, c)) ++counts[hit.plot_id][hit.region];
  }
  // Normalized over class-colored regions; gray regions clamp at full intensity.
  std::size_t n_max = 0;
  for (const PlotUnit& p : plan.plots) {
    for (const Region& r : p.regions) {
      if (r.decided()) n_max = std::max(n_max, counts[p.plot_id][r.index]);
    }
  }

  for (const PlotFrame& f : frames) {
    ScenePlot sp;
    sp.plot_id = f.plot_id;
    sp.context = f.context;
    sp.placement = placements[f.plot_id];
    sp.h = {f.h_attr, f.h_extent, {}, sp.placement.h_flipped};
    sp.v = {f.v_attr, f.v_extent, {}, sp.placement.v_flipped};
    if (!f.context) {
      const PlotUnit& unit = plan.plots[f.plot_id];
      for (NodeId id : unit.absorbed) {
        const SplitNode& s = scene.inputs.tree->node(id).split();
        const bool on_h = s.attribute == unit.h_attr && std::find(unit.h_thresholds.begin(), unit.h_thresholds.end(),
                                                                   s.threshold) != unit.h_thresholds.end();
        SceneAxis& axis = on_h || unit.degenerate() ? sp.h : sp.v;
        axis.thresholds.push_back({id, s.threshold, opt.highlighted_nodes.count(id) > 0});
      }
      for (SceneAxis* axis : {&sp.h, &sp.v}) {
        std::stable_sort(axis->thresholds.begin(), axis->thresholds.end(),
                         [](const AxisThreshold& a, const AxisThreshold& b) { return a.value < b.value; });
      }
      for (const Region& r : unit.regions) {
        SceneRegion sr;
        sr.region = r;
        sr.count = counts[f.plot_id][r.index];
        sr.intensity = n_max == 0 ? opt.density_base
                                  : std::min(1.0, opt.density_base + (1.0 - opt.density_base) *
                                                                         std::log1p(static_cast<double>(sr.count)) /
                                                                         std::log1p(static_cast<double>(n_max)));
        sr.condensed = opt.condensed_regions.count({f.plot_id, r.index}) > 0;
        const Point2 a = to_scene(sp.placement, f, {r.h.lo, r.v.lo});
        const Point2 b = to_scene(sp.placement, f, {r.h.hi, r.v.hi});
        sr.pos = {std::min(a.x, b.x), std::min(a.y, b.y)};
        sr.size = {std::abs(b.x - a.x), std::abs(b.y - a.y)};
        sp.regions.push_back(sr);
      }
    }
    scene.plots.push_back(std::move(sp));
  }
}

void build_groups(SceneGraph& scene) {
  const SceneOptions& opt = scene.inputs.options;
  const PairingPlan& plan = *scene.inputs.plan;
  for (const RegionRef& ref : opt.condensed_regions) {
    if (ref.plot_id >= plan.plots.size() || ref.region >= plan.plots[ref.plot_id].regions.size()) {
      throw NotFoundError(fmt::format("no region {} in plot {}", ref.region, ref.plot_id));
    }
  }

  std::map<std::tuple<RegionRef, std::size_t>, std::vector<std::pair<std::size_t, std::size_t>>> members;
  for (std::size_t li = 0; li < scene.polylines.size(); ++li) {
    const Polyline& line = scene.polylines[li];
    for (std::size_t vi = 0; vi < line.vertices.size(); ++vi) {
      const SceneVertex& v = line.vertices[vi];
      if (v.context || !v.region) continue;
      const RegionRef ref{v.plot_id, *v.region};
      if (!opt.condensed_regions.count(ref)) continue;
      members[{ref, class_rank(scene.classes, line.actual)}].emplace_back(li, vi);
    }
  }
  for (const auto& [key, list] : members) {
    CondensedGroup g;
    g.region = std::get<0>(key);
    g.class_name = scene.classes[std::get<1>(key)];
    std::vector<Point2> pts;
    for (const auto& [li, vi] : list) {
      pts.push_back(scene.polylines[li].vertices[vi].pos);
      g.case_ids.push_back(scene.polylines[li].case_id);
    }
    g.pos = centroid(pts);
    const std::size_t gid = scene.groups.size();
    for (const auto& [li, vi] : list) {
      scene.polylines[li].vertices[vi].pos = g.pos;
      scene.polylines[li].vertices[vi].group = gid;
    }
    scene.groups.push_back(std::move(g));
  }
}

void apply_jitter(SceneGraph& scene) {
  const double magnitude = scene.inputs.options.jitter;
  if (magnitude <= 0.0) return;
  std::map<std::tuple<std::size_t, double, double>, std::vector<std::pair<std::size_t, std::size_t>>> coincident;
  for (std::size_t li = 0; li < scene.polylines.size(); ++li) {
    for (std::size_t vi = 0; vi < scene.polylines[li].vertices.size(); ++vi) {
      const SceneVertex& v = scene.polylines[li].vertices[vi];
      if (v.group) continue;
      coincident[{v.plot_id, v.pos.x, v.pos.y}].emplace_back(li, vi);
    }
  }
  const double diag = 1.0 / std::sqrt(2.0);
  for (auto& [key, list] : coincident) {
    if (list.size() < 2) continue;
    std::sort(list.begin(), list.end(), [&](const auto& a, const auto& b) {
      return scene.polylines[a.first].case_id < scene.polylines[b.first].case_id;
    });
    const double k = static_cast<double>(list.size() - 1);
    for (std::size_t i = 0; i < list.size(); ++i) {
      const double t = magnitude * (2.0 * static_cast<double>(i) / k - 1.0);
      Point2& p = scene.polylines[list[i].first].vertices[list[i].second].pos;
      p.x += t * diag;
      p.y -= t * diag;
    }
  }
}

void build_summaries(SceneGraph& scene, const std::vector<PlotFrame>& frames,
                     const std::vector<PlotPlacement>& placements) {
  const SummaryMode mode = scene.inputs.options.summary;
  if (mode == SummaryMode::None) return;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::vector<std::size_t>> groups;
  for (std::size_t li = 0; li < scene.polylines.size(); ++li) {
    Polyline& line = scene.polylines[li];
    line.muted = true;
    groups[{line.terminal_plot, line.terminal_region, class_rank(scene.classes, line.actual)}].push_back(li);
  }
  for (const auto& [key, list] : groups) {
    const Polyline& first = scene.polylines[list.front()];
    std::vector<SummaryKind> kinds =
        mode == SummaryMode::Centers ? std::vector{SummaryKind::Center} : std::vector{SummaryKind::Min, SummaryKind::Max};
    for (SummaryKind kind : kinds) {
      SummaryLine s;
      s.terminal_plot = std::get<0>(key);
      s.terminal_region = std::get<1>(key);
      s.class_name = scene.classes[std::get<2>(key)];
      s.kind = kind;
      s.members = list.size();
      for (std::size_t vi = 0; vi < first.vertices.size(); ++vi) {
        std::vector<Point2> pts;
        for (std::size_t li : list) pts.push_back(scene.polylines[li].vertices[vi].data);
        Point2 data;
        if (kind == SummaryKind::Center) {
          data = centroid(pts);
        } else {
          data = pts.front();
          for (const Point2& p : pts) {
            data.x = kind == SummaryKind::Min ? std::min(data.x, p.x) : std::max(data.x, p.x);
            data.y = kind == SummaryKind::Min ? std::min(data.y, p.y) : std::max(data.y, p.y);
          }
        }
        const SceneVertex& ref = first.vertices[vi];
        SceneVertex v = make_vertex(frames[ref.plot_id], placements[ref.plot_id], data.x, data.y, data, ref.region);
        if (list.size() == 1) v = ref;
        s.vertices.push_back(v);
      }
      scene.summaries.push_back(std::move(s));
    }
  }
}

void build_edges(SceneGraph& scene) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> bundle_of;  // (group, to_plot) -> edge
  std::vector<std::vector<Point2>> bundle_targets;
  std::vector<std::map<std::size_t, std::size_t>> bundle_votes;
  for (const Polyline& line : scene.polylines) {
    for (std::size_t i = 0; i + 1 < line.vertices.size(); ++i) {
      const SceneVertex& a = line.vertices[i];
      const SceneVertex& b = line.vertices[i + 1];
      if (!a.group) {
        scene.edges.push_back({a.plot_id, b.plot_id, a.pos, b.pos, line.predicted, std::nullopt, {line.case_id}});
        continue;
      }
      auto [it, fresh] = bundle_of.try_emplace({*a.group, b.plot_id}, scene.edges.size());
      if (fresh) {
        scene.edges.push_back({a.plot_id, b.plot_id, a.pos, b.pos, line.predicted, a.group, {}});
        bundle_targets.emplace_back();
        bundle_votes.emplace_back();
      }
      const std::size_t slot = static_cast<std::size_t>(
          std::count_if(scene.edges.begin(), scene.edges.begin() + static_cast<std::ptrdiff_t>(it->second),
                        [](const SceneEdge& e) { return e.group.has_value(); }));
      scene.edges[it->second].case_ids.push_back(line.case_id);
      bundle_targets[slot].push_back(b.pos);
      ++bundle_votes[slot][class_rank(scene.classes, line.predicted)];
    }
  }
  std::size_t slot = 0;
  for (SceneEdge& e : scene.edges) {
    if (!e.group) continue;
    e.to = centroid(bundle_targets[slot]);
    std::size_t best = 0, best_votes = 0;
    for (const auto& [rank, votes] : bundle_votes[slot]) {
      if (votes > best_votes) {
        best = rank;
        best_votes = votes;
      }
    }
    e.class_name = scene.classes[best];
    ++slot;
  }
}

}  // namespace

std::string_view to_string(TraceMode mode) { return mode == TraceMode::Full ? "full" : "terminate"; }

std::string_view to_string(SummaryMode mode) {
  switch (mode) {
    case SummaryMode::Centers: return "centers";
    case SummaryMode::MinMax: return "minmax";
    default: return "none";
  }
}

std::string_view to_string(SummaryKind kind) {
  switch (kind) {
    case SummaryKind::Min: return "min";
    case SummaryKind::Max: return "max";
    default: return "center";
  }
}

TraceMode parse_trace_mode(std::string_view text) {
  if (text == "terminate") return TraceMode::Terminate;
  if (text == "full") return TraceMode::Full;
  throw InputError(fmt::format("unknown trace mode '{}' (terminate|full)", text));
}

SummaryMode parse_summary_mode(std::string_view text) {
  if (text == "none") return SummaryMode::None;
  if (text == "centers") return SummaryMode::Centers;
  if (text == "minmax") return SummaryMode::MinMax;
  throw InputError(fmt::format("unknown summary mode '{}' (none|centers|minmax)", text));
}

const ScenePlot& SceneGraph::plot(std::size_t plot_id) const {
  if (plot_id >= plots.size()) throw NotFoundError(fmt::format("unknown plot {}", plot_id));
  return plots[plot_id];
}

bool SceneGraph::operator==(const SceneGraph& o) const {
  auto same = [](const auto& a, const auto& b) { return a == b || (a && b && *a == *b); };
  return same(inputs.tree, o.inputs.tree) && same(inputs.plan, o.inputs.plan) &&
         same(inputs.dataset, o.inputs.dataset) && same(inputs.density_data, o.inputs.density_data) &&
         inputs.placements == o.inputs.placements && inputs.options == o.inputs.options && classes == o.classes &&
         plots == o.plots && polylines == o.polylines && groups == o.groups && edges == o.edges &&
         summaries == o.summaries && evaluation == o.evaluation && warnings == o.warnings;
}

std::vector<PlotPlacement> default_placement(const PairingPlan& plan) {
  std::vector<PlotPlacement> out;
  for (const PlotUnit& p : plan.plots) {
    PlotPlacement placement;
    placement.plot_id = p.plot_id;
    const double k = static_cast<double>(p.plot_id);
    placement.origin = {kPlotStepX * k, kPlotStepY * k};
    out.push_back(placement);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> context_pairs(const DecisionTree& tree, const Dataset& dataset) {
  const auto used = tree.attributes_used();
  std::vector<std::string> unused;
  for (const AttributeMeta& a : dataset.attributes()) {
    if (std::find(used.begin(), used.end(), a.name) == used.end()) unused.push_back(a.name);
  }
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t i = 0; i < unused.size(); i += 2) {
    pairs.emplace_back(unused[i], i + 1 < unused.size() ? unused[i + 1] : unused[i]);
  }
  return pairs;
}

Polyline route_case(const Case& c, const DecisionTree& tree, const PairingPlan& plan, const Dataset& schema,
                    const std::vector<PlotPlacement>& placements, const SceneOptions& options) {
  const auto frames = plot_frames(plan, tree, schema, options.context);
  const auto resolved = resolve_placements(frames, plan.plots.size(), placements);
  return route_with_frames(c, tree, plan, TreeBinding(tree, schema), frames, resolved, options.trace_mode);
}

SceneGraph realize(SceneInputs inputs) {
  if (!inputs.tree || !inputs.plan || !inputs.dataset) throw Error("scene inputs are incomplete");
  SceneGraph scene;
  scene.inputs = std::move(inputs);
  const DecisionTree& tree = *scene.inputs.tree;
  const PairingPlan& plan = *scene.inputs.plan;
  const Dataset& data = *scene.inputs.dataset;
  const SceneOptions& opt = scene.inputs.options;
  if (!(opt.jitter >= 0.0)) throw InvalidEditError("jitter magnitude must be non-negative");
  if (!(opt.density_base >= 0.0 && opt.density_base <= 1.0)) throw InvalidEditError("density base outside [0, 1]");

  scene.evaluation = evaluate(tree, data);
  scene.classes = scene.evaluation.classes;

  const auto frames = plot_frames(plan, tree, data, opt.context);
  const auto placements = resolve_placements(frames, plan.plots.size(), scene.inputs.placements);
  build_regions(scene, frames, placements);

  std::vector<std::size_t> selected;
  if (opt.case_selection) {
    selected = *opt.case_selection;
    std::sort(selected.begin(), selected.end());
    selected.erase(std::unique(selected.begin(), selected.end()), selected.end());
  } else {
    for (const Case& c : data.cases()) selected.push_back(c.id);
  }
  const TreeBinding binding(tree, data);
  for (std::size_t id : selected) {
    if (id >= data.size()) throw NotFoundError(fmt::format("unknown case {}", id));
    scene.polylines.push_back(route_with_frames(data.cases()[id], tree, plan, binding, frames, placements, opt.trace_mode));
  }

  build_groups(scene);
  apply_jitter(scene);
  build_summaries(scene, frames, placements);
  build_edges(scene);

  for (std::size_t i = 0; i < placements.size(); ++i) {
    for (std::size_t j = i + 1; j < placements.size(); ++j) {
      if (overlaps(placements[i], placements[j])) {
        scene.warnings.push_back(fmt::format("plots {} and {} overlap", placements[i].plot_id, placements[j].plot_id));
      }
    }
  }
  return scene;
}

SceneGraph build_scene(const DecisionTree& tree, const PairingPlan& plan, const Dataset& dataset,
                       const std::vector<PlotPlacement>& placements, const SceneOptions& options) {
  SceneInputs inputs;
  inputs.tree = std::make_shared<const DecisionTree>(tree);
  inputs.plan = std::make_shared<const PairingPlan>(plan);
  inputs.dataset = std::make_shared<const Dataset>(dataset);
  inputs.placements = placements;
  inputs.options = options;
  return realize(std::move(inputs));
}

SceneGraph with_options(const SceneGraph& scene, SceneOptions options) {
  SceneInputs inputs = scene.inputs;
  inputs.options = std::move(options);
  return realize(std::move(inputs));
}

SceneGraph condense(const SceneGraph& scene, const std::set<RegionRef>& selector) {
  SceneOptions opt = scene.options();
  opt.condensed_regions.insert(selector.begin(), selector.end());
  return with_options(scene, std::move(opt));
}

SceneGraph expand(const SceneGraph& scene, const std::set<RegionRef>& selector) {
  SceneOptions opt = scene.options();
  for (const RegionRef& r : selector) opt.condensed_regions.erase(r);
  return with_options(scene, std::move(opt));
}

SceneGraph density_shading(const SceneGraph& scene, const Dataset& dataset) {
  SceneInputs inputs = scene.inputs;
  inputs.density_data = std::make_shared<const Dataset>(dataset);
  return realize(std::move(inputs));
}

SceneGraph apply_transforms(const SceneGraph& scene, std::size_t plot_id, const PlacementEdit& edit) {
  PlotPlacement placement = scene.plot(plot_id).placement;
  std::visit(
      [&](const auto& e) {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, Relocate>) {
          if (!std::isfinite(e.origin.x) || !std::isfinite(e.origin.y)) throw InvalidEditError("origin must be finite");
          placement.origin = e.origin;
        } else if constexpr (std::is_same_v<E, FlipH>) {
          placement.h_flipped = !placement.h_flipped;
        } else if constexpr (std::is_same_v<E, FlipV>) {
          placement.v_flipped = !placement.v_flipped;
        } else {
          placement.swapped = !placement.swapped;
        }
      },
      edit);
  SceneInputs inputs = scene.inputs;
  auto it = std::find_if(inputs.placements.begin(), inputs.placements.end(),
                         [&](const PlotPlacement& p) { return p.plot_id == plot_id; });
  if (it != inputs.placements.end()) {
    *it = placement;
  } else {
    inputs.placements.push_back(placement);
    std::sort(inputs.placements.begin(), inputs.placements.end(),
              [](const PlotPlacement& a, const PlotPlacement& b) { return a.plot_id < b.plot_id; });
  }
  return realize(std::move(inputs));
}

SceneGraph jitter_overlaps(const SceneGraph& scene, double magnitude) {
  SceneOptions opt = scene.options();
  opt.jitter = magnitude;
  return with_options(scene, std::move(opt));
}

SceneGraph context_and_summary(const SceneGraph& scene, bool context, SummaryMode summary) {
  SceneOptions opt = scene.options();
  opt.context = context;
  opt.summary = summary;
  return with_options(scene, std::move(opt));
}

}  // namespace spcdt
