#include "spcdt/scene_json.hpp"

#include <fmt/core.h>

#include "spcdt/error.hpp"

namespace spcdt {

namespace {

Json point(Point2 p) { return Json::array({p.x, p.y}); }

Json interval(const Interval& i) { return Json::array({i.lo, i.hi}); }

Json axis_interval(const AxisInterval& i) {
  return Json{{"lo", i.lo}, {"hi", i.hi}, {"closed_high", i.closed_high}};
}

Json value(const Value& v) { return v ? Json(*v) : Json(nullptr); }

Json axis_to_json(const SceneAxis& axis) {
  Json thresholds = Json::array();
  for (const AxisThreshold& t : axis.thresholds) {
    thresholds.push_back({{"node", t.node}, {"value", t.value}, {"highlighted", t.highlighted}});
  }
  return Json{{"attr", axis.attribute},
              {"extent", interval(axis.extent)},
              {"thresholds", std::move(thresholds)},
              {"flipped", axis.flipped}};
}

Json region_core(const Region& r) {
  Json j{{"index", r.index},
         {"h_interval", axis_interval(r.h)},
         {"v_interval", axis_interval(r.v)},
         {"kind", r.decided() ? "decided" : "undecided"},
         {"node", r.node}};
  if (r.decided()) {
    j["class"] = r.class_name;
  } else {
    j["dest"] = r.dest_plot;
    j["shade_key"] = r.shade_key;
  }
  return j;
}

Json vertex_to_json(const SceneVertex& v) {
  Json j{{"plot", v.plot_id}, {"x", v.pos.x}, {"y", v.pos.y}};
  j["region"] = v.region ? Json(*v.region) : Json(nullptr);
  j["raw"] = Json::array({value(v.h_value), value(v.v_value)});
  j["data"] = point(v.data);
  j["imputed"] = v.imputed;
  j["context"] = v.context;
  j["group"] = v.group ? Json(*v.group) : Json(nullptr);
  return j;
}

[[noreturn]] void bad(const std::string& what) { throw InputError(what); }

template <typename T>
T get_as(const Json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    bad(fmt::format("'{}' has the wrong type", key));
  }
}

Point2 point_from(const Json& j, const char* key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    bad(fmt::format("'{}' must be a pair of numbers", key));
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

RegionRef region_ref_from(const Json& j) {
  if (j.is_array() && j.size() == 2 && j[0].is_number_unsigned() && j[1].is_number_unsigned()) {
    return {j[0].get<std::size_t>(), j[1].get<std::size_t>()};
  }
  if (j.is_object() && j.contains("plot_id") && j.contains("region")) {
    return {get_as<std::size_t>(j["plot_id"], "plot_id"), get_as<std::size_t>(j["region"], "region")};
  }
  bad("a region selector is [plot_id, region] or {\"plot_id\", \"region\"}");
}

}  // namespace

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(fmt::format("malformed JSON: {}", e.what()));
  }
}

Json evaluation_to_json(const EvaluationReport& report) {
  Json per_class = Json::array();
  for (std::size_t i = 0; i < report.classes.size(); ++i) {
    per_class.push_back({{"class", report.classes[i]},
                         {"recall", report.per_class[i].recall},
                         {"one_minus_precision", report.per_class[i].one_minus_precision}});
  }
  return Json{{"classes", report.classes},   {"error_rate", report.error_rate},
              {"errors", report.errors},     {"total", report.total},
              {"confusion", report.confusion}, {"per_class", std::move(per_class)}};
}

Json plan_to_json(const PairingPlan& plan) {
  Json plots = Json::array();
  for (const PlotUnit& p : plan.plots) {
    Json regions = Json::array();
    for (const Region& r : p.regions) {
      Json j = region_core(r);
      Json rule = Json::array();
      for (const PathCondition& c : r.rule) {
        rule.push_back({{"node", c.node},
                        {"attribute", c.attribute},
                        {"threshold", c.threshold},
                        {"branch", std::string(to_string(c.branch))}});
      }
      j["rule"] = std::move(rule);
      regions.push_back(std::move(j));
    }
    plots.push_back({{"plot_id", p.plot_id},
                     {"root_node", p.root_node},
                     {"h_attr", p.h_attr},
                     {"v_attr", p.v_attr},
                     {"h_extent", interval(p.h_extent)},
                     {"v_extent", interval(p.v_extent)},
                     {"h_thresholds", p.h_thresholds},
                     {"v_thresholds", p.v_thresholds},
                     {"absorbed", p.absorbed},
                     {"parent_plot", p.parent_plot ? Json(*p.parent_plot) : Json(nullptr)},
                     {"regions", std::move(regions)}});
  }
  Json routing = Json::array();
  for (const auto& [node, plot] : plan.routing) routing.push_back({{"node", node}, {"plot", plot}});
  return Json{{"root_plot", plan.root_plot},
              {"diagnostic", plan.diagnostic},
              {"routing", std::move(routing)},
              {"plots", std::move(plots)}};
}

Json options_to_json(const SceneOptions& o) {
  Json condensed = Json::array();
  for (const RegionRef& r : o.condensed_regions) condensed.push_back(Json::array({r.plot_id, r.region}));
  return Json{{"trace_mode", std::string(to_string(o.trace_mode))},
              {"condensed_regions", std::move(condensed)},
              {"jitter", o.jitter},
              {"context", o.context},
              {"summary", std::string(to_string(o.summary))},
              {"case_selection", o.case_selection ? Json(*o.case_selection) : Json(nullptr)},
              {"highlighted_nodes", o.highlighted_nodes},
              {"density_base", o.density_base}};
}

Json placement_to_json(const PlotPlacement& p) {
  return Json{{"plot_id", p.plot_id},      {"origin", point(p.origin)},    {"size", point(p.size)},
              {"h_flipped", p.h_flipped}, {"v_flipped", p.v_flipped}, {"swapped", p.swapped}};
}

Json scene_to_json(const SceneGraph& scene) {
  Json plots = Json::array();
  for (const ScenePlot& p : scene.plots) {
    Json regions = Json::array();
    for (const SceneRegion& r : p.regions) {
      Json j = region_core(r.region);
      j["intensity"] = r.intensity;
      j["count"] = r.count;
      j["condensed"] = r.condensed;
      j["rect"] = {{"x", r.pos.x}, {"y", r.pos.y}, {"w", r.size.x}, {"h", r.size.y}};
      regions.push_back(std::move(j));
    }
    plots.push_back({{"plot_id", p.plot_id},
                     {"context", p.context},
                     {"axes", {{"h", axis_to_json(p.h)}, {"v", axis_to_json(p.v)}}},
                     {"origin", point(p.placement.origin)},
                     {"size", point(p.placement.size)},
                     {"swapped", p.placement.swapped},
                     {"regions", std::move(regions)}});
  }

  Json polylines = Json::array();
  for (const Polyline& l : scene.polylines) {
    Json vertices = Json::array();
    for (const SceneVertex& v : l.vertices) vertices.push_back(vertex_to_json(v));
    polylines.push_back({{"case_id", l.case_id},
                         {"actual", l.actual},
                         {"predicted", l.predicted},
                         {"misclassified", l.misclassified},
                         {"terminal_plot", l.terminal_plot},
                         {"terminal_region", l.terminal_region},
                         {"muted", l.muted},
                         {"vertices", std::move(vertices)}});
  }

  Json groups = Json::array();
  for (const CondensedGroup& g : scene.groups) {
    groups.push_back({{"plot", g.region.plot_id},
                      {"region", g.region.region},
                      {"class", g.class_name},
                      {"x", g.pos.x},
                      {"y", g.pos.y},
                      {"case_ids", g.case_ids}});
  }

  Json edges = Json::array();
  for (const SceneEdge& e : scene.edges) {
    edges.push_back({{"from_plot", e.from_plot},
                     {"to_plot", e.to_plot},
                     {"from", point(e.from)},
                     {"to", point(e.to)},
                     {"class", e.class_name},
                     {"group", e.group ? Json(*e.group) : Json(nullptr)},
                     {"case_ids", e.case_ids}});
  }

  Json summaries = Json::array();
  for (const SummaryLine& s : scene.summaries) {
    Json vertices = Json::array();
    for (const SceneVertex& v : s.vertices) vertices.push_back(vertex_to_json(v));
    summaries.push_back({{"terminal_plot", s.terminal_plot},
                         {"terminal_region", s.terminal_region},
                         {"class", s.class_name},
                         {"kind", std::string(to_string(s.kind))},
                         {"members", s.members},
                         {"vertices", std::move(vertices)}});
  }

  return Json{{"classes", scene.classes},
              {"plots", std::move(plots)},
              {"polylines", std::move(polylines)},
              {"groups", std::move(groups)},
              {"edges", std::move(edges)},
              {"summaries", std::move(summaries)},
              {"evaluation", evaluation_to_json(scene.evaluation)},
              {"options", options_to_json(scene.options())},
              {"warnings", scene.warnings},
              {"plan", plan_to_json(*scene.inputs.plan)}};
}

void patch_options(SceneOptions& o, const Json& patch) {
  if (!patch.is_object()) bad("options must be a JSON object");
  for (const auto& [key, v] : patch.items()) {
    if (key == "trace_mode") {
      o.trace_mode = parse_trace_mode(get_as<std::string>(v, "trace_mode"));
    } else if (key == "condensed_regions") {
      if (!v.is_array()) bad("'condensed_regions' must be an array");
      o.condensed_regions.clear();
      for (const Json& r : v) o.condensed_regions.insert(region_ref_from(r));
    } else if (key == "jitter") {
      o.jitter = get_as<double>(v, "jitter");
    } else if (key == "context") {
      o.context = get_as<bool>(v, "context");
    } else if (key == "summary") {
      o.summary = parse_summary_mode(get_as<std::string>(v, "summary"));
    } else if (key == "case_selection") {
      if (v.is_null()) {
        o.case_selection.reset();
      } else {
        o.case_selection = get_as<std::vector<std::size_t>>(v, "case_selection");
      }
    } else if (key == "highlighted_nodes") {
      o.highlighted_nodes = get_as<std::set<NodeId>>(v, "highlighted_nodes");
    } else if (key == "density_base") {
      o.density_base = get_as<double>(v, "density_base");
    } else {
      bad(fmt::format("unknown option '{}'", key));
    }
  }
}

PlotPlacement placement_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("plot_id")) bad("a placement needs a 'plot_id'");
  PlotPlacement p;
  for (const auto& [key, v] : j.items()) {
    if (key == "plot_id") {
      p.plot_id = get_as<std::size_t>(v, "plot_id");
    } else if (key == "origin") {
      p.origin = point_from(v, "origin");
    } else if (key == "size") {
      p.size = point_from(v, "size");
    } else if (key == "h_flipped") {
      p.h_flipped = get_as<bool>(v, "h_flipped");
    } else if (key == "v_flipped") {
      p.v_flipped = get_as<bool>(v, "v_flipped");
    } else if (key == "swapped") {
      p.swapped = get_as<bool>(v, "swapped");
    } else {
      bad(fmt::format("unknown placement field '{}'", key));
    }
  }
  return p;
}

LayoutOverrides layout_from_json(const Json& j) {
  if (!j.is_object()) bad("layout overrides must be a JSON object");
  LayoutOverrides out;
  for (const auto& [key, v] : j.items()) {
    if (key == "placements") {
      if (!v.is_array()) bad("'placements' must be an array");
      for (const Json& p : v) out.placements.push_back(placement_from_json(p));
    } else if (key == "options") {
      SceneOptions probe;
      patch_options(probe, v);  // validate early
      out.options = v;
    } else {
      bad(fmt::format("unknown layout field '{}'", key));
    }
  }
  return out;
}

}  // namespace spcdt
