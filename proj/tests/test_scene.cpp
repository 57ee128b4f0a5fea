#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "spcdt/error.hpp"
#include "spcdt/scene.hpp"

using namespace spcdt;

namespace {

SceneGraph scene_for(const std::string& tree, const Dataset& data, const SceneOptions& options = {}) {
  const DecisionTree t = fixtures::tree(tree);
  const PairingPlan plan = derive_plot_units(t, data);
  return build_scene(t, plan, data, default_placement(plan), options);
}

std::size_t edges_between(const SceneGraph& s, std::size_t from, std::size_t to) {
  return static_cast<std::size_t>(std::count_if(s.edges.begin(), s.edges.end(), [&](const SceneEdge& e) {
    return e.from_plot == from && e.to_plot == to;
  }));
}

const Region& region_of_vertex(const SceneGraph& s, const SceneVertex& v) {
  return s.plots[v.plot_id].regions[*v.region].region;
}

Case wbc_case(std::map<std::string, double> values) {
  const Dataset& wbc = fixtures::wbc();
  Case c;
  c.values.assign(wbc.attributes().size(), 1.0);
  for (const auto& [name, v] : values) c.values[wbc.attribute_index(name)] = v;
  c.label = "malignant";
  return c;
}

bool inside(const PlotPlacement& p, Point2 q, double tol = 1e-9) {
  return q.x >= p.origin.x - tol && q.x <= p.origin.x + p.size.x + tol && q.y >= p.origin.y - tol &&
         q.y <= p.origin.y + p.size.y + tol;
}

}  // namespace

TEST_SUITE("scene") {
  TEST_CASE("default staircase placement") {
    const PairingPlan plan = derive_plot_units(fixtures::tree("wbc_five_attr"), fixtures::wbc());
    const auto placements = default_placement(plan);
    REQUIRE(placements.size() == 3);
    CHECK(placements[0].origin == Point2{0, 0});
    CHECK(placements[1].origin == Point2{1.25, 0.25});
    CHECK(placements[2].origin == Point2{2.5, 0.5});
    CHECK(scene_for("wbc_five_attr", fixtures::wbc()).warnings.empty());
  }

  TEST_CASE("a case traced through three plots") {
    const DecisionTree t = fixtures::tree("wbc_five_attr");
    const PairingPlan plan = derive_plot_units(t, fixtures::wbc());
    const Case c = wbc_case({{"ucellsize", 3}, {"bchromatin", 2}, {"clump", 3}, {"bnuclei", 7}, {"mgadhesion", 4}});
    const Polyline line = route_case(c, t, plan, fixtures::wbc(), default_placement(plan), {});
    REQUIRE(line.vertices.size() == 3);
    CHECK(plan.plots[0].regions[*line.vertices[0].region].kind == RegionKind::Undecided);
    CHECK(plan.plots[1].regions[*line.vertices[1].region].kind == RegionKind::Undecided);
    const Region& last = plan.plots[2].regions[*line.vertices[2].region];
    CHECK(last.class_name == "malignant");
    CHECK(line.predicted == "malignant");
    CHECK(line.terminal_plot == 2);
    CHECK(line.vertices[1].h_value == 2.0);
    CHECK(line.vertices[1].v_value == 3.0);
  }

  TEST_CASE("a setosa case stops in the first plot") {
    const DecisionTree t = fixtures::tree("iris");
    const Dataset& iris = fixtures::iris();
    const PairingPlan plan = derive_plot_units(t, iris);
    const Polyline line = route_case(iris.cases()[0], t, plan, iris, default_placement(plan), {});
    REQUIRE(line.vertices.size() == 1);
    CHECK(plan.plots[0].regions[*line.vertices[0].region].class_name == "Iris-setosa");
    CHECK(line.vertices[0].data == Point2{1.4, 0.2});
  }

  TEST_CASE("full trace visits every plot and keeps raw values") {
    SceneOptions opt;
    opt.trace_mode = TraceMode::Full;
    const SceneGraph s = scene_for("iris", fixtures::iris(), opt);
    const PairingPlan& plan = *s.inputs.plan;
    for (const Polyline& l : s.polylines) {
      REQUIRE(l.vertices.size() == plan.plots.size());
      const Case& c = fixtures::iris().cases()[l.case_id];
      for (const SceneVertex& v : l.vertices) {
        CHECK(v.h_value == c.values[plan.plots[v.plot_id].h_index]);
        CHECK(v.v_value == c.values[plan.plots[v.plot_id].v_index]);
      }
    }
  }

  TEST_CASE("scene structure and misclassification flags") {
    const SceneGraph s = scene_for("wbc_five_attr", fixtures::wbc());
    std::size_t decided = 0, gray = 0;
    for (const ScenePlot& p : s.plots) {
      for (const SceneRegion& r : p.regions) (r.region.decided() ? decided : gray)++;
    }
    CHECK(s.plots.size() == 3);
    CHECK(decided == 7);
    CHECK(gray == 2);

    const SceneGraph iris = scene_for("iris", fixtures::iris());
    CHECK(std::count_if(iris.polylines.begin(), iris.polylines.end(), [](const Polyline& l) { return l.misclassified; }) == 4);
  }

  TEST_CASE("terminal vertices decide the predicted class") {
    for (const char* name : {"wbc_five_attr", "wbc_full", "wbc_split"}) {
      const SceneGraph s = scene_for(name, fixtures::wbc());
      for (const Polyline& l : s.polylines) {
        const Region& r = region_of_vertex(s, l.vertices.back());
        CHECK(r.decided());
        CHECK(r.class_name == l.predicted);
        for (const SceneVertex& v : l.vertices) CHECK(inside(s.plots[v.plot_id].placement, v.pos));
      }
    }
  }

  TEST_CASE("empty selection and unknown case ids") {
    SceneOptions opt;
    opt.case_selection = std::vector<std::size_t>{};
    const SceneGraph s = scene_for("iris", fixtures::iris(), opt);
    CHECK(s.polylines.empty());
    CHECK(s.plots.size() == 3);
    CHECK(s.evaluation.total == 150);
    opt.case_selection = std::vector<std::size_t>{150};
    CHECK_THROWS_AS(scene_for("iris", fixtures::iris(), opt), NotFoundError);
  }

  TEST_CASE("condensation") {
    const SceneGraph s = scene_for("wbc_five_attr", fixtures::wbc());
    std::size_t gray0 = 0;
    for (const SceneRegion& r : s.plots[0].regions) {
      if (!r.region.decided()) gray0 = r.region.index;
    }
    const std::size_t before = edges_between(s, 0, 1);
    const SceneGraph c = condense(s, {{0, gray0}});
    CHECK(before > 2);
    CHECK(edges_between(c, 0, 1) <= c.classes.size());
    CHECK(c.groups.size() == 2);  // both classes pass through the gray zone
    std::size_t members = 0;
    for (const SceneEdge& e : c.edges) {
      if (e.from_plot == 0 && e.to_plot == 1) members += e.case_ids.size();
    }
    CHECK(members == before);
    CHECK(condense(c, {{0, gray0}}) == c);
    CHECK(expand(c, {{0, gray0}}) == s);
    CHECK(c.evaluation == s.evaluation);
    CHECK_THROWS_AS(condense(s, {{0, 99}}), NotFoundError);
  }

  TEST_CASE("condensing a single case keeps its vertex") {
    SceneOptions opt;
    opt.case_selection = std::vector<std::size_t>{100};
    const SceneGraph s = scene_for("iris", fixtures::iris(), opt);
    const SceneVertex& v = s.polylines[0].vertices[0];
    const SceneGraph c = condense(s, {{v.plot_id, *v.region}});
    REQUIRE(c.groups.size() == 1);
    CHECK(c.groups[0].pos == v.pos);
  }

  TEST_CASE("density shading") {
    const SceneGraph s = scene_for("wbc_full", fixtures::wbc());
    const SceneRegion* darkest = nullptr;
    for (const ScenePlot& p : s.plots) {
      for (const SceneRegion& r : p.regions) {
        if (r.count == 0) CHECK(r.intensity == s.options().density_base);
        if (r.region.decided() && (!darkest || r.intensity > darkest->intensity)) darkest = &r;
      }
    }
    REQUIRE(darkest);
    CHECK(darkest->count == 407);
    CHECK(darkest->region.class_name == "benign");
    CHECK(darkest->intensity == 1.0);

    // Shading by a subset changes intensities only.
    const SceneGraph shaded = density_shading(s, fixtures::wbc().subset({0, 1, 2}));
    CHECK(shaded.polylines == s.polylines);
    CHECK(shaded.evaluation == s.evaluation);
    std::map<std::size_t, double> by_count;
    for (const ScenePlot& p : shaded.plots) {
      for (const SceneRegion& r : p.regions) {
        auto [it, fresh] = by_count.emplace(r.count, r.intensity);
        CHECK(it->second == r.intensity);
      }
    }
  }

  TEST_CASE("flips are involutions and swaps exchange local axes") {
    const SceneGraph s = scene_for("iris", fixtures::iris());
    CHECK(apply_transforms(apply_transforms(s, 0, FlipH{}), 0, FlipH{}) == s);
    CHECK(apply_transforms(apply_transforms(s, 1, FlipV{}), 1, FlipV{}) == s);

    const SceneGraph w = apply_transforms(s, 0, Swap{});
    for (std::size_t i = 0; i < s.polylines.size(); ++i) {
      const SceneVertex& a = s.polylines[i].vertices[0];
      const SceneVertex& b = w.polylines[i].vertices[0];
      CHECK(b.pos.x == doctest::Approx(a.pos.y));
      CHECK(b.pos.y == doctest::Approx(a.pos.x));
      CHECK(b.data == a.data);
    }
    const SceneGraph f = apply_transforms(s, 0, FlipH{});
    const SceneVertex& a = s.polylines[0].vertices[0];
    const SceneVertex& b = f.polylines[0].vertices[0];
    CHECK(b.pos.x == doctest::Approx(1.0 - a.pos.x));
    CHECK(b.pos.y == a.pos.y);
    CHECK_THROWS_AS(apply_transforms(s, 9, Swap{}), NotFoundError);
  }

  TEST_CASE("relocation is view-only and overlaps are reported") {
    const SceneGraph s = scene_for("iris", fixtures::iris());
    const SceneGraph moved = apply_transforms(s, 2, Relocate{{0.5, 0.5}});
    CHECK(moved.evaluation == s.evaluation);
    CHECK(moved.plot(2).placement.origin == Point2{0.5, 0.5});
    CHECK_FALSE(moved.warnings.empty());
    for (const Polyline& l : moved.polylines) {
      for (const SceneVertex& v : l.vertices) CHECK(inside(moved.plots[v.plot_id].placement, v.pos));
    }
  }

  TEST_CASE("jitter spreads coincident vertices along the diagonal") {
    const DecisionTree t = parse_tree_text("x < 1 then class = a\nx >= 1 then class = b\n");
    const Dataset d = fixtures::from_csv("x,class\n0,a\n2,b\n2,a\n2,b\n0.5,a\n");
    const PairingPlan plan = derive_plot_units(t, d);
    const SceneGraph s = build_scene(t, plan, d, default_placement(plan));
    CHECK(jitter_overlaps(s, 0.0) == s);

    const double m = 0.05;
    const SceneGraph j = jitter_overlaps(s, m);
    std::vector<Point2> spread;
    for (std::size_t id : {1, 2, 3}) {
      const Point2 before = s.polylines[id].vertices[0].pos;
      const Point2 after = j.polylines[id].vertices[0].pos;
      CHECK(std::hypot(after.x - before.x, after.y - before.y) <= m + 1e-12);
      CHECK((after.x - before.x) == doctest::Approx(-(after.y - before.y)));
      CHECK(j.polylines[id].vertices[0].data == s.polylines[id].vertices[0].data);
      spread.push_back(after);
    }
    CHECK(spread[0].y > spread[1].y);  // case order runs from upper left to lower right
    CHECK(spread[1].y > spread[2].y);
    CHECK(spread[0].x < spread[2].x);
    CHECK(j.polylines[0].vertices[0].pos == s.polylines[0].vertices[0].pos);
    CHECK(j.polylines[4].vertices[0].pos == s.polylines[4].vertices[0].pos);
    CHECK_THROWS_AS(jitter_overlaps(s, -1.0), InvalidEditError);

    const Dataset distinct = fixtures::from_csv("x,class\n0,a\n2,b\n");
    const SceneGraph u = build_scene(t, plan, distinct, default_placement(plan));
    CHECK(jitter_overlaps(u, m).polylines == u.polylines);
  }

  TEST_CASE("context plots for unused attributes") {
    const SceneGraph s = scene_for("wbc_five_attr", fixtures::wbc());
    const SceneGraph c = context_and_summary(s, true, SummaryMode::None);
    REQUIRE(c.plots.size() == 5);
    CHECK(c.plots[3].context);
    CHECK(c.plots[3].h.attribute == "ucellshape");
    CHECK(c.plots[3].v.attribute == "sepics");
    CHECK(c.plots[4].h.attribute == "normnucl");
    CHECK(c.plots[4].v.attribute == "mitoses");
    CHECK(c.polylines[0].vertices.size() == s.polylines[0].vertices.size() + 2);
    CHECK(c.polylines[0].vertices[0].context);
    CHECK(c.evaluation == s.evaluation);
    CHECK(context_and_summary(c, false, SummaryMode::None) == s);
    CHECK(context_pairs(fixtures::tree("iris"), fixtures::iris()).empty());
  }

  TEST_CASE("an odd unused attribute pairs with itself") {
    const DecisionTree t = parse_tree_text("x < 1 then class = a\nx >= 1 then class = b\n");
    const Dataset d = fixtures::from_csv("x,p,q,r,class\n0,1,2,3,a\n");
    const auto pairs = context_pairs(t, d);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[1] == std::pair<std::string, std::string>{"r", "r"});
  }

  TEST_CASE("summaries") {
    const SceneGraph s = scene_for("iris", fixtures::iris());
    const SceneGraph centers = context_and_summary(s, false, SummaryMode::Centers);
    CHECK(std::all_of(centers.polylines.begin(), centers.polylines.end(), [](const Polyline& l) { return l.muted; }));
    std::size_t members = 0;
    for (const SummaryLine& l : centers.summaries) members += l.members;
    CHECK(members == 150);

    const SceneGraph minmax = context_and_summary(s, false, SummaryMode::MinMax);
    CHECK(minmax.summaries.size() == 2 * centers.summaries.size());
    for (std::size_t i = 0; i + 1 < minmax.summaries.size(); i += 2) {
      const SummaryLine& lo = minmax.summaries[i];
      const SummaryLine& hi = minmax.summaries[i + 1];
      CHECK(lo.kind == SummaryKind::Min);
      CHECK(hi.kind == SummaryKind::Max);
      for (std::size_t v = 0; v < lo.vertices.size(); ++v) {
        CHECK(lo.vertices[v].data.x <= hi.vertices[v].data.x);
        CHECK(lo.vertices[v].data.y <= hi.vertices[v].data.y);
      }
    }

    // One case per class: the summary lines are the cases themselves.
    SceneOptions opt;
    opt.case_selection = std::vector<std::size_t>{0, 60, 120};
    opt.summary = SummaryMode::Centers;
    const SceneGraph one = scene_for("iris", fixtures::iris(), opt);
    REQUIRE(one.summaries.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(one.summaries[i].vertices == one.polylines[i].vertices);
  }

  TEST_CASE("scenes are deterministic and edits keep the evaluation") {
    const SceneGraph a = scene_for("wine", fixtures::wine());
    const SceneGraph b = scene_for("wine", fixtures::wine());
    CHECK(a == b);
    SceneGraph e = apply_transforms(a, 1, Swap{});
    e = jitter_overlaps(e, 0.01);
    e = condense(e, {{0, 0}});
    e = apply_transforms(e, 0, Relocate{{-3, 2}});
    CHECK(e.evaluation == a.evaluation);
  }

  TEST_CASE("mode names") {
    CHECK(parse_trace_mode("full") == TraceMode::Full);
    CHECK(parse_summary_mode("minmax") == SummaryMode::MinMax);
    CHECK_THROWS_AS(parse_trace_mode("partial"), InputError);
  }
}
