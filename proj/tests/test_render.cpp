#include <regex>

#include "doctest.h"
#include "fixtures.hpp"
#include "spcdt/error.hpp"
#include "spcdt/render.hpp"

using namespace spcdt;

namespace {

SceneGraph scene_for(const std::string& tree, const Dataset& data, const SceneOptions& options = {}) {
  const DecisionTree t = fixtures::tree(tree);
  const PairingPlan plan = derive_plot_units(t, data);
  return build_scene(t, plan, data, default_placement(plan), options);
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("render") {
  TEST_CASE("region rectangles of the five-attribute tree") {
    const std::string svg = to_svg(scene_for("wbc_five_attr", fixtures::wbc()));
    CHECK(count(svg, "class=\"region\"") == 9);
    CHECK(count(svg, "<g class=\"plot\"") == 3);
    CHECK(count(svg, "<g class=\"case") == 699);
  }

  TEST_CASE("empty scene keeps canvas and legend") {
    const DecisionTree t = parse_tree_text("then class = a\n");
    const Dataset d = fixtures::from_csv("x,class\n1,a\n");
    const SceneGraph s = build_scene(t, derive_plot_units(t, d), d, {});
    const std::string svg = to_svg(s);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("class=\"canvas\"") != std::string::npos);
    CHECK(svg.find("class=\"legend\"") != std::string::npos);
    CHECK(count(svg, "class=\"region\"") == 0);
    CHECK(svg.substr(svg.size() - 7) == "</svg>\n");
  }

  TEST_CASE("output is byte-stable") {
    const SceneGraph s = scene_for("iris", fixtures::iris());
    CHECK(to_svg(s) == to_svg(s));
    CHECK(to_svg(s) == to_svg(scene_for("iris", fixtures::iris())));
  }

  TEST_CASE("numbers use four decimals") {
    const std::string svg = to_svg(scene_for("iris", fixtures::iris()));
    const std::regex attr(R"re((x|y|cx|cy|width|height|x1|y1|x2|y2)="(-?[0-9.]+)")re");
    const std::regex fixed(R"(-?[0-9]+\.[0-9]{4})");
    std::size_t seen = 0;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), attr); it != std::sregex_iterator(); ++it) {
      CHECK(std::regex_match((*it)[2].str(), fixed));
      ++seen;
    }
    CHECK(seen > 100);
    CHECK(svg.find("-0.0000") == std::string::npos);
  }

  TEST_CASE("regions follow geometry and cases follow id") {
    const std::string svg = to_svg(scene_for("iris", fixtures::iris()));
    const std::regex case_tag(R"re(data-case="([0-9]+)")re");
    long last = -1;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), case_tag); it != std::sregex_iterator(); ++it) {
      const long id = std::stol((*it)[1].str());
      CHECK(id > last);
      last = id;
    }
    CHECK(last == 149);
  }

  TEST_CASE("misclassified cases get a ring") {
    const std::string svg = to_svg(scene_for("iris", fixtures::iris()));
    CHECK(count(svg, "class=\"case misclassified\"") == 4);
    CHECK(count(svg, "stroke=\"#ff0000\"") == 4);
  }

  TEST_CASE("palette") {
    const auto wbc = default_palette({"benign", "malignant"});
    CHECK(wbc.at("benign") == "#2ca02c");
    CHECK(wbc.at("malignant") == "#d62728");
    const auto wine = default_palette({"class_1", "class_2", "class_3"});
    CHECK(wine.at("class_1") == "#ff7f0e");
    CHECK(wine.at("class_2") == "#2ca02c");
    CHECK(wine.at("class_3") == "#1f77b4");
    const auto iris = default_palette({"Iris-setosa", "Iris-versicolor", "Iris-virginica"});
    CHECK(iris.size() == 3);
    CHECK(iris.at("Iris-setosa") != iris.at("Iris-virginica"));

    RenderConfig cfg;
    cfg.palette = {{"benign", "#00ff00"}};
    CHECK_THROWS_AS(to_svg(scene_for("wbc_five_attr", fixtures::wbc()), cfg), InputError);
  }

  TEST_CASE("gray ramp") {
    CHECK(gray_shade(0, 3) == "#595959");  // 35 %
    CHECK(gray_shade(2, 3) == "#bfbfbf");  // 75 %
    CHECK(gray_shade(1, 3) == "#8c8c8c");
    CHECK(gray_shade(0, 1) == "#8c8c8c");
  }

  TEST_CASE("condensed, summarized and context scenes render") {
    SceneOptions opt;
    opt.condensed_regions = {{0, 2}};
    opt.summary = SummaryMode::MinMax;
    opt.context = true;
    opt.jitter = 0.01;
    const std::string svg = to_svg(scene_for("wbc_five_attr", fixtures::wbc(), opt));
    CHECK(count(svg, "class=\"group\"") == 2);
    CHECK(count(svg, "class=\"summary min\"") > 0);
    CHECK(count(svg, "opacity=\"0.4000\"") == 2);
  }
}
