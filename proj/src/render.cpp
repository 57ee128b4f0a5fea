#include "spcdt/render.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/core.h>

#include "spcdt/error.hpp"

namespace spcdt {

namespace {

std::string num(double v) {
  std::string s = fmt::format("{:.4f}", v);
  if (s == "-0.0000") s = "0.0000";
  return s;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kMutedColor = "#bbbbbb";

class SvgWriter {
 public:
  SvgWriter(const SceneGraph& scene, const RenderConfig& config)
      : scene_(scene), cfg_(config), palette_(config.palette.empty() ? default_palette(scene.classes) : config.palette) {
    for (const std::string& c : scene.classes) {
      if (!palette_.count(c)) throw InputError(fmt::format("palette has no color for class '{}'", c));
    }
    for (std::size_t i = 0; i < scene.classes.size(); ++i) class_index_[scene.classes[i]] = i;
    for (const ScenePlot& p : scene.plots) {
      for (const SceneRegion& r : p.regions) {
        if (!r.region.decided()) gray_count_ = std::max(gray_count_, r.region.shade_key + 1);
      }
    }
    fit();
  }

  std::string write() {
    out_ += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out_ += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" "
        "viewBox=\"0 0 {0} {1}\" font-family=\"{2}\" font-size=\"{3}\">\n",
        num(cfg_.width), num(cfg_.height), escape(cfg_.font), num(cfg_.font_size));
    markers();
    out_ += fmt::format("<rect class=\"canvas\" x=\"0.0000\" y=\"0.0000\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n",
                        num(cfg_.width), num(cfg_.height));
    out_ += "<g class=\"plots\">\n";
    for (const ScenePlot& p : scene_.plots) plot(p);
    out_ += "</g>\n<g class=\"polylines\">\n";
    for (const Polyline& l : scene_.polylines) polyline(l);
    out_ += "</g>\n<g class=\"groups\">\n";
    groups();
    out_ += "</g>\n<g class=\"summaries\">\n";
    for (const SummaryLine& s : scene_.summaries) summary(s);
    out_ += "</g>\n";
    legend();
    out_ += "</svg>\n";
    return std::move(out_);
  }

 private:
  void fit() {
    double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
    bool first = true;
    for (const ScenePlot& p : scene_.plots) {
      const PlotPlacement& pl = p.placement;
      if (first) {
        x0 = pl.origin.x, y0 = pl.origin.y, x1 = pl.origin.x + pl.size.x, y1 = pl.origin.y + pl.size.y;
        first = false;
      }
      x0 = std::min(x0, pl.origin.x);
      y0 = std::min(y0, pl.origin.y);
      x1 = std::max(x1, pl.origin.x + pl.size.x);
      y1 = std::max(y1, pl.origin.y + pl.size.y);
    }
    const double legend = cfg_.show_legend ? 2.5 * cfg_.font_size : 0.0;
    const double dw = std::max(1.0, cfg_.width - 2 * cfg_.margin);
    const double dh = std::max(1.0, cfg_.height - 2 * cfg_.margin - legend);
    scale_ = std::min(dw / (x1 - x0), dh / (y1 - y0));
    x0_ = x0;
    y1_ = y1;
  }

  double px(double x) const { return cfg_.margin + (x - x0_) * scale_; }
  double py(double y) const { return cfg_.margin + (y1_ - y) * scale_; }

  const std::string& color(const std::string& class_name) const { return palette_.at(class_name); }

  void markers() {
    out_ += "<defs>\n";
    std::set<std::string> colors;
    for (const std::string& c : scene_.classes) colors.insert(color(c));
    for (std::size_t i = 0; i < scene_.classes.size(); ++i) {
      out_ += fmt::format(
          "<marker id=\"arrow-{}\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" "
          "orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"{}\"/></marker>\n",
          i, color(scene_.classes[i]));
    }
    out_ += "</defs>\n";
  }

  void plot(const ScenePlot& p) {
    const PlotPlacement& pl = p.placement;
    out_ += fmt::format("<g class=\"plot\" id=\"plot-{}\"{}>\n", p.plot_id,
                        p.context ? " opacity=\"0.4000\"" : "");

    std::vector<const SceneRegion*> regions;
    for (const SceneRegion& r : p.regions) regions.push_back(&r);
    std::sort(regions.begin(), regions.end(), [](const SceneRegion* a, const SceneRegion* b) {
      return std::tie(a->region.h.lo, a->region.v.lo, a->region.index) <
             std::tie(b->region.h.lo, b->region.v.lo, b->region.index);
    });
    for (const SceneRegion* r : regions) {
      const std::string fill = r->region.decided()
                                   ? color(r->region.class_name)
                                   : gray_shade(r->region.shade_key, gray_count_, cfg_.gray_min, cfg_.gray_max);
      out_ += fmt::format(
          "<rect class=\"region\" data-region=\"{}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" "
          "fill-opacity=\"{}\" stroke=\"#ffffff\" stroke-width=\"{}\"/>\n",
          r->region.index, num(px(r->pos.x)), num(py(r->pos.y + r->size.y)), num(r->size.x * scale_),
          num(r->size.y * scale_), fill, num(r->intensity), num(cfg_.region_stroke));
    }
    out_ += fmt::format(
        "<rect class=\"frame\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333333\" "
        "stroke-width=\"{}\"/>\n",
        num(px(pl.origin.x)), num(py(pl.origin.y + pl.size.y)), num(pl.size.x * scale_), num(pl.size.y * scale_),
        num(cfg_.region_stroke));

    // A data axis maps to screen x unless the plot is swapped.
    auto threshold_lines = [&](const SceneAxis& axis, bool screen_x) {
      for (const AxisThreshold& t : axis.thresholds) {
        double u = (t.value - axis.extent.lo) / axis.extent.width();
        if (axis.flipped) u = 1.0 - u;
        double xa, ya, xb, yb;
        if (screen_x) {
          xa = xb = pl.origin.x + u * pl.size.x;
          ya = pl.origin.y;
          yb = pl.origin.y + pl.size.y;
        } else {
          ya = yb = pl.origin.y + u * pl.size.y;
          xa = pl.origin.x;
          xb = pl.origin.x + pl.size.x;
        }
        out_ += fmt::format(
            "<line class=\"threshold{}\" data-node=\"{}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" "
            "stroke-width=\"{}\" stroke-dasharray=\"4 2\"/>\n",
            t.highlighted ? " highlighted" : "", t.node, num(px(xa)), num(py(ya)), num(px(xb)), num(py(yb)),
            t.highlighted ? "#000000" : "#555555", num(cfg_.region_stroke * (t.highlighted ? 4 : 2)));
      }
    };
    threshold_lines(p.h, !pl.swapped);
    threshold_lines(p.v, pl.swapped);

    const SceneAxis& bottom = pl.swapped ? p.v : p.h;
    const SceneAxis& left = pl.swapped ? p.h : p.v;
    const double cx = px(pl.origin.x + pl.size.x / 2);
    const double cy = py(pl.origin.y + pl.size.y / 2);
    out_ += fmt::format("<text class=\"axis-label\" x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", num(cx),
                        num(py(pl.origin.y) + cfg_.font_size * 1.2), escape(bottom.attribute));
    const double lx = px(pl.origin.x) - cfg_.font_size * 0.5;
    out_ += fmt::format(
        "<text class=\"axis-label\" x=\"{0}\" y=\"{1}\" text-anchor=\"middle\" transform=\"rotate(-90 {0} {1})\">{2}</text>\n",
        num(lx), num(cy), escape(left.attribute));
    out_ += fmt::format("<text class=\"plot-label\" x=\"{}\" y=\"{}\">P{}</text>\n", num(px(pl.origin.x) + 2),
                        num(py(pl.origin.y + pl.size.y) - 3), p.plot_id);
    out_ += "</g>\n";
  }

  std::string marker_for(const std::string& class_name) const {
    return fmt::format("url(#arrow-{})", class_index_.at(class_name));
  }

  void polyline(const Polyline& l) {
    out_ += fmt::format("<g class=\"case{}\" data-case=\"{}\"{}>\n", l.misclassified ? " misclassified" : "",
                        l.case_id, l.muted ? " opacity=\"0.3500\"" : "");
    const std::string stroke = l.muted ? kMutedColor : color(l.predicted);
    for (std::size_t i = 0; i + 1 < l.vertices.size(); ++i) {
      const SceneVertex& a = l.vertices[i];
      const SceneVertex& b = l.vertices[i + 1];
      if (a.group) continue;  // drawn as part of a bundle
      out_ += fmt::format(
          "<line class=\"edge\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"{}\"{}/>\n",
          num(px(a.pos.x)), num(py(a.pos.y)), num(px(b.pos.x)), num(py(b.pos.y)), stroke, num(cfg_.edge_stroke),
          l.muted ? "" : fmt::format(" marker-end=\"{}\"", marker_for(l.predicted)));
    }
    for (std::size_t i = 0; i < l.vertices.size(); ++i) {
      const SceneVertex& v = l.vertices[i];
      if (v.group) continue;
      const bool ring = l.misclassified && i + 1 == l.vertices.size();
      out_ += fmt::format("<circle class=\"vertex{}\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"{}/>\n",
                          v.imputed ? " imputed" : "", num(px(v.pos.x)), num(py(v.pos.y)), num(cfg_.vertex_radius),
                          l.muted ? kMutedColor : color(l.actual),
                          ring ? fmt::format(" stroke=\"{}\" stroke-width=\"{}\"", cfg_.misclassified_color,
                                             num(cfg_.edge_stroke * 1.5))
                               : "");
    }
    out_ += "</g>\n";
  }

  void groups() {
    const bool muted = !scene_.summaries.empty();
    for (const SceneEdge& e : scene_.edges) {
      if (!e.group) continue;
      out_ += fmt::format(
          "<line class=\"bundle\" data-group=\"{}\" data-cases=\"{}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" "
          "stroke=\"{}\" stroke-width=\"{}\"{}/>\n",
          *e.group, e.case_ids.size(), num(px(e.from.x)), num(py(e.from.y)), num(px(e.to.x)), num(py(e.to.y)),
          muted ? kMutedColor : color(e.class_name),
          num(cfg_.edge_stroke * (1.0 + std::log2(static_cast<double>(e.case_ids.size())))),
          muted ? "" : fmt::format(" marker-end=\"{}\"", marker_for(e.class_name)));
    }
    for (std::size_t i = 0; i < scene_.groups.size(); ++i) {
      const CondensedGroup& g = scene_.groups[i];
      out_ += fmt::format(
          "<circle class=\"group\" data-group=\"{}\" data-cases=\"{}\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\" "
          "stroke=\"#000000\" stroke-width=\"{}\"/>\n",
          i, g.case_ids.size(), num(px(g.pos.x)), num(py(g.pos.y)), num(cfg_.vertex_radius * 1.8),
          color(g.class_name), num(cfg_.region_stroke));
    }
  }

  void summary(const SummaryLine& s) {
    std::string points;
    for (const SceneVertex& v : s.vertices) {
      if (!points.empty()) points += ' ';
      points += num(px(v.pos.x)) + "," + num(py(v.pos.y));
    }
    out_ += fmt::format(
        "<polyline class=\"summary {}\" data-members=\"{}\" points=\"{}\" fill=\"none\" stroke=\"{}\" "
        "stroke-width=\"{}\"{}/>\n",
        to_string(s.kind), s.members, points, color(s.class_name), num(cfg_.edge_stroke * 2.5),
        s.kind == SummaryKind::Center ? "" : " stroke-dasharray=\"6 3\"");
  }

  void legend() {
    if (!cfg_.show_legend) return;
    out_ += "<g class=\"legend\">\n";
    const double y = cfg_.height - cfg_.margin / 2 - cfg_.font_size;
    double x = cfg_.margin;
    for (const std::string& c : scene_.classes) {
      out_ += fmt::format(
          "<rect class=\"swatch\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n"
          "<text x=\"{}\" y=\"{}\">{}</text>\n",
          num(x), num(y), num(cfg_.font_size), num(cfg_.font_size), color(c), num(x + cfg_.font_size * 1.4),
          num(y + cfg_.font_size * 0.9), escape(c));
      x += cfg_.font_size * (2.4 + 0.6 * static_cast<double>(c.size()));
    }
    if (cfg_.show_confusion && scene_.evaluation.total > 0) {
      out_ += fmt::format("<text class=\"evaluation\" x=\"{}\" y=\"{}\">Error rate {:.4f} ({} of {})</text>\n",
                          num(x + cfg_.font_size), num(y + cfg_.font_size * 0.9), scene_.evaluation.error_rate,
                          scene_.evaluation.errors, scene_.evaluation.total);
    }
    out_ += "</g>\n";
  }

  const SceneGraph& scene_;
  const RenderConfig& cfg_;
  std::map<std::string, std::string> palette_;
  std::map<std::string, std::size_t> class_index_;
  std::size_t gray_count_ = 0;
  double scale_ = 1.0;
  double x0_ = 0.0;
  double y1_ = 1.0;
  std::string out_;
};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::map<std::string, std::string> default_palette(const std::vector<std::string>& classes) {
  constexpr const char* kGreen = "#2ca02c";
  constexpr const char* kRed = "#d62728";
  constexpr const char* kBlue = "#1f77b4";
  const std::vector<std::string> cycle{"#ff7f0e", kGreen,    kBlue,     "#9467bd", "#8c564b",
                                       "#e377c2", "#bcbd22", "#17becf", kRed,      "#7f7f7f"};
  std::map<std::string, std::string> palette;
  std::set<std::string> used;
  for (const std::string& c : classes) {
    const std::string name = lower(c);
    const char* fixed = nullptr;
    if (name.find("benign") != std::string::npos) fixed = kGreen;
    else if (name.find("malignant") != std::string::npos) fixed = kRed;
    else if (name.find("setosa") != std::string::npos) fixed = kRed;
    else if (name.find("versicolor") != std::string::npos) fixed = kBlue;
    else if (name.find("virginica") != std::string::npos) fixed = kGreen;
    if (fixed) {
      palette[c] = fixed;
      used.insert(fixed);
    }
  }
  std::size_t next = 0;
  for (const std::string& c : classes) {
    if (palette.count(c)) continue;
    std::size_t tries = 0;
    while (used.count(cycle[next % cycle.size()]) && tries++ < cycle.size()) ++next;
    palette[c] = cycle[next % cycle.size()];
    used.insert(palette[c]);
    ++next;
  }
  return palette;
}

std::string gray_shade(std::size_t key, std::size_t count, double lo, double hi) {
  const double l = count <= 1 ? (lo + hi) / 2.0
                              : lo + (hi - lo) * static_cast<double>(key) / static_cast<double>(count - 1);
  const int v = static_cast<int>(std::lround(std::clamp(l, 0.0, 1.0) * 255.0));
  return fmt::format("#{0:02x}{0:02x}{0:02x}", v);
}

std::string to_svg(const SceneGraph& scene, const RenderConfig& config) {
  return SvgWriter(scene, config).write();
}

}  // namespace spcdt
