#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "spcdt/scene.hpp"

namespace spcdt {

struct RenderConfig {
  double width = 960.0;  // canvas in px
  double height = 640.0;
  double margin = 40.0;
  std::map<std::string, std::string> palette;  // class -> CSS color; empty: default_palette
  double gray_min = 0.35;                      // luminance range of the gray ramp
  double gray_max = 0.75;
  double region_stroke = 0.5;
  double edge_stroke = 1.0;
  double vertex_radius = 2.5;
  std::string misclassified_color = "#ff0000";
  std::string font = "sans-serif";
  double font_size = 11.0;
  bool show_legend = true;
  bool show_confusion = true;
};

/// Class colors: benign green, malignant red, and a fixed cycle of distinct
/// hues for everything else, in class order.
std::map<std::string, std::string> default_palette(const std::vector<std::string>& classes);

/// Hex gray for shade key `key` out of `count`, equally spaced in luminance.
std::string gray_shade(std::size_t key, std::size_t count, double lo = 0.35, double hi = 0.75);

/// Standalone SVG 1.1. Output depends only on the scene and config; numbers
/// use four decimals. Throws InputError if the palette misses a class.
std::string to_svg(const SceneGraph& scene, const RenderConfig& config = {});

}  // namespace spcdt
