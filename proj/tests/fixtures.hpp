#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "spcdt/dataset.hpp"
#include "spcdt/tree.hpp"

namespace fixtures {

inline std::filesystem::path data_path(const std::string& name) { return std::filesystem::path(SPCDT_DATA_DIR) / name; }

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const spcdt::Dataset& iris() {
  static const spcdt::Dataset d = spcdt::load_csv_file(data_path("iris.csv"));
  return d;
}
inline const spcdt::Dataset& wine() {
  static const spcdt::Dataset d = spcdt::load_csv_file(data_path("wine.csv"));
  return d;
}
inline const spcdt::Dataset& wbc() {
  static const spcdt::Dataset d = spcdt::load_csv_file(data_path("wbc.csv"));
  return d;
}

// name: iris, wine, wbc_five_attr, wbc_full or wbc_split
inline spcdt::DecisionTree tree(const std::string& name) {
  return spcdt::parse_tree_text(read_text(data_path("trees/" + name + ".txt")));
}

inline spcdt::Dataset from_csv(const std::string& text, const spcdt::CsvOptions& options = {}) {
  std::istringstream in(text);
  return spcdt::load_csv(in, options);
}

}  // namespace fixtures
