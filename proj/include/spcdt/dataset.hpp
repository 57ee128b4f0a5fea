#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spcdt {

/// Closed real interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool operator==(const Interval&) const = default;
};

struct AttributeMeta {
  std::string name;
  std::size_t index = 0;
  double observed_min = 0.0;
  double observed_max = 0.0;
  std::optional<Interval> declared_range;
  std::size_t missing_count = 0;

  bool operator==(const AttributeMeta&) const = default;
};

/// A feature value; std::nullopt marks a missing entry.
using Value = std::optional<double>;

struct Case {
  std::size_t id = 0;   // dense within its dataset
  std::size_t row = 0;  // position in the originally loaded source
  std::vector<Value> values;
  std::string label;

  bool operator==(const Case&) const = default;
};

/// Labeled numeric table. Immutable once built; observed ranges and the
/// class list are computed at construction.
class Dataset {
 public:
  Dataset() = default;

  /// Builds a dataset from raw cases. Case ids are reassigned densely in
  /// order; `classes` fixes the class order, and labels not in it are
  /// appended in order of first appearance.
  Dataset(std::vector<std::string> attribute_names, std::vector<Case> cases,
          std::vector<std::string> classes = {},
          const std::map<std::string, Interval>& declared_ranges = {});

  const std::vector<AttributeMeta>& attributes() const { return attributes_; }
  const std::vector<Case>& cases() const { return cases_; }
  const std::vector<std::string>& classes() const { return classes_; }

  std::size_t size() const { return cases_.size(); }
  bool empty() const { return cases_.empty(); }

  std::optional<std::size_t> find_attribute(std::string_view name) const;
  /// Throws NotFoundError for unknown names.
  std::size_t attribute_index(std::string_view name) const;
  std::optional<std::size_t> find_class(std::string_view name) const;

  /// Subset with the same schema, class list and declared ranges.
  Dataset subset(const std::vector<std::size_t>& case_ids) const;

  std::map<std::string, Interval> declared_ranges() const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<AttributeMeta> attributes_;
  std::vector<Case> cases_;
  std::vector<std::string> classes_;
};

struct CsvOptions {
  std::string label_column = "class";
  std::string missing_token = "?";
  std::map<std::string, Interval> declared_ranges;
};

Dataset load_csv(std::istream& source, const CsvOptions& options = {});
Dataset load_csv_file(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes a header row, the feature columns and the label as the last column.
void write_csv(std::ostream& out, const Dataset& dataset, std::string_view missing_token = "?",
               std::string_view label_column = "class");

/// Plain shuffled (unstratified) split; |train| = round(train_fraction * N).
std::pair<Dataset, Dataset> split(const Dataset& dataset, double train_fraction,
                                  std::uint64_t seed);

/// Half-width used when an attribute range has zero width.
inline constexpr double kZeroWidthEpsilon = 0.5;

/// Declared range if present, else the observed one; zero-width ranges are
/// widened by kZeroWidthEpsilon on each side.
Interval attribute_range(const Dataset& dataset, std::string_view attribute);

}  // namespace spcdt
