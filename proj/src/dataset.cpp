#include "spcdt/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/core.h>

#include "spcdt/error.hpp"

namespace spcdt {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Comma-separated fields; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_fields(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"' && trim(current).empty()) {
      quoted = true;
      was_quoted = true;
      current.clear();
    } else if (c == ',') {
      fields.emplace_back(was_quoted ? current : std::string(trim(current)));
      current.clear();
      was_quoted = false;
    } else {
      current.push_back(c);
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line_no);
  fields.emplace_back(was_quoted ? current : std::string(trim(current)));
  return fields;
}

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() ||
      !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::string format_value(double v) {
  // Shortest representation that reads back to the same double.
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

Dataset::Dataset(std::vector<std::string> attribute_names, std::vector<Case> cases,
                 std::vector<std::string> classes,
                 const std::map<std::string, Interval>& declared_ranges)
    : cases_(std::move(cases)), classes_(std::move(classes)) {
  attributes_.reserve(attribute_names.size());
  for (std::size_t i = 0; i < attribute_names.size(); ++i) {
    AttributeMeta meta;
    meta.name = std::move(attribute_names[i]);
    meta.index = i;
    for (std::size_t j = 0; j < i; ++j) {
      if (attributes_[j].name == meta.name) {
        throw SchemaError(fmt::format("duplicate attribute '{}'", meta.name));
      }
    }
    attributes_.push_back(std::move(meta));
  }

  for (const auto& [name, range] : declared_ranges) {
    auto idx = find_attribute(name);
    if (!idx) throw SchemaError(fmt::format("declared range for unknown attribute '{}'", name));
    if (!(range.lo <= range.hi)) {
      throw SchemaError(fmt::format("declared range for '{}' is empty", name));
    }
    attributes_[*idx].declared_range = range;
  }

  std::vector<bool> seen(attributes_.size(), false);
  for (std::size_t id = 0; id < cases_.size(); ++id) {
    Case& c = cases_[id];
    c.id = id;
    if (c.values.size() != attributes_.size()) {
      throw SchemaError(fmt::format("case {} has {} values, expected {}", id, c.values.size(),
                                    attributes_.size()));
    }
    if (std::find(classes_.begin(), classes_.end(), c.label) == classes_.end()) {
      classes_.push_back(c.label);
    }
    for (std::size_t a = 0; a < attributes_.size(); ++a) {
      AttributeMeta& meta = attributes_[a];
      if (!c.values[a]) {
        ++meta.missing_count;
        continue;
      }
      double v = *c.values[a];
      if (!seen[a]) {
        meta.observed_min = meta.observed_max = v;
        seen[a] = true;
      } else {
        meta.observed_min = std::min(meta.observed_min, v);
        meta.observed_max = std::max(meta.observed_max, v);
      }
    }
  }

  for (std::size_t a = 0; a < attributes_.size(); ++a) {
    const AttributeMeta& meta = attributes_[a];
    if (seen[a] && meta.declared_range &&
        !(meta.declared_range->contains(meta.observed_min) &&
          meta.declared_range->contains(meta.observed_max))) {
      throw SchemaError(fmt::format("declared range [{}, {}] of '{}' does not contain observed [{}, {}]",
                                    meta.declared_range->lo, meta.declared_range->hi, meta.name,
                                    meta.observed_min, meta.observed_max));
    }
  }
}

std::optional<std::size_t> Dataset::find_attribute(std::string_view name) const {
  for (const auto& a : attributes_) {
    if (a.name == name) return a.index;
  }
  return std::nullopt;
}

std::size_t Dataset::attribute_index(std::string_view name) const {
  if (auto idx = find_attribute(name)) return *idx;
  throw NotFoundError(fmt::format("unknown attribute '{}'", name));
}

std::optional<std::size_t> Dataset::find_class(std::string_view name) const {
  auto it = std::find(classes_.begin(), classes_.end(), name);
  if (it == classes_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - classes_.begin());
}

Dataset Dataset::subset(const std::vector<std::size_t>& case_ids) const {
  std::vector<std::string> names;
  for (const auto& a : attributes_) names.push_back(a.name);
  std::vector<Case> picked;
  picked.reserve(case_ids.size());
  for (std::size_t id : case_ids) {
    if (id >= cases_.size()) throw NotFoundError(fmt::format("unknown case id {}", id));
    picked.push_back(cases_[id]);
  }
  return Dataset(std::move(names), std::move(picked), classes_, declared_ranges());
}

std::map<std::string, Interval> Dataset::declared_ranges() const {
  std::map<std::string, Interval> out;
  for (const auto& a : attributes_) {
    if (a.declared_range) out.emplace(a.name, *a.declared_range);
  }
  return out;
}

Dataset load_csv(std::istream& source, const CsvOptions& options) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(source, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_fields(line, line_no);
      break;
    }
  }
  if (header.empty()) throw ParseError("empty input");

  auto label_it = std::find(header.begin(), header.end(), options.label_column);
  if (label_it == header.end()) {
    throw SchemaError(fmt::format("unknown label column '{}'", options.label_column));
  }
  const std::size_t label_col = static_cast<std::size_t>(label_it - header.begin());

  std::vector<std::string> names;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i != label_col) names.push_back(header[i]);
  }

  std::vector<Case> cases;
  while (std::getline(source, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line, line_no);
    if (fields.size() != header.size()) {
      throw ParseError(fmt::format("expected {} fields, found {}", header.size(), fields.size()),
                       line_no);
    }
    Case c;
    c.row = cases.size();
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i == label_col) {
        c.label = fields[i];
        continue;
      }
      if (fields[i] == options.missing_token) {
        c.values.emplace_back(std::nullopt);
      } else if (auto v = parse_number(fields[i])) {
        c.values.emplace_back(*v);
      } else {
        throw ParseError(fmt::format("non-numeric value '{}' in column '{}'", fields[i], header[i]),
                         line_no);
      }
    }
    if (c.label.empty()) throw ParseError("empty class label", line_no);
    cases.push_back(std::move(c));
  }
  return Dataset(std::move(names), std::move(cases), {}, options.declared_ranges);
}

Dataset load_csv_file(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot read '{}'", path.string()));
  return load_csv(in, options);
}

void write_csv(std::ostream& out, const Dataset& dataset, std::string_view missing_token,
               std::string_view label_column) {
  for (const auto& a : dataset.attributes()) out << a.name << ',';
  out << label_column << '\n';
  for (const auto& c : dataset.cases()) {
    for (const auto& v : c.values) {
      if (v) {
        out << format_value(*v);
      } else {
        out << missing_token;
      }
      out << ',';
    }
    out << c.label << '\n';
  }
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double train_fraction,
                                  std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InputError(fmt::format("train fraction {} outside (0, 1)", train_fraction));
  }
  const std::size_t n = dataset.size();
  if (n == 0) throw InputError("cannot split an empty dataset");
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train == n) {
    throw InputError(fmt::format("train fraction {} leaves one side of a {}-case split empty",
                                 train_fraction, n));
  }

  // Fisher-Yates over mt19937_64 with rejection sampling: std::shuffle and
  // the std distributions are not specified bit-exactly across libraries.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::uint64_t bound = i + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw = rng();
    while (draw >= limit) draw = rng();
    std::swap(order[i], order[draw % bound]);
  }

  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> validation(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(train.begin(), train.end());
  std::sort(validation.begin(), validation.end());
  return {dataset.subset(train), dataset.subset(validation)};
}

Interval attribute_range(const Dataset& dataset, std::string_view attribute) {
  const AttributeMeta& meta = dataset.attributes()[dataset.attribute_index(attribute)];
  Interval range = meta.declared_range.value_or(Interval{meta.observed_min, meta.observed_max});
  if (range.width() <= 0.0) {
    range.lo -= kZeroWidthEpsilon;
    range.hi += kZeroWidthEpsilon;
  }
  return range;
}

}  // namespace spcdt
