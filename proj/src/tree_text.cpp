// Indented rule-listing format:
//
//   ucellsize < 2.5
//     bnuclei < 4.5 then class = benign (100.00 % of 200 cases)
//     bnuclei >= 4.5 then class = malignant (66.67 % of 6 cases)
//   ucellsize >= 2.5
//     ...
//
// Each split is written as a condition line, the subtree for that side, the
// complementary condition line and the other subtree. The pre-order shape
// makes the structure recoverable without relying on indentation, which is
// what lets flattened listings (bullets only) parse.

#include <charconv>
#include <cmath>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "spcdt/error.hpp"
#include "spcdt/tree.hpp"

namespace spcdt {

namespace {

constexpr std::string_view kGreaterEqualUtf8 = "\xE2\x89\xA5";  // ≥
constexpr std::string_view kLessEqualUtf8 = "\xE2\x89\xA4";     // ≤
constexpr std::string_view kBulletUtf8 = "\xE2\x80\xA2";        // •

struct Condition {
  std::string attribute;
  double threshold = 0.0;
  Branch branch = Branch::Low;
};

struct Line {
  std::size_t number = 0;
  std::optional<Condition> condition;
  std::optional<LeafNode> leaf;
};

std::string_view trim(std::string_view s) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string strip_markup(std::string_view raw) {
  std::string s(raw);
  for (std::size_t pos; (pos = s.find("**")) != std::string::npos;) s.erase(pos, 2);
  std::string_view v = trim(s);
  for (bool changed = true; changed;) {
    changed = false;
    if (!v.empty() && (v.front() == '-' || v.front() == '*' || v.front() == '|')) {
      v.remove_prefix(1);
      changed = true;
    } else if (v.substr(0, kBulletUtf8.size()) == kBulletUtf8) {
      v.remove_prefix(kBulletUtf8.size());
      changed = true;
    }
    v = trim(v);
  }
  return std::string(v);
}

double parse_decimal(std::string_view text, std::size_t line) {
  std::string s(trim(text));
  // Decimal comma ("2,5000") when no decimal point is present.
  if (s.find('.') == std::string::npos) {
    if (auto comma = s.find(','); comma != std::string::npos && s.find(',', comma + 1) == std::string::npos) {
      s[comma] = '.';
    }
  }
  std::string_view digits = s;
  if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size() || !std::isfinite(value)) {
    throw ParseError(fmt::format("unparseable number '{}'", text), line);
  }
  return value;
}

LeafNode parse_leaf(std::string_view text, std::size_t line) {
  static const std::regex annotated(
      R"(^class(e)?\s*=\s*(.+?)\s*\(\s*([0-9]+(?:[.,][0-9]*)?)\s*%\s*of\s*([0-9]+)\s*(examples|cases)\s*\)$)",
      std::regex::icase);
  static const std::regex bare(R"(^class(e)?\s*=\s*([^()]+?)$)", std::regex::icase);
  const std::string s(trim(text));
  std::smatch m;
  if (std::regex_match(s, m, annotated)) {
    LeafNode leaf;
    leaf.class_name = m[2].str();
    leaf.purity_pct = parse_decimal(m[3].str(), line);
    leaf.count = static_cast<std::size_t>(parse_decimal(m[4].str(), line));
    return leaf;
  }
  if (std::regex_match(s, m, bare)) return LeafNode{m[2].str(), 100.0, 0};
  throw ParseError(fmt::format("malformed leaf '{}'", s), line);
}

Condition parse_condition(std::string_view text, std::size_t line) {
  struct Op {
    std::string_view token;
    std::optional<Branch> branch;
  };
  // Longer tokens first so ">=" is not read as ">".
  static constexpr Op ops[] = {{">=", Branch::High},        {kGreaterEqualUtf8, Branch::High},
                               {"<=", std::nullopt},         {kLessEqualUtf8, std::nullopt},
                               {"<", Branch::Low},           {">", std::nullopt}};
  std::size_t best_pos = std::string_view::npos;
  const Op* best = nullptr;
  for (const Op& op : ops) {
    auto pos = text.find(op.token);
    if (pos < best_pos) {
      best_pos = pos;
      best = &op;
    }
  }
  if (!best) throw ParseError(fmt::format("expected a condition, found '{}'", trim(text)), line);
  if (!best->branch) {
    throw ParseError(fmt::format("unsupported operator '{}'; conditions use '<' and '>='", best->token), line);
  }
  Condition c;
  c.attribute = std::string(trim(text.substr(0, best_pos)));
  if (c.attribute.empty()) throw ParseError("condition without an attribute", line);
  c.threshold = parse_decimal(text.substr(best_pos + best->token.size()), line);
  c.branch = *best->branch;
  return c;
}

Line parse_line(std::string_view raw, std::size_t number) {
  const std::string s = strip_markup(raw);
  Line out;
  out.number = number;
  static const std::regex then_kw(R"((^|\s)then\s+)", std::regex::icase);
  std::smatch m;
  if (std::regex_search(s, m, then_kw)) {
    const std::string before = s.substr(0, static_cast<std::size_t>(m.position(0)));
    const std::string after = s.substr(static_cast<std::size_t>(m.position(0) + m.length(0)));
    if (!trim(before).empty()) out.condition = parse_condition(before, number);
    out.leaf = parse_leaf(after, number);
  } else {
    out.condition = parse_condition(s, number);
  }
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Line> lines) : lines_(std::move(lines)) {}

  DecisionTree parse() {
    if (lines_.empty()) throw ParseError("empty tree text");
    if (!lines_.front().condition) {
      if (lines_.size() > 1) throw ParseError("unexpected line after a leaf-only tree", lines_[1].number);
      const LeafNode& leaf = *lines_.front().leaf;
      return builder_.build(builder_.leaf(leaf.class_name, leaf.purity_pct, leaf.count));
    }
    const NodeId root = subtree();
    if (pos_ != lines_.size()) {
      throw ParseError("unexpected line after the complete tree", lines_[pos_].number);
    }
    return builder_.build(root);
  }

 private:
  // Body of one side of a split: either the leaf on the condition line or
  // the nested subtree that follows it.
  NodeId side(const Line& line) {
    if (line.leaf) return builder_.leaf(line.leaf->class_name, line.leaf->purity_pct, line.leaf->count);
    if (pos_ == lines_.size()) {
      throw ParseError(fmt::format("dangling condition on '{}' without subtree or leaf",
                                   line.condition->attribute),
                       line.number);
    }
    return subtree();
  }

  NodeId subtree() {
    const Line& first = lines_[pos_++];
    if (!first.condition) throw ParseError("leaf line where a condition was expected", first.number);
    const NodeId first_side = side(first);
    if (pos_ == lines_.size()) {
      throw ParseError(fmt::format("condition on '{}' has no complementary sibling",
                                   first.condition->attribute),
                       first.number);
    }
    const Line& second = lines_[pos_++];
    const Condition& a = *first.condition;
    if (!second.condition || second.condition->attribute != a.attribute ||
        second.condition->threshold != a.threshold || second.condition->branch == a.branch) {
      throw ParseError(fmt::format("sibling condition does not complement '{} {} {}'", a.attribute,
                                   a.branch == Branch::Low ? "<" : ">=", a.threshold),
                       second.number);
    }
    const NodeId second_side = side(second);
    return a.branch == Branch::Low ? builder_.split(a.attribute, a.threshold, first_side, second_side)
                                   : builder_.split(a.attribute, a.threshold, second_side, first_side);
  }

  std::vector<Line> lines_;
  std::size_t pos_ = 0;
  TreeBuilder builder_;
};

std::string format_threshold(double t) {
  std::string fixed = fmt::format("{:.4f}", t);
  double back = 0.0;
  std::from_chars(fixed.data(), fixed.data() + fixed.size(), back);
  return back == t ? fixed : fmt::format("{}", t);
}

void print_node(const DecisionTree& tree, NodeId id, int depth, std::string& out) {
  const SplitNode& s = tree.node(id).split();
  for (Branch b : {Branch::Low, Branch::High}) {
    const NodeId child = s.child(b);
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += fmt::format("{} {} {}", s.attribute, b == Branch::Low ? "<" : ">=", format_threshold(s.threshold));
    if (tree.is_leaf(child)) {
      const LeafNode& leaf = tree.node(child).leaf();
      out += fmt::format(" then class = {} ({:.2f} % of {} examples)\n", leaf.class_name, leaf.purity_pct,
                         leaf.count);
    } else {
      out += '\n';
      print_node(tree, child, depth + 1, out);
    }
  }
}

}  // namespace

DecisionTree parse_tree_text(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<Line> lines;
  std::size_t number = 0;
  while (!text.empty()) {
    ++number;
    auto nl = text.find('\n');
    std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (strip_markup(raw).empty()) continue;
    lines.push_back(parse_line(raw, number));
  }
  return Parser(std::move(lines)).parse();
}

std::string print_tree_text(const DecisionTree& tree) {
  std::string out;
  if (tree.is_leaf(tree.root())) {
    const LeafNode& leaf = tree.node(tree.root()).leaf();
    return fmt::format("then class = {} ({:.2f} % of {} examples)\n", leaf.class_name, leaf.purity_pct,
                       leaf.count);
  }
  print_node(tree, tree.root(), 0, out);
  return out;
}

}  // namespace spcdt
