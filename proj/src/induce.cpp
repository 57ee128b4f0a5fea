#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "spcdt/error.hpp"

#include "spcdt/tree.hpp"

namespace spcdt {

namespace {

double entropy(const std::vector<std::size_t>& counts, std::size_t total) {
  if (total == 0) return 0.0;
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

struct Candidate {
  std::size_t attribute = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

class Inducer {
 public:
  Inducer(const Dataset& data, const InduceParams& params) : data_(data), params_(params) {
    for (const Case& c : data.cases()) label_.push_back(*data.find_class(c.label));
  }

  NodeId grow(const std::vector<std::size_t>& cases, std::size_t depth) {
    const auto counts = class_counts(cases);
    const std::size_t majority =
        static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    const std::size_t nonzero =
        static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }));

    auto make_leaf = [&] {
      const double purity = cases.empty() ? 100.0
                                          : 100.0 * static_cast<double>(counts[majority]) /
                                                static_cast<double>(cases.size());
      return builder_.leaf(data_.classes()[majority], purity, cases.size());
    };

    if (nonzero <= 1 || cases.size() < 2 * params_.min_leaf || depth >= params_.max_depth) return make_leaf();

    const auto best = best_split(cases, counts);
    if (!best || best->gain < params_.min_gain) return make_leaf();

    std::vector<std::size_t> low;
    std::vector<std::size_t> high;
    std::vector<std::size_t> missing;
    for (std::size_t id : cases) {
      const Value& v = data_.cases()[id].values[best->attribute];
      if (!v) {
        missing.push_back(id);
      } else if (branch_for(*v, best->threshold) == Branch::Low) {
        low.push_back(id);
      } else {
        high.push_back(id);
      }
    }
    // Missing values follow the larger side, matching prediction.
    auto& sink = high.size() > low.size() ? high : low;
    sink.insert(sink.end(), missing.begin(), missing.end());
    std::sort(sink.begin(), sink.end());

    const NodeId low_id = grow(low, depth + 1);
    const NodeId high_id = grow(high, depth + 1);
    return builder_.split(data_.attributes()[best->attribute].name, best->threshold, low_id, high_id);
  }

  DecisionTree build(NodeId root) const { return builder_.build(root); }

 private:
  std::vector<std::size_t> class_counts(const std::vector<std::size_t>& cases) const {
    std::vector<std::size_t> counts(data_.classes().size(), 0);
    for (std::size_t id : cases) ++counts[label_[id]];
    return counts;
  }

  std::optional<Candidate> best_split(const std::vector<std::size_t>& cases,
                                      const std::vector<std::size_t>& parent_counts) const {
    const std::size_t n = cases.size();
    const double parent_h = entropy(parent_counts, n);
    const std::size_t k = parent_counts.size();
    std::optional<Candidate> best;

    for (std::size_t a = 0; a < data_.attributes().size(); ++a) {
      std::vector<std::pair<double, std::size_t>> known;
      std::vector<std::size_t> missing_counts(k, 0);
      for (std::size_t id : cases) {
        if (const Value& v = data_.cases()[id].values[a]) {
          known.emplace_back(*v, id);
        } else {
          ++missing_counts[label_[id]];
        }
      }
      std::sort(known.begin(), known.end());
      const std::size_t n_missing = n - known.size();

      std::vector<std::size_t> low_counts(k, 0);
      std::vector<std::size_t> known_counts(k, 0);
      for (const auto& [v, id] : known) ++known_counts[label_[id]];

      for (std::size_t i = 0; i + 1 < known.size(); ++i) {
        ++low_counts[label_[known[i].second]];
        const double lo = known[i].first;
        const double hi = known[i + 1].first;
        if (!(lo < hi)) continue;
        double threshold = lo + (hi - lo) / 2.0;
        if (!(lo < threshold)) threshold = hi;

        const std::size_t n_low_known = i + 1;
        const std::size_t n_high_known = known.size() - n_low_known;
        const bool missing_high = n_high_known > n_low_known;
        std::vector<std::size_t> lc = low_counts;
        std::vector<std::size_t> hc(k);
        for (std::size_t c = 0; c < k; ++c) {
          hc[c] = known_counts[c] - low_counts[c];
          (missing_high ? hc : lc)[c] += missing_counts[c];
        }
        const std::size_t n_low = n_low_known + (missing_high ? 0 : n_missing);
        const std::size_t n_high = n - n_low;
        if (n_low < params_.min_leaf || n_high < params_.min_leaf) continue;

        const double gain = parent_h -
                            static_cast<double>(n_low) / static_cast<double>(n) * entropy(lc, n_low) -
                            static_cast<double>(n_high) / static_cast<double>(n) * entropy(hc, n_high);
        if (!best || gain > best->gain + kGainTieTolerance) best = Candidate{a, threshold, gain};
      }
    }
    return best;
  }

  const Dataset& data_;
  InduceParams params_;
  std::vector<std::size_t> label_;
  TreeBuilder builder_;
};

}  // namespace

DecisionTree induce_id3(const Dataset& train, const InduceParams& params) {
  if (train.empty()) throw InputError("cannot induce a tree from an empty dataset");
  InduceParams p = params;
  p.min_leaf = std::max<std::size_t>(p.min_leaf, 1);
  Inducer inducer(train, p);
  std::vector<std::size_t> all(train.size());
  std::iota(all.begin(), all.end(), 0);
  return inducer.build(inducer.grow(all, 0));
}

}  // namespace spcdt
