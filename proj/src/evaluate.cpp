#include <algorithm>

#include <fmt/core.h>

#include "spcdt/tree.hpp"

namespace spcdt {

std::size_t EvaluationReport::row_sum(std::size_t actual) const {
  std::size_t sum = 0;
  for (std::size_t v : confusion.at(actual)) sum += v;
  return sum;
}

std::size_t EvaluationReport::column_sum(std::size_t predicted) const {
  std::size_t sum = 0;
  for (const auto& row : confusion) sum += row.at(predicted);
  return sum;
}

EvaluationReport evaluate(const DecisionTree& tree, const Dataset& dataset) {
  EvaluationReport report;
  report.classes = dataset.classes();
  for (NodeId leaf : tree.leaves()) {
    const std::string& name = tree.node(leaf).leaf().class_name;
    if (std::find(report.classes.begin(), report.classes.end(), name) == report.classes.end()) {
      report.classes.push_back(name);
    }
  }
  const std::size_t k = report.classes.size();
  auto index_of = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(report.classes.begin(), report.classes.end(), name) -
                                    report.classes.begin());
  };

  report.confusion.assign(k, std::vector<std::size_t>(k, 0));
  const TreeBinding binding(tree, dataset);
  for (const Case& c : dataset.cases()) {
    ++report.confusion[index_of(c.label)][index_of(predict(tree, binding, c).class_name)];
  }

  report.total = dataset.size();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < k; ++i) correct += report.confusion[i][i];
  report.errors = report.total - correct;
  report.error_rate = report.total == 0 ? 0.0
                                        : static_cast<double>(report.errors) / static_cast<double>(report.total);

  // Empty rows report recall 0; empty columns report 1-precision 0 (no false discoveries).
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t row = report.row_sum(i);
    const std::size_t col = report.column_sum(i);
    const double hit = static_cast<double>(report.confusion[i][i]);
    report.per_class.push_back({row == 0 ? 0.0 : hit / static_cast<double>(row),
                                col == 0 ? 0.0 : 1.0 - hit / static_cast<double>(col)});
  }
  return report;
}

std::string format_evaluation(const EvaluationReport& report) {
  const std::size_t k = report.classes.size();
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"Value", "Recall", "1-Precision"};
  for (const auto& name : report.classes) header.push_back(name);
  header.push_back("Sum");
  rows.push_back(header);
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::string> row{report.classes[i], fmt::format("{:.4f}", report.per_class[i].recall),
                                 fmt::format("{:.4f}", report.per_class[i].one_minus_precision)};
    for (std::size_t j = 0; j < k; ++j) row.push_back(std::to_string(report.confusion[i][j]));
    row.push_back(std::to_string(report.row_sum(i)));
    rows.push_back(row);
  }
  std::vector<std::string> sums{"Sum", "", ""};
  for (std::size_t j = 0; j < k; ++j) sums.push_back(std::to_string(report.column_sum(j)));
  sums.push_back(std::to_string(report.total));
  rows.push_back(sums);

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }

  std::string out = fmt::format("Error rate {:.4f}\n", report.error_rate);
  const std::size_t prediction_width = width[0] + width[1] + width[2] + 4;
  out += fmt::format("{:<{}}  Confusion matrix\n", "Values prediction", prediction_width);
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) line += "  ";
      line += fmt::format("{:<{}}", row[c], width[c]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + '\n';
  }
  return out;
}

}  // namespace spcdt
