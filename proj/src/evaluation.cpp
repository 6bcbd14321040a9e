#include "civicpb/evaluation.hpp"

#include <algorithm>
#include <numeric>

#include "civicpb/errors.hpp"

namespace civicpb {

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const char> positive) {
  if (scores.size() != positive.size()) throw DataError("scores and labels differ in length");
  const auto pos = static_cast<std::size_t>(std::count_if(positive.begin(), positive.end(), [](char p) { return p != 0; }));
  const std::size_t neg = scores.size() - pos;
  if (pos == 0 || neg == 0) throw DataError("ROC needs both positive and negative rows");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<RocPoint> roc;
  roc.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (positive[order[i]]) {
      ++tp;
    } else {
      ++fp;
    }
    // Tied scores move together.
    if (i + 1 < order.size() && scores[order[i + 1]] == scores[order[i]]) continue;
    roc.push_back({static_cast<double>(fp) / static_cast<double>(neg), static_cast<double>(tp) / static_cast<double>(pos),
                   scores[order[i]]});
  }
  return roc;
}

double auc_trapezoid(const std::vector<RocPoint>& roc) {
  double area = 0.0;
  for (std::size_t i = 1; i < roc.size(); ++i) {
    area += 0.5 * (roc[i].fpr - roc[i - 1].fpr) * (roc[i].tpr + roc[i - 1].tpr);
  }
  return area;
}

EvalReport evaluate_probabilities(const Eigen::MatrixXd& probabilities, const std::vector<int>& labels) {
  if (labels.empty()) throw DataError("evaluation set is empty");
  if (probabilities.rows() != static_cast<Eigen::Index>(labels.size()) || probabilities.cols() != kQolClasses) {
    throw DataError("probability matrix must be rows x 4");
  }
  EvalReport report;
  report.samples = labels.size();
  std::vector<int> predicted(labels.size());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    predicted[i] = predict_class(probabilities.row(static_cast<Eigen::Index>(i)).transpose());
    if (labels[i] < 1 || labels[i] > kQolClasses) throw DataError("label out of range");
    ++report.confusion[static_cast<std::size_t>(labels[i] - 1)][static_cast<std::size_t>(predicted[i] - 1)];
    if (predicted[i] == labels[i]) ++correct;
  }
  const double n = static_cast<double>(labels.size());
  report.accuracy = static_cast<double>(correct) / n;

  double recall_sum = 0.0;
  double precision_sum = 0.0;
  double auc_sum = 0.0;
  std::size_t defined = 0;
  std::size_t auc_defined = 0;
  for (int c = 1; c <= kQolClasses; ++c) {
    auto& m = report.classes[static_cast<std::size_t>(c - 1)];
    m.label = c;
    const auto idx = static_cast<std::size_t>(c - 1);
    std::size_t tp = report.confusion[idx][idx];
    for (std::size_t t = 0; t < kQolClasses; ++t) {
      m.support += report.confusion[idx][t];
      m.predicted += report.confusion[t][idx];
    }
    if (m.support == 0) {
      report.notes.push_back("class " + std::to_string(c) + " has no test support; metrics undefined and excluded from averages");
      continue;
    }
    const std::size_t fp = m.predicted - tp;
    const std::size_t fn = m.support - tp;
    const std::size_t tn = labels.size() - tp - fp - fn;
    m.recall = static_cast<double>(tp) / static_cast<double>(m.support);
    m.precision = m.predicted ? static_cast<double>(tp) / static_cast<double>(m.predicted) : 0.0;
    m.accuracy = static_cast<double>(tp + tn) / n;
    recall_sum += *m.recall;
    precision_sum += *m.precision;
    ++defined;

    if (m.support == labels.size()) {
      report.notes.push_back("class " + std::to_string(c) + " has no negatives; ROC undefined");
      continue;
    }
    std::vector<double> scores(labels.size());
    std::vector<char> positive(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      scores[i] = probabilities(static_cast<Eigen::Index>(i), c - 1);
      positive[i] = labels[i] == c;
    }
    m.roc = roc_curve(scores, positive);
    m.auc = auc_trapezoid(m.roc);
    auc_sum += *m.auc;
    ++auc_defined;
  }
  if (defined) {
    report.recall = recall_sum / static_cast<double>(defined);
    report.precision = precision_sum / static_cast<double>(defined);
  }
  if (auc_defined) report.macro_auc = auc_sum / static_cast<double>(auc_defined);
  return report;
}

EvalReport evaluate(const TrainedModel& model, const FeatureMatrix& test) {
  return evaluate_probabilities(predict_proba(model, test.values), test.labels);
}

}  // namespace civicpb
