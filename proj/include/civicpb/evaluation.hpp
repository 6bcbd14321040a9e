#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "civicpb/features.hpp"
#include "civicpb/mlp.hpp"

namespace civicpb {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // score at or above which a row is called positive
};

// Sweeps the threshold over the distinct scores, highest first, starting at
// (0, 0) and ending at (1, 1). Needs at least one positive and one negative.
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const char> positive);
double auc_trapezoid(const std::vector<RocPoint>& roc);

// One-vs-rest metrics for a single class. Undefined (nullopt) when the class
// has no support in the evaluation set.
struct ClassMetrics {
  int label = 0;
  std::size_t support = 0;
  std::size_t predicted = 0;
  std::optional<double> recall;
  std::optional<double> precision;  // 0 when the class is never predicted
  std::optional<double> accuracy;   // one-vs-rest
  std::optional<double> auc;
  std::vector<RocPoint> roc;
};

struct EvalReport {
  std::size_t samples = 0;
  std::array<ClassMetrics, kQolClasses> classes{};
  // confusion[true][predicted], class labels 1..4 at index label - 1
  std::array<std::array<std::size_t, kQolClasses>, kQolClasses> confusion{};
  double accuracy = 0.0;               // fraction predicted correctly
  std::optional<double> recall;        // macro over classes with support
  std::optional<double> precision;     // macro over classes with support
  std::optional<double> macro_auc;
  std::vector<std::string> notes;
};

// `probabilities` is rows x 4, labels are 1..4.
EvalReport evaluate_probabilities(const Eigen::MatrixXd& probabilities, const std::vector<int>& labels);
EvalReport evaluate(const TrainedModel& model, const FeatureMatrix& test);

}  // namespace civicpb
