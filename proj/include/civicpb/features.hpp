#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "civicpb/survey.hpp"

namespace civicpb {

inline constexpr int kQolClasses = 4;

// S: satisfaction codes q02-q12, P: participation codes q13-q18, SP: both.
enum class FeatureSet { S, P, SP };

std::string_view to_string(FeatureSet set);
FeatureSet parse_feature_set(std::string_view text);

struct FeatureMatrix {
  FeatureSet feature_set = FeatureSet::SP;
  std::vector<std::string> columns;
  Eigen::MatrixXd values;   // rows x columns
  std::vector<int> labels;  // merged QoL class, 1..4
  std::vector<std::string> ids;
  std::size_t dropped = 0;  // rows with a blank selected feature

  std::size_t rows() const { return labels.size(); }
  FeatureMatrix subset(const std::vector<std::size_t>& rows) const;
};

// Rows with any blank selected item are dropped and counted. Codes (0
// included) are used as-is.
FeatureMatrix build_features(const SurveyDataset& dataset, FeatureSet set);

std::array<std::size_t, kQolClasses> class_counts(const std::vector<int>& labels);

// Per-column min-max scaling. Constant columns map to 0.
struct MinMaxScaler {
  Eigen::VectorXd min;
  Eigen::VectorXd max;

  static MinMaxScaler fit(const Eigen::MatrixXd& x);
  static MinMaxScaler identity(Eigen::Index dim);
  Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd transform_row(const Eigen::VectorXd& x) const;
  Eigen::Index dim() const { return min.size(); }
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Stratified by label; each class contributes round(fraction * size) rows to
// the test side while keeping at least one row for training.
Split stratified_split(const std::vector<int>& labels, double test_fraction, std::uint64_t seed);

}  // namespace civicpb
