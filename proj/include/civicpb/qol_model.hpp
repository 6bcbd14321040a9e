#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "civicpb/evaluation.hpp"
#include "civicpb/features.hpp"
#include "civicpb/mlp.hpp"
#include "civicpb/significance.hpp"
#include "civicpb/smote.hpp"

namespace civicpb {

enum class Sampling { None, Smote };

std::string_view to_string(Sampling sampling);
Sampling parse_sampling(std::string_view text);

struct ExperimentConfig {
  FeatureSet features = FeatureSet::SP;
  Sampling sampling = Sampling::Smote;
  MlpConfig mlp;
  double test_fraction = 0.2;
  std::size_t smote_neighbors = 5;
  std::uint64_t seed = 0;
};

struct ExperimentResult {
  TrainedModel model;
  EvalReport eval;
  std::size_t dropped_rows = 0;
  std::size_t test_rows = 0;
  std::array<std::size_t, kQolClasses> train_counts{};          // before oversampling
  std::array<std::size_t, kQolClasses> train_counts_sampled{};  // after
};

// Stratified split (seeded), min-max scaling fitted on the training split,
// optional SMOTE on the scaled training split only, training and evaluation
// on the untouched test split. Randomness comes from named substreams of
// config.seed: "split", "smote" and the trainer's own streams.
ExperimentResult run_experiment(const SurveyDataset& dataset, const ExperimentConfig& config);
ExperimentResult run_experiment(const FeatureMatrix& features, const ExperimentConfig& config);

}  // namespace civicpb
