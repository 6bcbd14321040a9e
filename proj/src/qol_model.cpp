#include "civicpb/qol_model.hpp"

#include "civicpb/errors.hpp"
#include "civicpb/rng.hpp"

namespace civicpb {

std::string_view to_string(Sampling sampling) { return sampling == Sampling::Smote ? "smote" : "none"; }

Sampling parse_sampling(std::string_view text) {
  if (text == "none") return Sampling::None;
  if (text == "smote") return Sampling::Smote;
  throw ConfigError("unknown sampling '" + std::string(text) + "' (expected none|smote)");
}

ExperimentResult run_experiment(const FeatureMatrix& features, const ExperimentConfig& config) {
  if (features.rows() == 0) throw DataError("no complete feature rows");
  const auto split = stratified_split(features.labels, config.test_fraction, substream_seed(config.seed, "split"));
  if (split.test.empty()) throw DataError("test split is empty");

  auto train_set = features.subset(split.train);
  const auto test_set = features.subset(split.test);
  const auto scaler = MinMaxScaler::fit(train_set.values);
  train_set.values = scaler.transform(train_set.values);

  ExperimentResult result;
  result.dropped_rows = features.dropped;
  result.test_rows = test_set.rows();
  result.train_counts = class_counts(train_set.labels);
  if (config.sampling == Sampling::Smote) {
    train_set = smote_oversample(train_set, config.smote_neighbors, substream_seed(config.seed, "smote"));
  }
  result.train_counts_sampled = class_counts(train_set.labels);

  MlpConfig mlp = config.mlp;
  mlp.seed = config.seed;
  result.model = train(train_set, mlp, scaler);
  result.eval = evaluate(result.model, test_set);
  return result;
}

ExperimentResult run_experiment(const SurveyDataset& dataset, const ExperimentConfig& config) {
  return run_experiment(build_features(dataset, config.features), config);
}

}  // namespace civicpb
