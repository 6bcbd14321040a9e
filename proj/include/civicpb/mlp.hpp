#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "civicpb/features.hpp"

namespace civicpb {

// Two-layer dense classifier: leaky-ReLU hidden layer, dropout on that layer
// while training, softmax output, cross-entropy loss, Adam.
struct MlpConfig {
  std::size_t hidden_units = 32;
  std::size_t classes = kQolClasses;
  double leaky_slope = 0.01;
  double dropout = 0.5;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t epochs = 500;
  std::size_t batch_size = 32;
  // Biases are trainable and start at this value.
  double bias_init = 1.0;
  std::uint64_t seed = 0;

  bool operator==(const MlpConfig&) const = default;
};

struct MlpParams {
  Eigen::MatrixXd hidden_weights;  // hidden x input
  Eigen::VectorXd hidden_bias;
  Eigen::MatrixXd output_weights;  // classes x hidden
  Eigen::VectorXd output_bias;

  Eigen::Index input_dim() const { return hidden_weights.cols(); }
  Eigen::Index hidden_units() const { return hidden_weights.rows(); }
  Eigen::Index classes() const { return output_weights.rows(); }

  // Flat view used by the optimizer and the gradient checks.
  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& flat);
  static MlpParams zeros_like(const MlpParams& shape);
};

// Glorot-uniform weights, biases at config.bias_init.
MlpParams init_params(Eigen::Index input_dim, const MlpConfig& config, std::uint64_t seed);

// Softmax probabilities for each row of already-scaled inputs, no dropout.
Eigen::MatrixXd forward(const MlpParams& params, const Eigen::MatrixXd& x, double leaky_slope);

// Mean cross-entropy over the rows of x; targets are class indices 0..C-1.
// When `grad` is given it receives the analytic gradient. `dropout_mask`,
// when given, multiplies the hidden activations (rows x hidden).
double cross_entropy(const MlpParams& params, const Eigen::MatrixXd& x, const std::vector<int>& targets,
                     double leaky_slope, MlpParams* grad = nullptr, const Eigen::MatrixXd* dropout_mask = nullptr);

struct TrainedModel {
  MlpConfig config;
  MlpParams params;
  MinMaxScaler scaler;
  std::vector<std::string> feature_columns;
  double final_loss = 0.0;  // full training set, dropout off
  std::vector<double> epoch_loss;
};

// `x` must already be scaled by `scaler`; the scaler is stored with the
// model so predict_proba takes raw codes. Training is single-threaded and
// bit-reproducible for a given config.seed.
TrainedModel train(const FeatureMatrix& x, const MlpConfig& config, const MinMaxScaler& scaler);
TrainedModel train(const FeatureMatrix& x, const MlpConfig& config);

Eigen::VectorXd predict_proba(const TrainedModel& model, const Eigen::VectorXd& raw);
Eigen::MatrixXd predict_proba(const TrainedModel& model, const Eigen::MatrixXd& raw);

// Class label 1..C of the largest probability (first on ties).
int predict_class(const Eigen::VectorXd& probabilities);

}  // namespace civicpb
