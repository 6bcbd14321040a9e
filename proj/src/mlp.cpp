#include "civicpb/mlp.hpp"

#include <cmath>
#include <numeric>

#include "civicpb/errors.hpp"
#include "civicpb/rng.hpp"

namespace civicpb {

Eigen::VectorXd MlpParams::flatten() const {
  Eigen::VectorXd flat(hidden_weights.size() + hidden_bias.size() + output_weights.size() + output_bias.size());
  Eigen::Index at = 0;
  auto put = [&](const auto& m) {
    flat.segment(at, m.size()) = Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
    at += m.size();
  };
  put(hidden_weights);
  put(hidden_bias);
  put(output_weights);
  put(output_bias);
  return flat;
}

void MlpParams::unflatten(const Eigen::VectorXd& flat) {
  Eigen::Index at = 0;
  auto get = [&](auto& m) {
    Eigen::Map<Eigen::VectorXd>(m.data(), m.size()) = flat.segment(at, m.size());
    at += m.size();
  };
  get(hidden_weights);
  get(hidden_bias);
  get(output_weights);
  get(output_bias);
}

MlpParams MlpParams::zeros_like(const MlpParams& shape) {
  return {Eigen::MatrixXd::Zero(shape.hidden_weights.rows(), shape.hidden_weights.cols()),
          Eigen::VectorXd::Zero(shape.hidden_bias.size()),
          Eigen::MatrixXd::Zero(shape.output_weights.rows(), shape.output_weights.cols()),
          Eigen::VectorXd::Zero(shape.output_bias.size())};
}

MlpParams init_params(Eigen::Index input_dim, const MlpConfig& config, std::uint64_t seed) {
  if (input_dim < 1 || config.hidden_units < 1 || config.classes < 2) throw ConfigError("invalid network shape");
  const auto hidden = static_cast<Eigen::Index>(config.hidden_units);
  const auto classes = static_cast<Eigen::Index>(config.classes);
  Rng rng(seed);
  auto glorot = [&](Eigen::Index rows, Eigen::Index cols) {
    const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Eigen::MatrixXd w(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) w(i, j) = (2.0 * rng.uniform() - 1.0) * a;
    }
    return w;
  };
  MlpParams p;
  p.hidden_weights = glorot(hidden, input_dim);
  p.hidden_bias = Eigen::VectorXd::Constant(hidden, config.bias_init);
  p.output_weights = glorot(classes, hidden);
  p.output_bias = Eigen::VectorXd::Constant(classes, config.bias_init);
  return p;
}

namespace {

Eigen::MatrixXd leaky(const Eigen::MatrixXd& z, double slope) {
  return z.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
}

// Row-wise log-softmax.
Eigen::MatrixXd log_softmax(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd out(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double m = z.row(i).maxCoeff();
    const double lse = m + std::log((z.row(i).array() - m).exp().sum());
    out.row(i) = z.row(i).array() - lse;
  }
  return out;
}

}  // namespace

Eigen::MatrixXd forward(const MlpParams& params, const Eigen::MatrixXd& x, double leaky_slope) {
  if (x.cols() != params.input_dim()) throw DataError("input dimension mismatch");
  Eigen::MatrixXd pre = (x * params.hidden_weights.transpose()).rowwise() + params.hidden_bias.transpose();
  Eigen::MatrixXd z = (leaky(pre, leaky_slope) * params.output_weights.transpose()).rowwise() +
                      params.output_bias.transpose();
  return log_softmax(z).array().exp();
}

double cross_entropy(const MlpParams& params, const Eigen::MatrixXd& x, const std::vector<int>& targets,
                     double leaky_slope, MlpParams* grad, const Eigen::MatrixXd* dropout_mask) {
  const Eigen::Index rows = x.rows();
  if (rows == 0 || static_cast<std::size_t>(rows) != targets.size()) throw DataError("batch/target size mismatch");
  if (x.cols() != params.input_dim()) throw DataError("input dimension mismatch");

  Eigen::MatrixXd pre = (x * params.hidden_weights.transpose()).rowwise() + params.hidden_bias.transpose();
  Eigen::MatrixXd hidden = leaky(pre, leaky_slope);
  if (dropout_mask) hidden.array() *= dropout_mask->array();
  Eigen::MatrixXd z = (hidden * params.output_weights.transpose()).rowwise() + params.output_bias.transpose();
  Eigen::MatrixXd logp = log_softmax(z);

  double loss = 0.0;
  for (Eigen::Index i = 0; i < rows; ++i) loss -= logp(i, targets[static_cast<std::size_t>(i)]);
  const double inv = 1.0 / static_cast<double>(rows);
  loss *= inv;
  if (!grad) return loss;

  Eigen::MatrixXd dz = logp.array().exp();
  for (Eigen::Index i = 0; i < rows; ++i) dz(i, targets[static_cast<std::size_t>(i)]) -= 1.0;
  dz *= inv;
  grad->output_weights = dz.transpose() * hidden;
  grad->output_bias = dz.colwise().sum().transpose();
  Eigen::MatrixXd dh = dz * params.output_weights;
  if (dropout_mask) dh.array() *= dropout_mask->array();
  Eigen::MatrixXd dpre = dh.array() * pre.unaryExpr([leaky_slope](double v) { return v > 0.0 ? 1.0 : leaky_slope; }).array();
  grad->hidden_weights = dpre.transpose() * x;
  grad->hidden_bias = dpre.colwise().sum().transpose();
  return loss;
}

namespace {

std::vector<int> to_targets(const std::vector<int>& labels, std::size_t classes) {
  std::vector<int> t(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 1 || static_cast<std::size_t>(labels[i]) > classes) {
      throw DataError("label " + std::to_string(labels[i]) + " outside 1.." + std::to_string(classes));
    }
    t[i] = labels[i] - 1;
  }
  return t;
}

}  // namespace

TrainedModel train(const FeatureMatrix& x, const MlpConfig& config, const MinMaxScaler& scaler) {
  if (x.rows() == 0) throw DataError("training set is empty");
  if (scaler.dim() != x.values.cols()) throw DataError("scaler does not match the feature columns");
  if (config.batch_size < 1 || config.epochs < 1) throw ConfigError("epochs and batch_size must be positive");
  if (!(config.dropout >= 0.0 && config.dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
  const auto targets = to_targets(x.labels, config.classes);
  {
    std::vector<bool> seen(config.classes, false);
    for (int t : targets) seen[static_cast<std::size_t>(t)] = true;
    if (std::count(seen.begin(), seen.end(), true) < 2) throw DataError("training needs >= 2 classes");
  }

  TrainedModel model;
  model.config = config;
  model.scaler = scaler;
  model.feature_columns = x.columns;
  model.params = init_params(x.values.cols(), config, substream_seed(config.seed, "init"));

  Rng batch_rng(substream_seed(config.seed, "batching"));
  Rng dropout_rng(substream_seed(config.seed, "dropout"));

  Eigen::VectorXd theta = model.params.flatten();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(theta.size());
  MlpParams grad = MlpParams::zeros_like(model.params);
  double beta1_t = 1.0;
  double beta2_t = 1.0;
  const double keep = 1.0 - config.dropout;
  const auto hidden = static_cast<Eigen::Index>(config.hidden_units);

  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    batch_rng.shuffle(order.begin(), order.end());
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const auto b = static_cast<Eigen::Index>(end - start);
      Eigen::MatrixXd xb(b, x.values.cols());
      std::vector<int> tb(static_cast<std::size_t>(b));
      for (Eigen::Index i = 0; i < b; ++i) {
        const auto row = order[start + static_cast<std::size_t>(i)];
        xb.row(i) = x.values.row(static_cast<Eigen::Index>(row));
        tb[static_cast<std::size_t>(i)] = targets[row];
      }
      Eigen::MatrixXd mask(b, hidden);
      for (Eigen::Index j = 0; j < hidden; ++j) {
        for (Eigen::Index i = 0; i < b; ++i) mask(i, j) = dropout_rng.uniform() < keep ? 1.0 / keep : 0.0;
      }
      const double loss = cross_entropy(model.params, xb, tb, config.leaky_slope, &grad, &mask);
      if (!std::isfinite(loss)) {
        throw ComputeError("training diverged: non-finite loss at epoch " + std::to_string(epoch + 1));
      }
      epoch_loss += loss * static_cast<double>(b);

      const Eigen::VectorXd g = grad.flatten();
      beta1_t *= config.beta1;
      beta2_t *= config.beta2;
      m = config.beta1 * m + (1.0 - config.beta1) * g;
      v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseProduct(g);
      const Eigen::ArrayXd m_hat = m.array() / (1.0 - beta1_t);
      const Eigen::ArrayXd v_hat = v.array() / (1.0 - beta2_t);
      theta.array() -= config.learning_rate * m_hat / (v_hat.sqrt() + config.epsilon);
      model.params.unflatten(theta);
    }
    model.epoch_loss.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  model.final_loss = cross_entropy(model.params, x.values, targets, config.leaky_slope);
  if (!std::isfinite(model.final_loss) || !theta.allFinite()) {
    throw ComputeError("training diverged: non-finite parameters or loss");
  }
  return model;
}

TrainedModel train(const FeatureMatrix& x, const MlpConfig& config) {
  return train(x, config, MinMaxScaler::identity(x.values.cols()));
}

Eigen::MatrixXd predict_proba(const TrainedModel& model, const Eigen::MatrixXd& raw) {
  if (raw.cols() != model.params.input_dim()) {
    throw DataError("feature row has " + std::to_string(raw.cols()) + " columns, model expects " +
                    std::to_string(model.params.input_dim()));
  }
  return forward(model.params, model.scaler.transform(raw), model.config.leaky_slope);
}

Eigen::VectorXd predict_proba(const TrainedModel& model, const Eigen::VectorXd& raw) {
  Eigen::MatrixXd row = raw.transpose();
  return predict_proba(model, row).row(0).transpose();
}

int predict_class(const Eigen::VectorXd& probabilities) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < probabilities.size(); ++i) {
    if (probabilities(i) > probabilities(best)) best = i;
  }
  return static_cast<int>(best) + 1;
}

}  // namespace civicpb
