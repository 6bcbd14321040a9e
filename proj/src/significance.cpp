#include "civicpb/significance.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/special_functions/gamma.hpp>

#include "civicpb/errors.hpp"

namespace civicpb {

namespace {

constexpr int kMaxIterations = 100;
// On standardized inputs a coefficient this large means fitted probabilities
// are saturating.
constexpr double kSeparationBound = 25.0;

double log_likelihood(const Eigen::MatrixXd& design, const std::vector<int>& targets, const Eigen::MatrixXd& coef,
                      Eigen::MatrixXd* probs) {
  const Eigen::Index n = design.rows();
  const Eigen::Index k = coef.rows() + 1;
  Eigen::MatrixXd eta = Eigen::MatrixXd::Zero(n, k);
  eta.leftCols(k - 1) = design * coef.transpose();
  double ll = 0.0;
  if (probs) probs->resize(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = eta.row(i).maxCoeff();
    const double lse = m + std::log((eta.row(i).array() - m).exp().sum());
    ll += eta(i, targets[static_cast<std::size_t>(i)]) - lse;
    if (probs) probs->row(i) = (eta.row(i).array() - lse).exp();
  }
  return ll;
}

}  // namespace

LogitFit fit_multinomial_logit(const Eigen::MatrixXd& design, const std::vector<int>& targets, int classes) {
  if (classes < 2) throw DataError("logit fit needs >= 2 classes");
  const Eigen::Index n = design.rows();
  const Eigen::Index p = design.cols();
  const Eigen::Index free = classes - 1;
  const Eigen::Index dim = free * p;

  LogitFit fit;
  fit.coefficients = Eigen::MatrixXd::Zero(free, p);
  Eigen::MatrixXd probs;
  double ll = log_likelihood(design, targets, fit.coefficients, &probs);

  Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(n, classes);
  for (Eigen::Index i = 0; i < n; ++i) onehot(i, targets[static_cast<std::size_t>(i)]) = 1.0;

  for (fit.iterations = 1; fit.iterations <= kMaxIterations; ++fit.iterations) {
    Eigen::VectorXd grad(dim);
    Eigen::MatrixXd info(dim, dim);
    for (Eigen::Index c = 0; c < free; ++c) {
      grad.segment(c * p, p) = design.transpose() * (onehot.col(c) - probs.col(c));
      for (Eigen::Index d = c; d < free; ++d) {
        Eigen::VectorXd w = probs.col(c).cwiseProduct((c == d ? 1.0 : 0.0) * Eigen::VectorXd::Ones(n) - probs.col(d));
        Eigen::MatrixXd block = design.transpose() * w.asDiagonal() * design;
        info.block(c * p, d * p, p, p) = block;
        info.block(d * p, c * p, p, p) = block.transpose();
      }
    }
    const double ridge = 1e-9 * (1.0 + info.diagonal().cwiseAbs().maxCoeff());
    info.diagonal().array() += ridge;
    Eigen::VectorXd step = info.ldlt().solve(grad);
    if (!step.allFinite()) break;

    Eigen::MatrixXd trial;
    double trial_ll = ll;
    Eigen::MatrixXd trial_probs;
    double t = 1.0;
    for (int halvings = 0; halvings < 40; ++halvings, t *= 0.5) {
      trial = fit.coefficients;
      for (Eigen::Index c = 0; c < free; ++c) trial.row(c) += t * step.segment(c * p, p).transpose();
      trial_ll = log_likelihood(design, targets, trial, &trial_probs);
      if (std::isfinite(trial_ll) && trial_ll >= ll) break;
    }
    if (!(std::isfinite(trial_ll) && trial_ll >= ll)) {
      fit.converged = true;  // no ascent direction left
      break;
    }
    const double improvement = trial_ll - ll;
    fit.coefficients = trial;
    probs = trial_probs;
    ll = trial_ll;
    if (improvement < 1e-10 * (1.0 + std::abs(ll))) {
      fit.converged = true;
      break;
    }
  }
  fit.log_likelihood = ll;
  fit.separated = fit.coefficients.cwiseAbs().maxCoeff() > kSeparationBound;
  return fit;
}

double chi_squared_sf(double statistic, double dof) {
  if (!(dof > 0.0)) throw DataError("chi-squared needs positive degrees of freedom");
  if (!(statistic > 0.0)) return 1.0;
  return boost::math::gamma_q(dof / 2.0, statistic / 2.0);
}

const FeatureSignificance* SignificanceReport::find(std::string_view feature) const {
  for (const auto& f : features) {
    if (f.feature == feature) return &f;
  }
  return nullptr;
}

SignificanceReport feature_significance(const FeatureMatrix& x) {
  if (x.rows() == 0) throw DataError("significance needs a nonempty feature matrix");

  // Relabel the classes present to 0..K-1; the last one is the reference.
  std::map<int, int> remap;
  for (int l : x.labels) remap.emplace(l, 0);
  if (remap.size() < 2) throw DataError("significance needs >= 2 classes");
  int next = 0;
  for (auto& [label, idx] : remap) idx = next++;
  std::vector<int> targets(x.labels.size());
  for (std::size_t i = 0; i < targets.size(); ++i) targets[i] = remap.at(x.labels[i]);
  const int classes = static_cast<int>(remap.size());

  const Eigen::Index n = x.values.rows();
  std::vector<Eigen::Index> active;
  Eigen::MatrixXd standardized(n, x.values.cols());
  for (Eigen::Index j = 0; j < x.values.cols(); ++j) {
    const double mean = x.values.col(j).mean();
    const double var = (x.values.col(j).array() - mean).square().sum() / static_cast<double>(n);
    if (var > 1e-12) {
      standardized.col(j) = (x.values.col(j).array() - mean) / std::sqrt(var);
      active.push_back(j);
    }
  }

  auto design_without = [&](Eigen::Index skip) {
    Eigen::MatrixXd d(n, 1 + static_cast<Eigen::Index>(active.size()) - (skip >= 0 ? 1 : 0));
    d.col(0).setOnes();
    Eigen::Index c = 1;
    for (auto j : active) {
      if (j == skip) continue;
      d.col(c++) = standardized.col(j);
    }
    return d;
  };

  SignificanceReport report;
  report.samples = x.rows();
  report.classes = classes;
  const auto full = fit_multinomial_logit(design_without(-1), targets, classes);
  report.full_log_likelihood = full.log_likelihood;
  const bool full_unstable = full.separated || !full.converged;

  for (Eigen::Index j = 0; j < x.values.cols(); ++j) {
    FeatureSignificance f;
    f.feature = x.columns.at(static_cast<std::size_t>(j));
    f.dof = classes - 1;
    if (std::find(active.begin(), active.end(), j) == active.end()) {
      f.warning = "constant feature";
      report.features.push_back(f);
      continue;
    }
    const auto reduced = fit_multinomial_logit(design_without(j), targets, classes);
    f.statistic = std::max(0.0, 2.0 * (full.log_likelihood - reduced.log_likelihood));
    f.p_value = chi_squared_sf(f.statistic, f.dof);
    if (full_unstable || reduced.separated || !reduced.converged) {
      f.unstable = true;
      f.warning = "unstable fit (separation or non-convergence); p-value approximate";
    }
    report.features.push_back(f);
  }
  return report;
}

}  // namespace civicpb
