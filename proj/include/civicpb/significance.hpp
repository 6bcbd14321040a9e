#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "civicpb/features.hpp"

namespace civicpb {

inline constexpr std::string_view kSignificanceMethod = "LR-multinomial-logit";

struct LogitFit {
  Eigen::MatrixXd coefficients;  // (classes - 1) x design columns, last class is the reference
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  bool separated = false;  // coefficients ran away: quasi-complete separation
};

// Maximum-likelihood multinomial logit by damped Newton steps. `targets` are
// class indices 0..classes-1; `design` should carry its own intercept column.
LogitFit fit_multinomial_logit(const Eigen::MatrixXd& design, const std::vector<int>& targets, int classes);

// Upper tail of the chi-squared distribution.
double chi_squared_sf(double statistic, double dof);

struct FeatureSignificance {
  std::string feature;
  double p_value = 1.0;
  double statistic = 0.0;  // 2 * (ll_full - ll_without)
  int dof = 0;
  bool unstable = false;
  std::string warning;
};

struct SignificanceReport {
  std::string method{kSignificanceMethod};
  std::size_t samples = 0;
  int classes = 0;
  double full_log_likelihood = 0.0;
  std::vector<FeatureSignificance> features;

  const FeatureSignificance* find(std::string_view feature) const;
};

// Likelihood-ratio test per feature: the full logit model against the model
// without that feature, chi-squared with (classes present - 1) degrees of
// freedom. Features are standardized first; constant features get p = 1.
SignificanceReport feature_significance(const FeatureMatrix& x);

}  // namespace civicpb
