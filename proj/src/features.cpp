#include "civicpb/features.hpp"

#include <algorithm>
#include <cmath>

#include "civicpb/errors.hpp"
#include "civicpb/rng.hpp"

namespace civicpb {

std::string_view to_string(FeatureSet set) {
  switch (set) {
    case FeatureSet::S: return "S";
    case FeatureSet::P: return "P";
    case FeatureSet::SP: return "SP";
  }
  return "";
}

FeatureSet parse_feature_set(std::string_view text) {
  if (text == "S" || text == "s") return FeatureSet::S;
  if (text == "P" || text == "p") return FeatureSet::P;
  if (text == "SP" || text == "sp" || text == "S+P") return FeatureSet::SP;
  throw ConfigError("unknown feature set '" + std::string(text) + "' (expected S|P|SP)");
}

FeatureMatrix FeatureMatrix::subset(const std::vector<std::size_t>& rows) const {
  FeatureMatrix out;
  out.feature_set = feature_set;
  out.columns = columns;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), values.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.values.row(static_cast<Eigen::Index>(i)) = values.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(labels.at(rows[i]));
    out.ids.push_back(ids.at(rows[i]));
  }
  return out;
}

FeatureMatrix build_features(const SurveyDataset& dataset, FeatureSet set) {
  const bool use_s = set != FeatureSet::P;
  const bool use_p = set != FeatureSet::S;
  FeatureMatrix fm;
  fm.feature_set = set;
  if (use_s) {
    for (const auto& s : kSatisfactionSectors) fm.columns.emplace_back(s.id);
  }
  if (use_p) {
    for (const auto& p : kParticipationItems) fm.columns.emplace_back(p.id);
  }

  std::vector<std::vector<double>> rows;
  for (const auto& r : dataset.responses) {
    std::vector<double> row;
    bool complete = true;
    auto take = [&](const auto& codes) {
      for (const auto& c : codes) {
        if (!c) complete = false;
        row.push_back(c ? static_cast<double>(*c) : 0.0);
      }
    };
    if (use_s) take(r.satisfaction);
    if (use_p) take(r.participation);
    if (!complete) {
      ++fm.dropped;
      continue;
    }
    rows.push_back(std::move(row));
    fm.labels.push_back(merge_qol_classes(r.qol_raw));
    fm.ids.push_back(r.respondent_id);
  }
  fm.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(fm.columns.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < fm.columns.size(); ++j) {
      fm.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return fm;
}

std::array<std::size_t, kQolClasses> class_counts(const std::vector<int>& labels) {
  std::array<std::size_t, kQolClasses> counts{};
  for (int l : labels) {
    if (l < 1 || l > kQolClasses) throw DataError("class label out of range: " + std::to_string(l));
    ++counts[static_cast<std::size_t>(l - 1)];
  }
  return counts;
}

MinMaxScaler MinMaxScaler::fit(const Eigen::MatrixXd& x) {
  if (x.rows() == 0) throw DataError("cannot fit scaler on an empty matrix");
  return {x.colwise().minCoeff().transpose(), x.colwise().maxCoeff().transpose()};
}

MinMaxScaler MinMaxScaler::identity(Eigen::Index dim) {
  return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
}

Eigen::VectorXd MinMaxScaler::transform_row(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw DataError("scaler dimension mismatch");
  Eigen::VectorXd out(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double range = max(j) - min(j);
    out(j) = range > 0.0 ? (x(j) - min(j)) / range : 0.0;
  }
  return out;
}

Eigen::MatrixXd MinMaxScaler::transform(const Eigen::MatrixXd& x) const {
  if (x.cols() != dim()) throw DataError("scaler dimension mismatch");
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.row(i) = transform_row(x.row(i).transpose()).transpose();
  return out;
}

Split stratified_split(const std::vector<int>& labels, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) throw ConfigError("test fraction must be in [0, 1)");
  Rng rng(seed);
  std::array<std::vector<std::size_t>, kQolClasses> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class.at(static_cast<std::size_t>(labels[i] - 1)).push_back(i);
  Split split;
  for (auto& members : by_class) {
    rng.shuffle(members.begin(), members.end());
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(members.size())));
    if (n_test >= members.size()) n_test = members.size() > 0 ? members.size() - 1 : 0;
    split.test.insert(split.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
    split.train.insert(split.train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test), members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace civicpb
