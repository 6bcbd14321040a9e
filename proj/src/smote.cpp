#include "civicpb/smote.hpp"

#include <algorithm>
#include <numeric>

#include "civicpb/errors.hpp"
#include "civicpb/rng.hpp"

namespace civicpb {

namespace {

// For each member, the indices (into members) of its k nearest neighbours.
std::vector<std::vector<std::size_t>> nearest_neighbors(const Eigen::MatrixXd& values,
                                                        const std::vector<std::size_t>& members, std::size_t k) {
  const std::size_t m = members.size();
  std::vector<std::vector<std::size_t>> out(m);
  std::vector<std::pair<double, std::size_t>> dist;
  for (std::size_t a = 0; a < m; ++a) {
    dist.clear();
    const auto row_a = values.row(static_cast<Eigen::Index>(members[a]));
    for (std::size_t b = 0; b < m; ++b) {
      if (a == b) continue;
      dist.emplace_back((row_a - values.row(static_cast<Eigen::Index>(members[b]))).squaredNorm(), b);
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    for (std::size_t i = 0; i < k; ++i) out[a].push_back(dist[i].second);
  }
  return out;
}

}  // namespace

FeatureMatrix smote_oversample(const FeatureMatrix& x, std::size_t k_neighbors, std::uint64_t seed) {
  if (k_neighbors < 1) throw ConfigError("SMOTE needs k_neighbors >= 1");
  const auto counts = class_counts(x.labels);
  const std::size_t target = *std::max_element(counts.begin(), counts.end());

  FeatureMatrix out = x;
  std::vector<Eigen::RowVectorXd> synthetic;
  std::vector<int> synthetic_labels;
  Rng rng(seed);

  for (int label = 1; label <= kQolClasses; ++label) {
    const std::size_t have = counts[static_cast<std::size_t>(label - 1)];
    if (have == 0 || have >= target) continue;
    if (have < 2) {
      throw DataError("class " + std::to_string(label) + " has " + std::to_string(have) +
                      " member(s); SMOTE needs at least 2 to interpolate");
    }
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < x.labels.size(); ++i) {
      if (x.labels[i] == label) members.push_back(i);
    }
    const std::size_t k = std::min(k_neighbors, have - 1);
    const auto neighbors = nearest_neighbors(x.values, members, k);
    for (std::size_t n = have; n < target; ++n) {
      const auto a = rng.below(have);
      const auto b = neighbors[a][rng.below(k)];
      const double u = rng.uniform();
      const auto base = x.values.row(static_cast<Eigen::Index>(members[a]));
      const auto other = x.values.row(static_cast<Eigen::Index>(members[b]));
      synthetic.emplace_back(base + u * (other - base));
      synthetic_labels.push_back(label);
    }
  }
  if (synthetic.empty()) return out;

  const auto original = x.values.rows();
  out.values.conservativeResize(original + static_cast<Eigen::Index>(synthetic.size()), Eigen::NoChange);
  for (std::size_t i = 0; i < synthetic.size(); ++i) {
    out.values.row(original + static_cast<Eigen::Index>(i)) = synthetic[i];
    out.labels.push_back(synthetic_labels[i]);
    out.ids.push_back("synthetic-" + std::to_string(i + 1));
  }
  return out;
}

}  // namespace civicpb
