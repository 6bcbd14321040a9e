#include "civicpb/legitimacy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "civicpb/errors.hpp"

namespace civicpb {

namespace {

std::vector<double> sorted_desc(std::span<const double> counts) {
  std::vector<double> v(counts.begin(), counts.end());
  for (double c : v) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw DataError("counts must be finite and nonnegative");
  }
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

// Prefix sums in top-k order; the last element is the total.
std::vector<double> prefix_sums(const std::vector<double>& desc) {
  std::vector<double> s(desc.size());
  std::partial_sum(desc.begin(), desc.end(), s.begin());
  return s;
}

void require_demand(const std::vector<double>& prefix) {
  if (prefix.empty() || !(prefix.back() > 0.0)) throw DataError("count table is empty or has zero total demand");
}

}  // namespace

double legitimacy(std::span<const double> counts, std::size_t k) {
  auto desc = sorted_desc(counts);
  auto prefix = prefix_sums(desc);
  require_demand(prefix);
  const std::size_t n = desc.size();
  if (k < 1 || k > n) {
    throw DataError("k = " + std::to_string(k) + " out of range [1, " + std::to_string(n) + "]");
  }
  if (k == n) return static_cast<double>(n);
  return static_cast<double>(n) * prefix[k - 1] / prefix.back();
}

double legitimacy(const CountTable& table, std::size_t k) { return legitimacy(table.counts(), k); }

LegitimacyCurve legitimacy_curve(std::span<const double> counts) {
  auto desc = sorted_desc(counts);
  auto prefix = prefix_sums(desc);
  require_demand(prefix);
  const std::size_t n = desc.size();
  if (n < 2) throw DataError("legitimacy curve needs at least 2 items");
  const double total = prefix.back();
  const double nd = static_cast<double>(n);

  LegitimacyCurve curve;
  curve.legitimacy.resize(n);
  curve.share.resize(n);
  curve.gain.resize(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const bool last = k == n;
    curve.legitimacy[k - 1] = last ? nd : nd * prefix[k - 1] / total;
    curve.share[k - 1] = last ? 1.0 : prefix[k - 1] / total;
    curve.gain[k - 1] = k == 1 ? curve.legitimacy[0] : curve.legitimacy[k - 1] - curve.legitimacy[k - 2];
  }
  return curve;
}

LegitimacyCurve legitimacy_curve(const CountTable& table) {
  auto curve = legitimacy_curve(table.counts());
  curve.axis = table.axis;
  curve.scope = table.scope;
  for (const auto& e : table.entries) curve.labels.push_back(e.label);
  return curve;
}

std::size_t knee_index(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw DataError("knee detection needs at least 2 points");
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return 1;

  auto y = [&](std::size_t i) { return (values[i] - *lo) / range; };
  const double y0 = y(0);
  const double dy = y(n - 1) - y0;
  const double norm = std::sqrt(dy * dy + 1.0);
  // Distances are at most sqrt(2); differences below this are ties.
  constexpr double kTieTolerance = 1e-12;

  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n - 1);
    dist[i] = std::abs(dy * x - (y(i) - y0)) / norm;
  }
  const double best = *std::max_element(dist.begin(), dist.end());
  if (best <= kTieTolerance) return 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (dist[i] >= best - kTieTolerance) return i + 1;
  }
  return 1;
}

KneeResult optimal_k(const LegitimacyCurve& curve) {
  KneeResult r;
  r.optimal_k = knee_index(curve.legitimacy);
  const std::size_t n = curve.size();
  if (r.optimal_k < n) {
    double sum = 0.0;
    for (std::size_t k = r.optimal_k; k < n; ++k) sum += curve.gain[k];
    r.decay_rate = sum / static_cast<double>(n - r.optimal_k);
  }
  return r;
}

LegitimacyMap legitimacy_map(const CountTable& table) {
  LegitimacyMap map;
  map.axis = table.axis;
  map.scope = table.scope;
  map.counts = table;
  const auto total = table.total();
  const std::size_t n = table.entries.size();
  map.has_demand = total > 0;
  if (!map.has_demand) return map;

  if (n >= 2) {
    map.curve = legitimacy_curve(table);
    map.knee = optimal_k(*map.curve);
  } else {
    map.knee.optimal_k = 1;
  }
  const double nd = static_cast<double>(n);
  const double td = static_cast<double>(total);
  for (std::size_t i = 0; i < map.knee.optimal_k; ++i) {
    const auto& e = table.entries[i];
    const double c = static_cast<double>(e.count);
    map.items.push_back({e.label, static_cast<std::size_t>(e.count), nd * c / td, c / td});
  }
  return map;
}

std::vector<LegitimacyMap> legitimacy_maps(const SurveyDataset& dataset, Axis axis) {
  const auto& scopes =
      axis == Axis::SectorsWithinNeighborhood ? dataset.neighborhood_labels : dataset.sector_labels;
  std::vector<LegitimacyMap> maps;
  maps.reserve(scopes.size());
  for (const auto& scope : scopes) maps.push_back(legitimacy_map(proposal_counts(dataset, axis, scope)));
  return maps;
}

}  // namespace civicpb
