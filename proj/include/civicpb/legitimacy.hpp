#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "civicpb/survey.hpp"

namespace civicpb {

// Legitimacy of funding the top-k items of a demand table:
//
//   L(k) = (sum of the k largest counts) / (mean of all n counts)
//
// computed as n * topk / total so that integer inputs stay exact. The table
// is sorted internally; requires 1 <= k <= n and a positive total.
double legitimacy(std::span<const double> counts, std::size_t k);
double legitimacy(const CountTable& table, std::size_t k);

struct LegitimacyCurve {
  Axis axis = Axis::SectorsWithinNeighborhood;
  std::string scope;
  // Item labels in top-k order (empty when built from raw counts).
  std::vector<std::string> labels;
  // Indexed by k - 1.
  std::vector<double> legitimacy;  // L(k)
  std::vector<double> share;       // top-k mass / total mass = L(k) / n
  std::vector<double> gain;        // L(k) - L(k-1), gain(1) = L(1)

  std::size_t size() const { return legitimacy.size(); }
};

// Requires n >= 2 and a positive total.
LegitimacyCurve legitimacy_curve(std::span<const double> counts);
LegitimacyCurve legitimacy_curve(const CountTable& table);

inline constexpr std::string_view kKneeMethod = "normalized-max-chord-distance";

struct KneeResult {
  std::size_t optimal_k = 1;
  std::string method{kKneeMethod};
  // Mean gain over k > optimal_k; 0 when optimal_k == n.
  double decay_rate = 0.0;
};

// Knee of an increasing series y(1..n): both axes are min-max normalized and
// the k with the largest perpendicular distance to the chord from the first
// to the last point wins, ties going to the smaller k. A straight line (all
// distances zero) yields k = 1. Requires n >= 2.
std::size_t knee_index(std::span<const double> values);

KneeResult optimal_k(const LegitimacyCurve& curve);

struct LegitimacyMapItem {
  std::string label;
  std::size_t count = 0;
  double gain = 0.0;        // legitimacy gain contributed by the item
  double share_gain = 0.0;  // same, as a fraction of total demand
};

struct LegitimacyMap {
  Axis axis = Axis::SectorsWithinNeighborhood;
  std::string scope;
  bool has_demand = false;  // false: "no demand", no curve or knee
  CountTable counts;
  std::optional<LegitimacyCurve> curve;  // absent for n < 2 or no demand
  KneeResult knee;
  std::vector<LegitimacyMapItem> items;  // length optimal_k, gain descending
};

LegitimacyMap legitimacy_map(const CountTable& table);

// One map per scope label on the axis, in the dataset's label order.
std::vector<LegitimacyMap> legitimacy_maps(const SurveyDataset& dataset, Axis axis);

}  // namespace civicpb
