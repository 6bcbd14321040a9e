#include "civicpb/crosscheck.hpp"

#include <algorithm>

#include "civicpb/errors.hpp"

namespace civicpb {

std::vector<CrosscheckRow> optimal_gain_crosscheck(const SurveyDataset& dataset,
                                                   const std::vector<LegitimacyMap>& neighborhood_maps,
                                                   const SignificanceReport& significance,
                                                   const std::map<std::string, std::string>& sector_feature_map) {
  std::map<std::string, double> share_sum;
  std::size_t scopes_with_demand = 0;
  for (const auto& map : neighborhood_maps) {
    if (map.axis != Axis::SectorsWithinNeighborhood) throw DataError("crosscheck needs sector-within-neighborhood maps");
    if (!map.has_demand) continue;
    ++scopes_with_demand;
    for (const auto& item : map.items) share_sum[item.label] += item.share_gain;
  }

  const auto totals = total_proposal_counts(dataset);
  std::vector<CrosscheckRow> rows;
  std::size_t rank = 0;
  for (const auto& e : totals.entries) {
    CrosscheckRow row;
    row.sector = e.label;
    row.proposals = e.count;
    if (e.count > 0) row.ranking = ++rank;
    if (scopes_with_demand > 0) {
      row.optimal_gain_pct = 100.0 * share_sum[e.label] / static_cast<double>(scopes_with_demand);
    }
    if (auto it = sector_feature_map.find(e.label); it != sector_feature_map.end()) {
      if (auto idx = satisfaction_sector_index(it->second)) {
        row.feature = std::string(kSatisfactionSectors[*idx].id);
        if (const auto* f = significance.find(*row.feature)) row.p_value = f->p_value;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace civicpb
