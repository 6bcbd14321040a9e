#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "civicpb/legitimacy.hpp"
#include "civicpb/significance.hpp"
#include "civicpb/survey.hpp"

namespace civicpb {

// One row of the sector ranking / optimal gain / p-value join.
struct CrosscheckRow {
  std::string sector;
  std::uint64_t proposals = 0;
  std::optional<std::size_t> ranking;  // by total proposals, null if never proposed
  // 100 x mean over neighbourhoods with demand of the share gain this sector
  // contributes inside the neighbourhood's optimal-k portfolio.
  double optimal_gain_pct = 0.0;
  std::optional<std::string> feature;
  std::optional<double> p_value;
};

// `neighborhood_maps` are the SectorsWithinNeighborhood maps of `dataset`.
// `sector_feature_map` joins proposal sectors to satisfaction feature ids.
std::vector<CrosscheckRow> optimal_gain_crosscheck(const SurveyDataset& dataset,
                                                   const std::vector<LegitimacyMap>& neighborhood_maps,
                                                   const SignificanceReport& significance,
                                                   const std::map<std::string, std::string>& sector_feature_map);

}  // namespace civicpb
