#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "civicpb/survey.hpp"

namespace civicpb::testing {

// Planted structure:
//  * QoL is a thresholded linear score of satisfaction codes; public_transport
//    and shopping carry zero weight, the other sectors a positive one.
//  * Each neighbourhood prefers proposal sectors along a Zipf-like profile
//    whose steepness varies per neighbourhood.
//  * A share of respondents relocated, mostly along a few popular routes.
//  * QoL classes are imbalanced (class 3 dominant, class 1 rare).
struct SyntheticOptions {
  std::size_t respondents = 1200;
  std::uint64_t seed = 7;
  double relocation_rate = 0.2;
  double dont_know_rate = 0.03;
  double noise = 0.6;
};

SchemaConfig synthetic_schema();
std::string synthetic_schema_json();
SurveyDataset synthetic_survey(const SyntheticOptions& options = {});

// Index of satisfaction sectors that carry weight in the planted QoL score.
std::vector<std::size_t> planted_informative_sectors();
std::vector<std::size_t> planted_null_sectors();

}  // namespace civicpb::testing
