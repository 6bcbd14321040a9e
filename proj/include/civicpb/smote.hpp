#pragma once

#include <cstdint>

#include "civicpb/features.hpp"

namespace civicpb {

// Synthetic minority oversampling. Every class present with fewer rows than
// the largest class is grown to that size. Each synthetic row is
// x + u * (x' - x), with x drawn uniformly from the class, x' one of its
// k nearest same-class neighbours (Euclidean) and u uniform in [0, 1).
// Original rows come first, in input order; synthetic rows are appended.
// Throws DataError when a class that needs upsampling has fewer than 2 rows.
FeatureMatrix smote_oversample(const FeatureMatrix& x, std::size_t k_neighbors, std::uint64_t seed);

}  // namespace civicpb
