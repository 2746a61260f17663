#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "snrlab/grid.hpp"

namespace snrlab::metrics {

// Energy distance between two empirical distributions of grids:
// 2 E||A-B|| - E||A-A'|| - E||B-B'||, each mean over all index pairs
// (V-statistic, so identical sets give exactly zero).
double energy_distance(std::span<const Grid> a, std::span<const Grid> b);

// Energy distances of disjoint contiguous batch pairs (a_k, b_k), in batch
// order. Used for standard errors and paired comparisons.
std::vector<double> energy_distance_batches(std::span<const Grid> a, std::span<const Grid> b,
                                            int n_batches);

// Mean 1-D Wasserstein-1 distance over seeded random unit projections.
double sliced_wasserstein(std::span<const Grid> a, std::span<const Grid> b, int n_proj,
                          std::uint64_t seed);

// Exact W1 between two 1-D empirical distributions.
double wasserstein1_1d(std::vector<double> a, std::vector<double> b);

}  // namespace snrlab::metrics
