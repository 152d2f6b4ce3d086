#pragma once

#include "openmind/core.hpp"
#include "openmind/leaning.hpp"
#include "openmind/temporal_graph.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace openmind {

/// Opinion of one neighbor at time t.
struct NeighborOpinion {
    std::string id;
    double opinion = 0.0;
};

/// Confidence-bound estimate for one user over one month pair.
struct EstimationResult {
    std::string user_id;
    MonthId from_month;
    MonthId to_month;
    double cb_hat = 0.0;
    double x_hat = 0.0;
    std::size_t prefix_j = 0;
    std::size_t n_neighbors = 0;
    double abs_error = 0.0;
    /// prefix_j == 0: no neighbor improved on the initial error, cb_hat is 0 by convention.
    bool degenerate = false;

    friend bool operator==(const EstimationResult&, const EstimationResult&) = default;
};

enum class SkipReason { NoOpinionAtT, NoOpinionAtT1, NoNeighbors };

std::string_view to_string(SkipReason r);

/// Orders neighbors by opinion distance to `x_t`, ties by ascending id.
std::vector<NeighborOpinion> sort_by_distance(double x_t, std::vector<NeighborOpinion> neighbors);

/// Core of the estimator on an explicit neighbor list. Neighbors are sorted
/// by distance; the estimate after i neighbors is the running pairwise
/// average; the index with the smallest error wins, smallest index on ties.
/// The error at index 0 is fixed to 1.0 rather than |x_t - x_t1|.
EstimationResult estimate_from_neighbors(const std::string& user, MonthId from, double x_t, double x_t1,
                                         std::vector<NeighborOpinion> neighbors);

/// Neighbor opinions are read from the node scores of `g_t`. Edge weights are ignored.
EstimationResult estimate_user(const std::string& user, const SnapshotGraph& g_t, double x_t, double x_t1);

/// Independent re-implementation used to cross-check estimate_user. Every
/// prefix estimate is recomputed from scratch and the winner is found by a
/// forward strict-less scan. Intended for n <= 20.
EstimationResult brute_force_oracle(const std::string& user, MonthId from, double x_t, double x_t1,
                                    std::span<const NeighborOpinion> neighbors);
EstimationResult brute_force_oracle(const std::string& user, const SnapshotGraph& g_t, double x_t, double x_t1);

struct EstimateBatch {
    MonthId from;
    MonthId to;
    /// Sorted by user id.
    std::vector<EstimationResult> results;
    std::map<std::string, SkipReason> skips;
    /// Users holding opinions in both months.
    std::size_t both_months = 0;
};

/// Estimates every user of month `m` that also has an opinion in the next
/// month and at least one neighbor in `g_t`. Everyone else seen in either
/// month is recorded with the first applicable skip reason.
EstimateBatch estimate_all(const SnapshotGraph& g_t, const OpinionTable& table, MonthId m);

}  // namespace openmind
