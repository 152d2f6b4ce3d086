#include "openmind/cb_estimator.hpp"

#include <algorithm>
#include <cmath>

namespace openmind {

std::string_view to_string(SkipReason r)
{
    switch (r) {
    case SkipReason::NoOpinionAtT: return "NoOpinionAtT";
    case SkipReason::NoOpinionAtT1: return "NoOpinionAtT1";
    case SkipReason::NoNeighbors: return "NoNeighbors";
    }
    return "?";
}

std::vector<NeighborOpinion> sort_by_distance(double x_t, std::vector<NeighborOpinion> neighbors)
{
    std::sort(neighbors.begin(), neighbors.end(), [x_t](const NeighborOpinion& a, const NeighborOpinion& b) {
        const double da = std::fabs(x_t - a.opinion);
        const double db = std::fabs(x_t - b.opinion);
        if (da != db)
            return da < db;
        return a.id < b.id;
    });
    return neighbors;
}

EstimationResult estimate_from_neighbors(const std::string& user, MonthId from, double x_t, double x_t1,
                                         std::vector<NeighborOpinion> neighbors)
{
    validate_score(x_t);
    validate_score(x_t1);
    if (neighbors.empty())
        throw Error(ErrorKind::NoNeighbors, user + " has no neighbors in " + from.to_string());
    for (const auto& nb : neighbors)
        validate_score(nb.opinion);

    const auto sorted = sort_by_distance(x_t, std::move(neighbors));
    const std::size_t n = sorted.size();

    std::vector<double> estimate(n + 1), error(n + 1);
    estimate[0] = x_t;
    error[0] = 1.0;
    for (std::size_t i = 1; i <= n; ++i) {
        estimate[i] = (estimate[i - 1] + sorted[i - 1].opinion) / 2.0;
        error[i] = std::fabs(estimate[i] - x_t1);
    }

    // descending scan with <=, so the smallest index among equal minima wins
    double min_e = error[n];
    std::size_t j = n;
    for (std::size_t i = n + 1; i-- > 0;) {
        if (error[i] <= min_e) {
            min_e = error[i];
            j = i;
        }
    }

    EstimationResult r;
    r.user_id = user;
    r.from_month = from;
    r.to_month = next_month(from);
    r.prefix_j = j;
    r.n_neighbors = n;
    r.x_hat = estimate[j];
    r.abs_error = std::fabs(estimate[j] - x_t1);
    r.degenerate = j == 0;
    r.cb_hat = j == 0 ? 0.0 : std::fabs(x_t - sorted[j - 1].opinion);
    return r;
}

namespace {

std::vector<NeighborOpinion> neighbor_opinions(const std::string& user, const SnapshotGraph& g)
{
    const auto& adj = g.neighbors(user);
    std::vector<NeighborOpinion> out;
    out.reserve(adj.size());
    for (const auto& nb : adj)
        out.push_back({nb.id, g.node(nb.id).score});
    return out;
}

}  // namespace

EstimationResult estimate_user(const std::string& user, const SnapshotGraph& g_t, double x_t, double x_t1)
{
    return estimate_from_neighbors(user, g_t.month(), x_t, x_t1, neighbor_opinions(user, g_t));
}

EstimationResult brute_force_oracle(const std::string& user, const SnapshotGraph& g_t, double x_t, double x_t1)
{
    auto nbs = neighbor_opinions(user, g_t);
    return brute_force_oracle(user, g_t.month(), x_t, x_t1, nbs);
}

EstimationResult brute_force_oracle(const std::string& user, MonthId from, double x_t, double x_t1,
                                    std::span<const NeighborOpinion> neighbors)
{
    validate_score(x_t);
    validate_score(x_t1);
    if (neighbors.empty())
        throw Error(ErrorKind::NoNeighbors, user + " has no neighbors in " + from.to_string());
    for (const auto& nb : neighbors)
        validate_score(nb.opinion);

    // selection sort on (distance, id)
    std::vector<NeighborOpinion> order(neighbors.begin(), neighbors.end());
    auto before = [x_t](const NeighborOpinion& a, const NeighborOpinion& b) {
        const double da = std::fabs(x_t - a.opinion), db = std::fabs(x_t - b.opinion);
        return da < db || (da == db && a.id < b.id);
    };
    for (std::size_t i = 0; i < order.size(); ++i) {
        std::size_t best = i;
        for (std::size_t k = i + 1; k < order.size(); ++k)
            if (before(order[k], order[best]))
                best = k;
        std::swap(order[i], order[best]);
    }

    const std::size_t n = order.size();
    std::size_t best_j = 0;
    double best_error = 1.0;
    double best_estimate = x_t;
    for (std::size_t j = 1; j <= n; ++j) {
        double est = x_t;
        for (std::size_t i = 0; i < j; ++i)
            est = (est + order[i].opinion) / 2.0;
        const double err = std::fabs(est - x_t1);
        if (err < best_error) {
            best_error = err;
            best_estimate = est;
            best_j = j;
        }
    }

    EstimationResult r;
    r.user_id = user;
    r.from_month = from;
    r.to_month = next_month(from);
    r.prefix_j = best_j;
    r.n_neighbors = n;
    r.x_hat = best_estimate;
    r.abs_error = std::fabs(best_estimate - x_t1);
    r.degenerate = best_j == 0;
    r.cb_hat = best_j == 0 ? 0.0 : std::fabs(x_t - order[best_j - 1].opinion);
    return r;
}

EstimateBatch estimate_all(const SnapshotGraph& g_t, const OpinionTable& table, MonthId m)
{
    if (g_t.month() != m)
        throw Error(ErrorKind::MonthMismatch,
                    "snapshot is for " + g_t.month().to_string() + ", asked for " + m.to_string());

    EstimateBatch batch;
    batch.from = m;
    batch.to = next_month(m);
    const auto& now = table.month(m);
    const auto& next = table.month(batch.to);

    for (const auto& [user, entry] : now) {
        auto later = next.find(user);
        if (later == next.end()) {
            batch.skips.emplace(user, SkipReason::NoOpinionAtT1);
            continue;
        }
        ++batch.both_months;
        if (!g_t.has_node(user) || g_t.degree(user) == 0) {
            batch.skips.emplace(user, SkipReason::NoNeighbors);
            continue;
        }
        batch.results.push_back(estimate_user(user, g_t, entry.score, later->second.score));
    }
    for (const auto& [user, entry] : next)
        if (!now.contains(user))
            batch.skips.emplace(user, SkipReason::NoOpinionAtT);
    return batch;
}

}  // namespace openmind
