#pragma once

#include "openmind/core.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace openmind::sim {

struct CompleteTopology {};

/// Erdos-Renyi G(n, p), drawn from the run's generator before any step.
struct RandomTopology {
    double p = 0.1;
};

struct EdgeListTopology {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
};

using Topology = std::variant<CompleteTopology, RandomTopology, EdgeListTopology>;

enum class Pairing {
    /// Each step picks one connected pair uniformly at random.
    RandomEdge,
    /// Steps are grouped into rounds of floor(n/2) disjoint pairs from a random
    /// perfect matching, so every agent interacts once per round. Complete topology only.
    Matching,
};

struct SimConfig {
    std::size_t n_agents = 100;
    /// Global bound, or one bound per agent.
    std::variant<double, std::vector<double>> epsilon = 0.2;
    double mu = 0.5;
    Topology topology = CompleteTopology{};
    Pairing pairing = Pairing::RandomEdge;
    std::size_t n_steps = 10000;
    std::size_t snapshot_every = 100;
    std::uint64_t rng_seed = 0;
    /// Defaults to uniform draws on [0, 1].
    std::optional<std::vector<double>> initial_opinions;

    /// Throws BadConfig.
    void validate() const;
    double epsilon_of(std::size_t agent) const;
};

struct Snapshot {
    std::size_t step = 0;
    std::vector<double> opinions;

    friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

struct InteractionEvent {
    std::size_t step = 0;  // 1-based
    std::size_t agent_u = 0;
    std::size_t agent_v = 0;
    bool accepted_u = false;
    bool accepted_v = false;

    friend bool operator==(const InteractionEvent&, const InteractionEvent&) = default;
};

struct Trajectory {
    std::size_t n_agents = 0;
    /// Step 0 holds the initial opinions; then one every snapshot_every steps.
    std::vector<Snapshot> snapshots;
    std::vector<InteractionEvent> interactions;
    /// Agents with no incident edge in the topology (non-fatal).
    std::size_t isolated_agents = 0;
    std::vector<std::string> warnings;

    const std::vector<double>& final_opinions() const { return snapshots.back().opinions; }

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// One Deffuant interaction. Each side moves by mu toward the other iff the
/// pre-update distance is within its own bound.
std::pair<double, double> step(double x_u, double x_v, double eps_u, double eps_v, double mu);

/// Deterministic given config.rng_seed.
Trajectory run(const SimConfig& config);

/// Groups obtained by sorting and splitting at gaps larger than `gap_tolerance`.
std::size_t cluster_count(std::span<const double> opinions, double gap_tolerance);

/// Synthetic posts and interactions in the real-data formats.
struct Benchmark {
    std::vector<PostScore> posts;
    std::vector<InteractionRecord> interactions;
    std::vector<MonthId> months;
};

inline constexpr MonthId kBenchmarkOrigin{2000, 1};

/// Zero-padded so lexicographic order matches agent index order.
std::string agent_id(std::size_t index, std::size_t n_agents);

/// Splits a trajectory into windows of `window` steps. Month k carries the
/// opinions at step k*window and the interactions of steps (k*window, (k+1)*window],
/// repeated pairs aggregated into one record.
Benchmark export_benchmark(const Trajectory& trajectory, std::size_t window,
                           MonthId origin = kBenchmarkOrigin);

}  // namespace openmind::sim
