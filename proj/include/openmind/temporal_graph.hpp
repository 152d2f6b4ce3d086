#pragma once

#include "openmind/core.hpp"
#include "openmind/leaning.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace openmind {

struct GraphNode {
    double score = 0.0;
    LeaningLabel label = LeaningLabel::Neutral;

    friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct Neighbor {
    std::string id;
    std::int64_t weight = 0;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Undirected weighted interaction graph of one month. Edges are keyed by
/// the lexicographically ordered endpoint pair.
class SnapshotGraph {
public:
    using EdgeKey = std::pair<std::string, std::string>;

    explicit SnapshotGraph(MonthId month) : month_(month) {}

    MonthId month() const { return month_; }

    void add_node(const std::string& id, GraphNode node);

    /// Adds `weight` to the edge {a, b}, creating it if needed. Both endpoints
    /// must already be nodes; self-loops and weight < 1 throw.
    void add_edge(const std::string& a, const std::string& b, std::int64_t weight);

    bool has_node(const std::string& id) const { return nodes_.contains(id); }
    const GraphNode& node(const std::string& id) const;
    const std::map<std::string, GraphNode>& nodes() const { return nodes_; }
    const std::map<EdgeKey, std::int64_t>& edges() const { return edges_; }

    /// Neighbors of `id` sorted by identifier.
    const std::vector<Neighbor>& neighbors(const std::string& id) const;
    std::size_t degree(const std::string& id) const { return neighbors(id).size(); }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    static EdgeKey edge_key(const std::string& a, const std::string& b);

    friend bool operator==(const SnapshotGraph&, const SnapshotGraph&) = default;

private:
    MonthId month_;
    std::map<std::string, GraphNode> nodes_;
    std::map<EdgeKey, std::int64_t> edges_;
    std::map<std::string, std::vector<Neighbor>> adjacency_;
};

struct SnapshotBuild {
    SnapshotGraph graph;
    /// Records with at least one endpoint lacking an opinion in the month.
    std::size_t dropped_records = 0;
    std::size_t used_records = 0;
};

/// Nodes are every user with an opinion in `month`; records touching users
/// without one are dropped and counted.
SnapshotBuild build_snapshot(MonthId month, std::span<const InteractionRecord> records,
                             const OpinionTable& table);

struct NetworkStats {
    MonthId month;
    std::size_t n_nodes = 0;
    std::size_t n_rep = 0;
    std::size_t n_dem = 0;
    std::size_t n_neu = 0;
    std::size_t n_edges = 0;
    double avg_degree = 0.0;      // 2E/N
    double edges_per_node = 0.0;  // E/N
    std::optional<double> assortativity;  // empty when undefined
};

NetworkStats degree_stats(const SnapshotGraph& g);

/// Categorical assortativity of the leaning labels over unweighted edges.
/// Throws Degenerate when there are no edges or 1 - sum(a_i b_i) == 0.
double categorical_assortativity(const SnapshotGraph& g);

/// degree_stats plus assortativity (left empty when degenerate).
NetworkStats network_stats(const SnapshotGraph& g);

struct AveragedStats {
    double n_nodes = 0.0;
    double n_rep = 0.0;
    double n_dem = 0.0;
    double n_neu = 0.0;
    double n_edges = 0.0;
    double avg_degree = 0.0;
    double edges_per_node = 0.0;
    /// Mean over months where assortativity is defined.
    std::optional<double> assortativity;
};

struct StatsReport {
    std::vector<NetworkStats> per_month;
    AveragedStats mean;
};

StatsReport monthly_stats_report(std::span<const SnapshotGraph> graphs);

}  // namespace openmind
