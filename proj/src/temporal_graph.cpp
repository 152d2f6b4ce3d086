#include "openmind/temporal_graph.hpp"

#include <algorithm>
#include <array>

namespace openmind {

SnapshotGraph::EdgeKey SnapshotGraph::edge_key(const std::string& a, const std::string& b)
{
    return a < b ? EdgeKey{a, b} : EdgeKey{b, a};
}

void SnapshotGraph::add_node(const std::string& id, GraphNode node)
{
    if (!nodes_.emplace(id, node).second)
        throw Error(ErrorKind::DuplicateEntry, "node " + id);
    adjacency_.emplace(id, std::vector<Neighbor>{});
}

void SnapshotGraph::add_edge(const std::string& a, const std::string& b, std::int64_t weight)
{
    if (a == b)
        throw Error(ErrorKind::SelfLoop, a);
    if (weight < 1)
        throw Error(ErrorKind::NonPositiveCount, "edge weight " + std::to_string(weight));
    if (!has_node(a) || !has_node(b))
        throw Error(ErrorKind::InvariantViolation, "edge endpoint missing from node set");

    auto [it, inserted] = edges_.emplace(edge_key(a, b), 0);
    it->second += weight;

    auto bump = [&](const std::string& from, const std::string& to) {
        auto& adj = adjacency_[from];
        auto pos = std::lower_bound(adj.begin(), adj.end(), to,
                                    [](const Neighbor& n, const std::string& id) { return n.id < id; });
        if (pos != adj.end() && pos->id == to)
            pos->weight += weight;
        else
            adj.insert(pos, Neighbor{to, weight});
    };
    bump(a, b);
    bump(b, a);
}

const GraphNode& SnapshotGraph::node(const std::string& id) const
{
    auto it = nodes_.find(id);
    if (it == nodes_.end())
        throw Error(ErrorKind::UnknownUser, id + " not in snapshot " + month_.to_string());
    return it->second;
}

const std::vector<Neighbor>& SnapshotGraph::neighbors(const std::string& id) const
{
    auto it = adjacency_.find(id);
    if (it == adjacency_.end())
        throw Error(ErrorKind::UnknownUser, id + " not in snapshot " + month_.to_string());
    return it->second;
}

SnapshotBuild build_snapshot(MonthId month, std::span<const InteractionRecord> records,
                             const OpinionTable& table)
{
    SnapshotBuild out{SnapshotGraph(month)};
    for (const auto& [user, entry] : table.month(month))
        out.graph.add_node(user, GraphNode{entry.score, entry.label});

    for (const auto& r : records) {
        if (r.month != month)
            throw Error(ErrorKind::MonthMismatch,
                        "record for " + r.month.to_string() + " in snapshot " + month.to_string());
        validate_record(r);
        if (!out.graph.has_node(r.user_a) || !out.graph.has_node(r.user_b)) {
            ++out.dropped_records;
            continue;
        }
        out.graph.add_edge(r.user_a, r.user_b, r.count);
        ++out.used_records;
    }
    return out;
}

NetworkStats degree_stats(const SnapshotGraph& g)
{
    NetworkStats s;
    s.month = g.month();
    s.n_nodes = g.node_count();
    s.n_edges = g.edge_count();
    for (const auto& [id, node] : g.nodes()) {
        switch (node.label) {
        case LeaningLabel::Democrat: ++s.n_dem; break;
        case LeaningLabel::Neutral: ++s.n_neu; break;
        case LeaningLabel::Republican: ++s.n_rep; break;
        }
    }
    if (s.n_nodes > 0) {
        s.avg_degree = 2.0 * static_cast<double>(s.n_edges) / static_cast<double>(s.n_nodes);
        s.edges_per_node = static_cast<double>(s.n_edges) / static_cast<double>(s.n_nodes);
    }
    return s;
}

double categorical_assortativity(const SnapshotGraph& g)
{
    if (g.edge_count() == 0)
        throw Error(ErrorKind::Degenerate, "assortativity undefined without edges");

    // mixing counts; each edge lands once in (i, j) and once in (j, i)
    std::array<std::array<std::int64_t, kLabelCount>, kLabelCount> counts{};
    for (const auto& [key, weight] : g.edges()) {
        int i = label_index(g.node(key.first).label);
        int j = label_index(g.node(key.second).label);
        ++counts[i][j];
        ++counts[j][i];
    }
    const double total = 2.0 * static_cast<double>(g.edge_count());

    double trace = 0.0, ab = 0.0;
    int populated = 0;
    for (int i = 0; i < kLabelCount; ++i) {
        std::int64_t row = 0;
        for (int j = 0; j < kLabelCount; ++j)
            row += counts[i][j];
        if (row > 0)
            ++populated;
        // symmetric matrix: a_i == b_i
        const double a = static_cast<double>(row) / total;
        trace += static_cast<double>(counts[i][i]) / total;
        ab += a * a;
    }
    if (populated < 2)
        throw Error(ErrorKind::Degenerate, "all edges lie within a single category");
    const double denom = 1.0 - ab;
    return std::clamp((trace - ab) / denom, -1.0, 1.0);
}

NetworkStats network_stats(const SnapshotGraph& g)
{
    auto s = degree_stats(g);
    try {
        s.assortativity = categorical_assortativity(g);
    } catch (const Error& err) {
        if (err.kind() != ErrorKind::Degenerate)
            throw;
    }
    return s;
}

StatsReport monthly_stats_report(std::span<const SnapshotGraph> graphs)
{
    if (graphs.empty())
        throw Error(ErrorKind::EmptySequence, "no snapshots");

    StatsReport report;
    double r_sum = 0.0;
    std::size_t r_count = 0;
    for (const auto& g : graphs) {
        auto s = network_stats(g);
        auto& m = report.mean;
        m.n_nodes += static_cast<double>(s.n_nodes);
        m.n_rep += static_cast<double>(s.n_rep);
        m.n_dem += static_cast<double>(s.n_dem);
        m.n_neu += static_cast<double>(s.n_neu);
        m.n_edges += static_cast<double>(s.n_edges);
        m.avg_degree += s.avg_degree;
        m.edges_per_node += s.edges_per_node;
        if (s.assortativity) {
            r_sum += *s.assortativity;
            ++r_count;
        }
        report.per_month.push_back(s);
    }
    const double n = static_cast<double>(graphs.size());
    auto& m = report.mean;
    for (double* f : {&m.n_nodes, &m.n_rep, &m.n_dem, &m.n_neu, &m.n_edges, &m.avg_degree, &m.edges_per_node})
        *f /= n;
    if (r_count > 0)
        m.assortativity = r_sum / static_cast<double>(r_count);
    return report;
}

}  // namespace openmind
