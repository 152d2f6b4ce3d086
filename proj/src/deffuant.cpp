#include "openmind/deffuant.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

namespace openmind::sim {

namespace {

void check_unit(double x, const char* what)
{
    if (!std::isfinite(x) || x < 0.0 || x > 1.0)
        throw Error(ErrorKind::BadConfig, std::string(what) + " must lie in [0,1]");
}

using Edge = std::pair<std::size_t, std::size_t>;

std::vector<Edge> materialize_edges(const SimConfig& cfg, std::mt19937_64& rng)
{
    std::vector<Edge> edges;
    if (const auto* r = std::get_if<RandomTopology>(&cfg.topology)) {
        std::bernoulli_distribution coin(r->p);
        for (std::size_t i = 0; i < cfg.n_agents; ++i)
            for (std::size_t j = i + 1; j < cfg.n_agents; ++j)
                if (coin(rng))
                    edges.emplace_back(i, j);
    } else if (const auto* e = std::get_if<EdgeListTopology>(&cfg.topology)) {
        std::set<Edge> unique;
        for (auto [a, b] : e->edges)
            unique.emplace(std::min(a, b), std::max(a, b));
        edges.assign(unique.begin(), unique.end());
    }
    return edges;
}

}  // namespace

void SimConfig::validate() const
{
    if (n_agents < 2)
        throw Error(ErrorKind::BadConfig, "need at least two agents");
    if (const auto* per_agent = std::get_if<std::vector<double>>(&epsilon)) {
        if (per_agent->size() != n_agents)
            throw Error(ErrorKind::BadConfig, "per-agent epsilon length differs from n_agents");
        for (double e : *per_agent)
            check_unit(e, "epsilon");
    } else {
        check_unit(std::get<double>(epsilon), "epsilon");
    }
    if (!(mu > 0.0 && mu <= 0.5))
        throw Error(ErrorKind::BadConfig, "mu must lie in (0, 0.5]");
    if (snapshot_every == 0 || n_steps % snapshot_every != 0)
        throw Error(ErrorKind::BadConfig, "snapshot_every must be positive and divide n_steps");
    if (const auto* r = std::get_if<RandomTopology>(&topology))
        check_unit(r->p, "edge probability");
    if (const auto* e = std::get_if<EdgeListTopology>(&topology)) {
        for (auto [a, b] : e->edges) {
            if (a >= n_agents || b >= n_agents)
                throw Error(ErrorKind::BadConfig, "edge endpoint out of range");
            if (a == b)
                throw Error(ErrorKind::BadConfig, "self-loop in edge list");
        }
    }
    if (pairing == Pairing::Matching && !std::holds_alternative<CompleteTopology>(topology))
        throw Error(ErrorKind::BadConfig, "matching pairing requires the complete topology");
    if (initial_opinions) {
        if (initial_opinions->size() != n_agents)
            throw Error(ErrorKind::BadConfig, "initial opinion vector length differs from n_agents");
        for (double x : *initial_opinions)
            check_unit(x, "initial opinion");
    }
}

double SimConfig::epsilon_of(std::size_t agent) const
{
    if (const auto* per_agent = std::get_if<std::vector<double>>(&epsilon))
        return per_agent->at(agent);
    return std::get<double>(epsilon);
}

std::pair<double, double> step(double x_u, double x_v, double eps_u, double eps_v, double mu)
{
    const double d = std::fabs(x_u - x_v);
    const double u = d <= eps_u ? x_u + mu * (x_v - x_u) : x_u;
    const double v = d <= eps_v ? x_v + mu * (x_u - x_v) : x_v;
    return {u, v};
}

Trajectory run(const SimConfig& config)
{
    config.validate();
    std::mt19937_64 rng(config.rng_seed);
    const std::size_t n = config.n_agents;

    Trajectory traj;
    traj.n_agents = n;

    std::vector<double> x(n);
    if (config.initial_opinions) {
        x = *config.initial_opinions;
    } else {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (auto& xi : x)
            xi = unit(rng);
    }

    const bool complete = std::holds_alternative<CompleteTopology>(config.topology);
    const auto edges = materialize_edges(config, rng);
    if (!complete) {
        if (edges.empty())
            throw Error(ErrorKind::BadConfig, "topology has no edges");
        std::vector<bool> touched(n, false);
        for (auto [a, b] : edges)
            touched[a] = touched[b] = true;
        traj.isolated_agents = static_cast<std::size_t>(std::count(touched.begin(), touched.end(), false));
        if (traj.isolated_agents > 0)
            traj.warnings.push_back("DisconnectedTopologyWarning: " + std::to_string(traj.isolated_agents)
                                    + " isolated agents");
    }

    std::uniform_int_distribution<std::size_t> pick_agent(0, n - 1);
    std::uniform_int_distribution<std::size_t> pick_other(0, n - 2);
    std::uniform_int_distribution<std::size_t> pick_edge(0, edges.empty() ? 0 : edges.size() - 1);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const std::size_t round_size = n / 2;
    std::size_t round_pos = round_size;

    traj.snapshots.push_back({0, x});
    traj.interactions.reserve(config.n_steps);
    for (std::size_t s = 1; s <= config.n_steps; ++s) {
        std::size_t u = 0, v = 0;
        if (config.pairing == Pairing::Matching) {
            if (round_pos == round_size) {
                std::shuffle(order.begin(), order.end(), rng);
                round_pos = 0;
            }
            u = order[2 * round_pos];
            v = order[2 * round_pos + 1];
            ++round_pos;
        } else if (complete) {
            u = pick_agent(rng);
            v = pick_other(rng);
            if (v >= u)
                ++v;
        } else {
            std::tie(u, v) = edges[pick_edge(rng)];
        }

        const double eps_u = config.epsilon_of(u), eps_v = config.epsilon_of(v);
        const double d = std::fabs(x[u] - x[v]);
        std::tie(x[u], x[v]) = step(x[u], x[v], eps_u, eps_v, config.mu);
        traj.interactions.push_back({s, u, v, d <= eps_u, d <= eps_v});

        if (s % config.snapshot_every == 0)
            traj.snapshots.push_back({s, x});
    }
    return traj;
}

std::size_t cluster_count(std::span<const double> opinions, double gap_tolerance)
{
    if (opinions.empty())
        throw Error(ErrorKind::EmptyVector, "no opinions");
    if (!(gap_tolerance > 0.0))
        throw Error(ErrorKind::BadConfig, "gap tolerance must be positive");
    std::vector<double> sorted(opinions.begin(), opinions.end());
    std::sort(sorted.begin(), sorted.end());
    std::size_t clusters = 1;
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] - sorted[i - 1] > gap_tolerance)
            ++clusters;
    return clusters;
}

std::string agent_id(std::size_t index, std::size_t n_agents)
{
    std::size_t width = 1;
    for (std::size_t k = n_agents > 0 ? n_agents - 1 : 0; k >= 10; k /= 10)
        ++width;
    auto digits = std::to_string(index);
    if (digits.size() < width)
        digits.insert(0, width - digits.size(), '0');
    return "agent_" + digits;
}

Benchmark export_benchmark(const Trajectory& trajectory, std::size_t window, MonthId origin)
{
    if (trajectory.snapshots.size() < 2)
        throw Error(ErrorKind::WindowLargerThanTrajectory, "trajectory has fewer than two snapshots");
    if (window == 0)
        throw Error(ErrorKind::BadConfig, "window must be positive");

    std::map<std::size_t, const Snapshot*> by_step;
    for (const auto& s : trajectory.snapshots)
        by_step.emplace(s.step, &s);
    const std::size_t last_step = trajectory.snapshots.back().step;
    if (window > last_step)
        throw Error(ErrorKind::WindowLargerThanTrajectory,
                    "window " + std::to_string(window) + " exceeds " + std::to_string(last_step) + " steps");

    const std::size_t n_months = last_step / window + 1;
    const std::size_t n = trajectory.n_agents;
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i)
        ids[i] = agent_id(i, n);

    Benchmark out;
    MonthId month = origin;
    for (std::size_t k = 0; k < n_months; ++k, month = next_month(month)) {
        auto it = by_step.find(k * window);
        if (it == by_step.end())
            throw Error(ErrorKind::BadConfig, "no snapshot at step " + std::to_string(k * window)
                                                  + "; window must be a multiple of the snapshot interval");
        out.months.push_back(month);
        for (std::size_t i = 0; i < n; ++i)
            out.posts.push_back({ids[i], month, it->second->opinions[i]});
    }

    std::map<std::pair<std::size_t, std::pair<std::string, std::string>>, std::int64_t> counts;
    for (const auto& ev : trajectory.interactions) {
        const std::size_t k = (ev.step - 1) / window;
        if (k >= n_months)
            continue;
        const auto& a = ids[ev.agent_u];
        const auto& b = ids[ev.agent_v];
        ++counts[{k, a < b ? std::pair{a, b} : std::pair{b, a}}];
    }
    for (const auto& [key, count] : counts)
        out.interactions.push_back({out.months[key.first], key.second.first, key.second.second, count});
    return out;
}

}  // namespace openmind::sim
