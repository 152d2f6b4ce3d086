// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Usage: openmind_acceptance [path-to-openmind-cli]

#include "openmind/cb_estimator.hpp"
#include "openmind/deffuant.hpp"
#include "openmind/io.hpp"
#include "openmind/pipeline.hpp"
#include "openmind/stats.hpp"
#include "openmind/temporal_graph.hpp"
#include "openmind/transitions.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace openmind;
namespace fs = std::filesystem;

namespace {

constexpr MonthId kMonth{2019, 3};

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what)
    {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

std::vector<NeighborOpinion> named(std::initializer_list<double> opinions)
{
    std::vector<NeighborOpinion> out;
    int i = 0;
    for (double o : opinions)
        out.push_back({"n" + std::to_string(i++), o});
    return out;
}

Outcome hand_traces()
{
    Outcome o;
    auto a = estimate_from_neighbors("u", kMonth, 0.2, 0.4, named({0.6, 0.9}));
    o.require(a.prefix_j == 1, "first trace prefix_j");
    o.require(near(a.x_hat, 0.4, 1e-12), "first trace x_hat");
    o.require(near(a.cb_hat, 0.4, 1e-12), "first trace cb_hat");
    o.require(near(a.abs_error, 0.0, 1e-12), "first trace abs_error");

    auto b = estimate_from_neighbors("u", kMonth, 0.0, 0.35, named({0.2, 0.8}));
    o.require(b.prefix_j == 2, "second trace prefix_j");
    o.require(near(b.x_hat, 0.45, 1e-12), "second trace x_hat");
    o.require(near(b.cb_hat, 0.8, 1e-12), "second trace cb_hat");
    o.require(near(b.abs_error, 0.10, 1e-12), "second trace abs_error");
    o.detail = o.ok ? "2 traces" : o.detail;
    return o;
}

Outcome oracle_equivalence()
{
    Outcome o;
    std::mt19937_64 rng(20240501);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> size(1, 20);
    constexpr int kInstances = 10000;
    for (int i = 0; i < kInstances && o.ok; ++i) {
        const double x_t = unit(rng), x_t1 = unit(rng);
        auto nbs = testing::random_neighbors(rng, size(rng));
        auto fast = estimate_from_neighbors("u", kMonth, x_t, x_t1, nbs);
        auto slow = brute_force_oracle("u", kMonth, x_t, x_t1, nbs);
        o.require(fast.prefix_j == slow.prefix_j && fast.cb_hat == slow.cb_hat && fast.x_hat == slow.x_hat,
                  "mismatch at instance " + std::to_string(i));
    }
    if (o.ok)
        o.detail = std::to_string(kInstances) + " instances, exact";
    return o;
}

Outcome recovery()
{
    Outcome o;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> size(1, 15);
    constexpr int kInstances = 1000;
    int done = 0, tried = 0;
    while (done < kInstances && o.ok) {
        ++tried;
        const double x_t = unit(rng);
        auto nbs = sort_by_distance(x_t, testing::random_neighbors(rng, size(rng)));
        std::set<double> distances;
        for (const auto& nb : nbs)
            distances.insert(std::fabs(x_t - nb.opinion));
        if (distances.size() != nbs.size())
            continue;
        std::uniform_int_distribution<std::size_t> pick_k(1, nbs.size());
        const std::size_t k = pick_k(rng);
        double x_t1 = x_t;
        for (std::size_t i = 0; i < k; ++i)
            x_t1 = (x_t1 + nbs[i].opinion) / 2.0;
        double est = x_t;
        int minima = 0;
        for (const auto& nb : nbs) {
            est = (est + nb.opinion) / 2.0;
            minima += est == x_t1 ? 1 : 0;
        }
        if (minima != 1)
            continue;
        std::shuffle(nbs.begin(), nbs.end(), rng);
        auto r = estimate_from_neighbors("u", kMonth, x_t, x_t1, nbs);
        auto sorted = sort_by_distance(x_t, nbs);
        o.require(r.prefix_j == k, "wrong prefix at instance " + std::to_string(done));
        o.require(r.cb_hat == std::fabs(x_t - sorted[k - 1].opinion), "wrong cb_hat at instance " + std::to_string(done));
        ++done;
    }
    if (o.ok)
        o.detail = std::to_string(done) + " of " + std::to_string(done) + " recovered (" + std::to_string(tried)
                   + " drawn)";
    return o;
}

Outcome simulator_regimes()
{
    Outcome o;
    std::size_t min_clusters = SIZE_MAX;
    double worst_spread = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        sim::SimConfig cfg;
        cfg.n_agents = 100;
        cfg.mu = 0.5;
        cfg.n_steps = 100000;
        cfg.snapshot_every = 100000;
        cfg.rng_seed = seed;

        cfg.epsilon = 1.0;
        auto wide = sim::run(cfg).final_opinions();
        auto [lo, hi] = std::minmax_element(wide.begin(), wide.end());
        worst_spread = std::max(worst_spread, *hi - *lo);
        o.require(*hi - *lo < 1e-3, "no consensus for seed " + std::to_string(seed));

        cfg.epsilon = 0.2;
        const auto clusters = sim::cluster_count(sim::run(cfg).final_opinions(), 0.05);
        min_clusters = std::min(min_clusters, clusters);
        o.require(clusters >= 2, "single cluster for seed " + std::to_string(seed));
    }
    if (o.ok) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "10 seeds, max spread at eps=1: %.3g, min clusters at eps=0.2: %zu",
                      worst_spread, min_clusters);
        o.detail = buf;
    }
    return o;
}

Outcome ground_truth_bound()
{
    Outcome o;
    std::ostringstream info;
    for (double eps : {0.1, 0.2, 0.3}) {
        pipeline::ValidateOptions opt;
        opt.epsilon = eps;
        auto rep = pipeline::validate(opt);
        o.require(rep.exact_single > 0, "no exact single-neighbor results for eps " + std::to_string(eps));
        o.require(rep.violations == 0, "bound violated for eps " + std::to_string(eps));
        char buf[160];
        std::snprintf(buf, sizeof buf, "eps=%.1f: %zu exact, 0 violations, %zu/%zu updating within eps; ", eps,
                      rep.exact_single, rep.updating_within_eps, rep.updating);
        info << buf;
    }
    if (o.ok)
        o.detail = info.str();
    return o;
}

Outcome statistics()
{
    Outcome o;
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> size(1, 60);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> grid(0, 20);
    for (int i = 0; i < 500 && o.ok; ++i) {
        std::vector<double> a(size(rng)), b(size(rng));
        const bool ties = i % 3 == 0;
        for (auto& x : a)
            x = ties ? grid(rng) / 20.0 : unit(rng);
        for (auto& x : b)
            x = ties ? grid(rng) / 20.0 : unit(rng);
        o.require(stats::ks_2samp(a, b).d_statistic == testing::brute_force_ks_d(a, b),
                  "KS D differs from brute force at pair " + std::to_string(i));
    }
    const std::vector<double> ka{0.1, 0.2, 0.3}, kb{0.15, 0.25, 0.35};
    o.require(near(stats::ks_2samp(ka, kb).d_statistic, 1.0 / 3.0, 1e-12), "KS fixture");
    const std::vector<double> f{0.2, 0.4};
    const auto disp = stats::dispersion(f);
    o.require(disp.fano && near(*disp.fano, 1.0 / 30.0, 1e-12), "Fano fixture");
    const std::vector<double> s{0.0, 0.0, 0.0, 1.0};
    o.require(near(stats::skewness(s), 2.0 / std::sqrt(3.0), 1e-12), "skewness fixture");
    if (o.ok)
        o.detail = "500 KS pairs exact; KS, Fano and skewness fixtures";
    return o;
}

Outcome transitions()
{
    Outcome o;
    const MonthId m0{2020, 12}, m1{2021, 1};
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> users(1, 80);
    std::uniform_real_distribution<double> presence(0.2, 1.0);
    std::size_t rows = 0;
    for (int c = 0; c < 1000 && o.ok; ++c) {
        OpinionTable t;
        const int n = users(rng);
        std::bernoulli_distribution present(presence(rng));
        for (int u = 0; u < n; ++u) {
            const auto id = "u" + std::to_string(u);
            t.insert(id, m0, unit(rng));
            if (present(rng))
                t.insert(id, m1, unit(rng));
        }
        auto tm = transition_matrix(t, m0);
        for (int i = 0; i < kLabelCount; ++i) {
            if (tm.row_counts[i] == 0)
                continue;
            ++rows;
            double sum = 0.0;
            for (double p : tm.p[i])
                sum += p;
            o.require(near(sum, 1.0, 1e-12), "row does not sum to 1 in case " + std::to_string(c));
        }
    }
    OpinionTable fx;
    fx.insert("a", m0, 0.1);
    fx.insert("b", m0, 0.2);
    fx.insert("c", m0, 0.3);
    fx.insert("a", m1, 0.1);
    fx.insert("b", m1, 0.5);
    fx.insert("c", m1, 0.2);
    const auto tm = transition_matrix(fx, m0);
    o.require(tm.at(LeaningLabel::Democrat, LeaningLabel::Democrat) == 2.0 / 3.0, "p_DD fixture");
    if (o.ok)
        o.detail = "1000 tables, " + std::to_string(rows) + " populated rows; p_DD fixture exact";
    return o;
}

double score_of(LeaningLabel l)
{
    switch (l) {
    case LeaningLabel::Democrat: return 0.1;
    case LeaningLabel::Neutral: return 0.5;
    case LeaningLabel::Republican: return 0.9;
    }
    return 0.5;
}

Outcome graph_metrics()
{
    Outcome o;
    using L = LeaningLabel;
    auto node = [](SnapshotGraph& g, const std::string& id, L l) { g.add_node(id, {score_of(l), l}); };

    SnapshotGraph tri(kMonth);
    for (const char* id : {"a", "b", "c"})
        node(tri, id, L::Democrat);
    tri.add_edge("a", "b", 1);
    tri.add_edge("b", "c", 1);
    tri.add_edge("a", "c", 1);
    o.require(near(degree_stats(tri).avg_degree, 2.0, 1e-12), "triangle mean degree");

    SnapshotGraph bip(kMonth);
    for (const char* d : {"d1", "d2", "d3"})
        node(bip, d, L::Democrat);
    for (const char* r : {"r1", "r2"})
        node(bip, r, L::Republican);
    for (const char* d : {"d1", "d2", "d3"})
        for (const char* r : {"r1", "r2"})
            bip.add_edge(d, r, 1);
    o.require(near(categorical_assortativity(bip), -1.0, 1e-12), "bipartite r");

    SnapshotGraph mix(kMonth);
    for (const char* d : {"d1", "d2", "d3", "d4"})
        node(mix, d, L::Democrat);
    for (const char* r : {"r1", "r2", "r3", "r4"})
        node(mix, r, L::Republican);
    mix.add_edge("d1", "d2", 1);
    mix.add_edge("r1", "r2", 1);
    mix.add_edge("d3", "r3", 1);
    mix.add_edge("d4", "r4", 1);
    o.require(near(categorical_assortativity(mix), 0.0, 1e-12), "mixed fixture r");

    // label permutations on a fixed random graph
    std::mt19937_64 rng(2000);
    constexpr int kNodes = 200, kEdges = 2000;
    std::vector<L> labels(kNodes);
    for (int i = 0; i < kNodes; ++i)
        labels[i] = kAllLabels[static_cast<std::size_t>(i % kLabelCount)];
    std::set<std::pair<int, int>> edges;
    std::uniform_int_distribution<int> pick(0, kNodes - 1);
    while (edges.size() < kEdges) {
        int a = pick(rng), b = pick(rng);
        if (a != b)
            edges.emplace(std::min(a, b), std::max(a, b));
    }
    double sum_r = 0.0;
    constexpr int kPerms = 100;
    for (int p = 0; p < kPerms; ++p) {
        std::shuffle(labels.begin(), labels.end(), rng);
        SnapshotGraph g(kMonth);
        for (int i = 0; i < kNodes; ++i)
            node(g, "n" + std::to_string(i), labels[i]);
        for (auto [a, b] : edges)
            g.add_edge("n" + std::to_string(a), "n" + std::to_string(b), 1);
        sum_r += categorical_assortativity(g);
    }
    const double mean_r = sum_r / kPerms;
    o.require(std::fabs(mean_r) < 0.05, "permutation mean r = " + std::to_string(mean_r));
    if (o.ok) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "fixtures exact; permutation mean r = %.4f", mean_r);
        o.detail = buf;
    }
    return o;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Runs one CLI invocation, either through the installed binary or in process.
int invoke(const std::string& cli, const std::vector<std::string>& args)
{
    if (!cli.empty()) {
        std::string cmd = "\"" + cli + "\"";
        for (const auto& a : args)
            cmd += " \"" + a + "\"";
        cmd += " >/dev/null 2>&1";
        return std::system(cmd.c_str());
    }
    std::vector<const char*> argv{"openmind"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream sink;
    return pipeline::run_cli(static_cast<int>(argv.size()), argv.data(), sink, sink);
}

Outcome determinism(const std::string& cli)
{
    Outcome o;
    const auto root = fs::temp_directory_path() / ("openmind_acceptance_" + std::to_string(std::random_device{}()));
    std::vector<std::string> names{"posts.csv", "interactions.csv", "estimates.csv", "skips.csv"};
    std::vector<std::string> first;
    for (int run = 0; run < 2 && o.ok; ++run) {
        const auto dir = root / ("run" + std::to_string(run));
        fs::create_directories(dir);
        const auto p = [&](const std::string& n) { return (dir / n).string(); };
        o.require(invoke(cli, {"simulate", "--seed", "7", "--posts-out", p("posts.csv"), "--interactions-out",
                               p("interactions.csv")})
                      == 0,
                  "simulate failed");
        o.require(invoke(cli, {"estimate", "--posts", p("posts.csv"), "--interactions", p("interactions.csv"),
                               "--out", p("estimates.csv"), "--skips", p("skips.csv")})
                      == 0,
                  "estimate failed");
        std::vector<std::string> contents;
        for (const auto& n : names)
            contents.push_back(slurp(dir / n));
        if (run == 0)
            first = contents;
        else
            for (std::size_t i = 0; i < names.size(); ++i)
                o.require(contents[i] == first[i], names[i] + " differs between runs");
    }
    std::size_t rows = 0;
    if (o.ok) {
        std::ifstream in(root / "run0" / "estimates.csv");
        try {
            auto parsed = io::parse_estimates(in);
            rows = parsed.rows.size();
            o.require(parsed.dropped == 0 && rows == parsed.data_rows, "estimates did not parse cleanly");
            o.require(rows > 0, "no estimates produced");
        } catch (const std::exception& e) {
            o.require(false, std::string("estimates parse error: ") + e.what());
        }
    }
    std::error_code ec;
    fs::remove_all(root, ec);
    if (o.ok)
        o.detail = "byte-identical outputs; " + std::to_string(rows) + " estimate rows parsed with 0 errors";
    return o;
}

}  // namespace

int main(int argc, char** argv)
{
    const std::string cli = argc > 1 ? argv[1] : "";
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"estimator hand traces", hand_traces},
        {"estimator matches brute-force oracle", oracle_equivalence},
        {"prefix-average recovery", recovery},
        {"simulator consensus and polarization", simulator_regimes},
        {"recovered bound never exceeds true epsilon", ground_truth_bound},
        {"statistics correctness", statistics},
        {"transition matrix rows", transitions},
        {"graph metrics", graph_metrics},
        {"pipeline determinism", [&] { return determinism(cli); }},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %zu. %s (%.2fs): %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                    o.detail.c_str());
        failures += o.ok ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
