#include "openmind/deffuant.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace openmind;
using namespace openmind::sim;
using openmind::testing::kind_of;

TEST_CASE("step fixtures")
{
    auto [a, b] = step(0.2, 0.4, 0.3, 0.3, 0.5);
    CHECK(a == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(b == doctest::Approx(0.3).epsilon(1e-12));

    auto [c, d] = step(0.1, 0.9, 0.3, 0.3, 0.5);
    CHECK(c == 0.1);
    CHECK(d == 0.9);

    // one-sided: only u accepts
    auto [e, f] = step(0.2, 0.8, 0.9, 0.1, 0.5);
    CHECK(e == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f == 0.8);
}

TEST_CASE("step properties")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> mu_dist(0.01, 0.5);
    for (int i = 0; i < 20000; ++i) {
        const double xu = unit(rng), xv = unit(rng), eu = unit(rng), ev = unit(rng), mu = mu_dist(rng);
        auto [u, v] = step(xu, xv, eu, ev, mu);
        CHECK(u >= 0.0);
        CHECK(u <= 1.0);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);

        // global bound with mutual acceptance contracts the gap by (1 - 2 mu)
        auto [gu, gv] = step(xu, xv, eu, eu, mu);
        const double gap = std::fabs(xu - xv);
        if (gap <= eu) {
            CHECK(std::fabs(gu - gv) == doctest::Approx((1.0 - 2.0 * mu) * gap).epsilon(1e-9));
            CHECK(std::fabs(gu - gv) <= gap + 1e-15);
        }
        // mu = 0.5 with mutual acceptance conserves the pair sum
        auto [hu, hv] = step(xu, xv, 1.0, 1.0, 0.5);
        CHECK(hu + hv == doctest::Approx(xu + xv).epsilon(1e-12));
    }
}

TEST_CASE("run is deterministic for a fixed seed")
{
    SimConfig cfg;
    cfg.n_agents = 30;
    cfg.n_steps = 3000;
    cfg.snapshot_every = 100;
    cfg.rng_seed = 42;
    auto a = run(cfg);
    auto b = run(cfg);
    CHECK(a == b);
    CHECK(a.snapshots.size() == 31);
    CHECK(a.interactions.size() == 3000);

    cfg.rng_seed = 43;
    CHECK_FALSE(run(cfg) == a);
}

TEST_CASE("opinions stay in [0,1] and the mean is invariant under mu = 0.5")
{
    SimConfig cfg;
    cfg.n_agents = 50;
    cfg.epsilon = 0.3;
    cfg.n_steps = 5000;
    cfg.snapshot_every = 50;
    cfg.rng_seed = 9;
    auto traj = run(cfg);
    const double mean0 = std::accumulate(traj.snapshots[0].opinions.begin(), traj.snapshots[0].opinions.end(), 0.0);
    for (const auto& s : traj.snapshots) {
        for (double x : s.opinions) {
            CHECK(x >= 0.0);
            CHECK(x <= 1.0);
        }
        const double mean = std::accumulate(s.opinions.begin(), s.opinions.end(), 0.0);
        CHECK(mean == doctest::Approx(mean0).epsilon(1e-9));
    }
    CHECK(traj.isolated_agents == 0);
}

TEST_CASE("consensus with a wide bound, clusters with a narrow one")
{
    SimConfig cfg;
    cfg.n_agents = 100;
    cfg.n_steps = 100000;
    cfg.snapshot_every = 100000;
    cfg.rng_seed = 1;
    cfg.epsilon = 1.0;
    auto wide = run(cfg).final_opinions();
    auto [lo, hi] = std::minmax_element(wide.begin(), wide.end());
    CHECK(*hi - *lo < 1e-3);

    cfg.epsilon = 0.2;
    auto narrow = run(cfg).final_opinions();
    CHECK(cluster_count(narrow, 0.05) >= 2);
}

TEST_CASE("heterogeneous bounds and logged acceptance")
{
    SimConfig cfg;
    cfg.n_agents = 4;
    cfg.epsilon = std::vector<double>{0.0, 1.0, 0.0, 1.0};
    cfg.initial_opinions = std::vector<double>{0.1, 0.4, 0.6, 0.9};
    cfg.n_steps = 200;
    cfg.snapshot_every = 200;
    cfg.rng_seed = 5;
    auto traj = run(cfg);
    // agents with a zero bound only move when they meet an identical opinion
    for (const auto& ev : traj.interactions) {
        if (cfg.epsilon_of(ev.agent_u) == 1.0)
            CHECK(ev.accepted_u);
        if (cfg.epsilon_of(ev.agent_v) == 1.0)
            CHECK(ev.accepted_v);
    }
    CHECK(traj.final_opinions()[0] == 0.1);
    CHECK(traj.final_opinions()[2] == 0.6);
}

TEST_CASE("matching pairing gives every agent one interaction per round")
{
    SimConfig cfg;
    cfg.n_agents = 11;
    cfg.pairing = Pairing::Matching;
    cfg.n_steps = 5 * 20;
    cfg.snapshot_every = 5;
    cfg.rng_seed = 3;
    auto traj = run(cfg);
    for (std::size_t round = 0; round < 20; ++round) {
        std::vector<int> seen(cfg.n_agents, 0);
        for (std::size_t k = 0; k < 5; ++k) {
            const auto& ev = traj.interactions[round * 5 + k];
            ++seen[ev.agent_u];
            ++seen[ev.agent_v];
        }
        CHECK(std::count(seen.begin(), seen.end(), 1) == 10);
        CHECK(std::count(seen.begin(), seen.end(), 0) == 1);
    }
}

TEST_CASE("explicit and random topologies")
{
    SimConfig cfg;
    cfg.n_agents = 5;
    cfg.topology = EdgeListTopology{{{0, 1}, {1, 2}, {2, 0}, {1, 0}}};
    cfg.n_steps = 100;
    cfg.snapshot_every = 10;
    auto traj = run(cfg);
    CHECK(traj.isolated_agents == 2);
    CHECK_FALSE(traj.warnings.empty());
    for (const auto& ev : traj.interactions) {
        CHECK(ev.agent_u < 3);
        CHECK(ev.agent_v < 3);
    }
    // isolated agents keep their opinions
    CHECK(traj.final_opinions()[3] == traj.snapshots[0].opinions[3]);

    cfg.n_agents = 40;
    cfg.topology = RandomTopology{0.2};
    auto rt = run(cfg);
    CHECK(rt == run(cfg));
}

TEST_CASE("invalid configurations")
{
    auto bad = [](auto mutate) {
        SimConfig cfg;
        mutate(cfg);
        return kind_of([&] { run(cfg); });
    };
    CHECK(bad([](SimConfig& c) { c.n_agents = 1; }) == ErrorKind::BadConfig);
    CHECK(bad([](SimConfig& c) { c.mu = 0.7; }) == ErrorKind::BadConfig);
    CHECK(bad([](SimConfig& c) { c.mu = 0.0; }) == ErrorKind::BadConfig);
    CHECK(bad([](SimConfig& c) { c.epsilon = 1.5; }) == ErrorKind::BadConfig);
    CHECK(bad([](SimConfig& c) { c.epsilon = std::vector<double>{0.1, 0.2}; }) == ErrorKind::BadConfig);
    CHECK(bad([](SimConfig& c) { c.snapshot_every = 0; }) == ErrorKind::BadConfig);
    CHECK(bad([](SimConfig& c) { c.snapshot_every = 333; }) == ErrorKind::BadConfig);
    CHECK(bad([](SimConfig& c) { c.topology = EdgeListTopology{{{0, 0}}}; }) == ErrorKind::BadConfig);
    CHECK(bad([](SimConfig& c) { c.topology = EdgeListTopology{{{0, 500}}}; }) == ErrorKind::BadConfig);
    CHECK(bad([](SimConfig& c) { c.topology = EdgeListTopology{}; }) == ErrorKind::BadConfig);
    CHECK(bad([](SimConfig& c) {
              c.topology = RandomTopology{0.5};
              c.pairing = Pairing::Matching;
          })
          == ErrorKind::BadConfig);
}

TEST_CASE("cluster_count")
{
    std::vector<double> two{0.1, 0.1, 0.9, 0.9};
    CHECK(cluster_count(two, 0.05) == 2);
    std::vector<double> same(7, 0.42);
    CHECK(cluster_count(same, 0.05) == 1);
    std::vector<double> chain{0.1, 0.14, 0.18};
    CHECK(cluster_count(chain, 0.05) == 1);
    CHECK(kind_of([] { cluster_count({}, 0.05); }) == ErrorKind::EmptyVector);
}

TEST_CASE("export_benchmark")
{
    Trajectory t;
    t.n_agents = 3;
    t.snapshots = {{0, {0.1, 0.5, 0.9}}, {1, {0.3, 0.3, 0.9}}};
    t.interactions = {{1, 0, 1, true, true}};
    auto b = export_benchmark(t, 1);
    CHECK(b.posts.size() == 6);
    REQUIRE(b.interactions.size() == 1);
    CHECK(b.months == std::vector<MonthId>{kBenchmarkOrigin, next_month(kBenchmarkOrigin)});
    CHECK(b.interactions[0].month == kBenchmarkOrigin);
    CHECK(b.interactions[0].user_a == "agent_0");
    CHECK(b.interactions[0].user_b == "agent_1");
    CHECK(b.interactions[0].count == 1);
    CHECK(b.posts[3].user_id == "agent_0");
    CHECK(b.posts[3].score == 0.3);
    // agent 2 posts but never interacts
    CHECK(std::none_of(b.interactions.begin(), b.interactions.end(),
                       [](const auto& r) { return r.user_a == "agent_2" || r.user_b == "agent_2"; }));

    Trajectory rep;
    rep.n_agents = 2;
    rep.snapshots = {{0, {0.1, 0.2}}, {3, {0.1, 0.2}}};
    rep.interactions = {{1, 0, 1, false, false}, {2, 1, 0, false, false}, {3, 0, 1, false, false}};
    auto rb = export_benchmark(rep, 3);
    REQUIRE(rb.interactions.size() == 1);
    CHECK(rb.interactions[0].count == 3);

    CHECK(kind_of([&] { export_benchmark(rep, 4); }) == ErrorKind::WindowLargerThanTrajectory);
    Trajectory single;
    single.n_agents = 2;
    single.snapshots = {{0, {0.1, 0.2}}};
    CHECK(kind_of([&] { export_benchmark(single, 1); }) == ErrorKind::WindowLargerThanTrajectory);
}

TEST_CASE("agent ids sort like their indices")
{
    CHECK(agent_id(7, 100) == "agent_07");
    CHECK(agent_id(99, 100) == "agent_99");
    CHECK(agent_id(3, 1000) == "agent_003");
    CHECK(agent_id(9, 10) == "agent_9");
    CHECK(agent_id(9, 100) < agent_id(10, 100));
}
