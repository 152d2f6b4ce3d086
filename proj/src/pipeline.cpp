#include "openmind/pipeline.hpp"

#include "openmind/io.hpp"
#include "openmind/stats.hpp"
#include "openmind/transitions.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

namespace openmind::pipeline {

// ---------------------------------------------------------------------------
// manifest

void RunManifest::check() const
{
    for (const auto& s : stages)
        if (s.ingested != s.used + s.dropped)
            throw Error(ErrorKind::InvariantViolation,
                        "stage '" + s.stage + "' does not reconcile: " + std::to_string(s.ingested)
                            + " != " + std::to_string(s.used) + " + " + std::to_string(s.dropped));
}

nlohmann::json RunManifest::to_json() const
{
    nlohmann::json j;
    j["command"] = command;
    j["tool_version"] = tool_version;
    j["inputs"] = inputs;
    if (thresholds)
        j["thresholds"] = {{"dem_max", thresholds->dem_max}, {"rep_min", thresholds->rep_min}};
    if (first_month)
        j["month_range"] = {first_month->to_string(), last_month.value_or(*first_month).to_string()};
    if (seed)
        j["seed"] = *seed;
    nlohmann::json st = nlohmann::json::array();
    for (const auto& s : stages) {
        nlohmann::json e{{"stage", s.stage}, {"ingested", s.ingested}, {"used", s.used}, {"dropped", s.dropped}};
        if (!s.detail.empty())
            e["detail"] = s.detail;
        st.push_back(e);
    }
    j["stages"] = st;
    j["outputs"] = outputs;
    if (!warnings.empty())
        j["warnings"] = warnings;
    return j;
}

double SkipAccounting::coverage() const
{
    return both_months == 0 ? 0.0 : static_cast<double>(estimated) / static_cast<double>(both_months);
}

double SkipAccounting::no_neighbors_fraction() const
{
    return both_months == 0 ? 0.0 : static_cast<double>(no_neighbors) / static_cast<double>(both_months);
}

SkipAccounting account_skips(const EstimateBatch& batch)
{
    SkipAccounting a;
    a.from = batch.from;
    a.to = batch.to;
    a.estimated = batch.results.size();
    a.both_months = batch.both_months;
    for (const auto& [user, reason] : batch.skips) {
        switch (reason) {
        case SkipReason::NoOpinionAtT: ++a.no_opinion_at_t; break;
        case SkipReason::NoOpinionAtT1: ++a.no_opinion_at_t1; break;
        case SkipReason::NoNeighbors: ++a.no_neighbors; break;
        }
    }
    if (a.estimated + a.no_neighbors != a.both_months)
        throw Error(ErrorKind::InvariantViolation, "skip accounting does not reconcile for " + a.from.to_string());
    return a;
}

// ---------------------------------------------------------------------------
// output staging

struct OutputSet::Pending {
    fs::path path;
    std::ostringstream buffer;
};

OutputSet::OutputSet() = default;

OutputSet::~OutputSet()
{
    if (committed_)
        return;
    std::error_code ec;
    for (const auto& f : files_)
        fs::remove(fs::path(f->path) += ".tmp", ec);
}

std::ostream& OutputSet::open(const fs::path& path)
{
    auto p = std::make_unique<Pending>();
    p->path = path;
    files_.push_back(std::move(p));
    return files_.back()->buffer;
}

void OutputSet::commit()
{
    std::vector<fs::path> renamed;
    try {
        for (const auto& f : files_) {
            if (f->path.has_parent_path())
                fs::create_directories(f->path.parent_path());
            auto tmp = fs::path(f->path) += ".tmp";
            {
                std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
                if (!out)
                    throw Error(ErrorKind::Io, "cannot write " + tmp.string());
                const auto text = f->buffer.str();
                out.write(text.data(), static_cast<std::streamsize>(text.size()));
                if (!out.flush())
                    throw Error(ErrorKind::Io, "write failed for " + tmp.string());
            }
        }
        for (const auto& f : files_) {
            fs::rename(fs::path(f->path) += ".tmp", f->path);
            renamed.push_back(f->path);
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& f : files_)
            fs::remove(fs::path(f->path) += ".tmp", ec);
        for (const auto& p : renamed)
            fs::remove(p, ec);
        throw;
    }
    committed_ = true;
}

std::vector<std::string> OutputSet::paths() const
{
    std::vector<std::string> out;
    for (const auto& f : files_)
        out.push_back(f->path.string());
    return out;
}

// ---------------------------------------------------------------------------
// shared stages

namespace {

std::ifstream open_input(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Io, "cannot open " + path.string());
    return in;
}

std::vector<PostScore> load_posts(const fs::path& path, const CommonOptions& common, RunManifest& manifest)
{
    auto in = open_input(path);
    auto parsed = io::parse_posts(in, common.lenient);
    manifest.inputs["posts"] = path.string();
    manifest.stages.push_back({"parse_posts", parsed.data_rows, parsed.rows.size(), parsed.dropped, {}});
    return std::move(parsed.rows);
}

std::vector<InteractionRecord> load_interactions(const fs::path& path, const CommonOptions& common,
                                                 RunManifest& manifest)
{
    auto in = open_input(path);
    auto parsed = io::parse_interactions(in, common.lenient);
    manifest.inputs["interactions"] = path.string();
    manifest.stages.push_back({"parse_interactions", parsed.data_rows, parsed.rows.size(), parsed.dropped, {}});
    return std::move(parsed.rows);
}

OpinionTable make_table(const std::vector<PostScore>& posts, const CommonOptions& common, RunManifest& manifest)
{
    auto table = build_opinion_table(posts, common.thresholds);
    manifest.thresholds = common.thresholds;
    auto months = table.months();
    if (!months.empty()) {
        manifest.first_month = months.front();
        manifest.last_month = months.back();
    }
    manifest.stages.push_back({"opinion_table", posts.size(), posts.size(), 0, {{"entries", table.size()}}});
    return table;
}

/// One snapshot per month present in the table, chronological.
std::vector<SnapshotGraph> make_snapshots(const OpinionTable& table, const std::vector<InteractionRecord>& records,
                                          RunManifest& manifest)
{
    std::map<MonthId, std::vector<InteractionRecord>> by_month;
    for (const auto& r : records)
        by_month[r.month].push_back(r);

    StageCounts stage{"snapshots", records.size(), 0, 0, {}};
    std::vector<SnapshotGraph> graphs;
    std::set<MonthId> table_months;
    for (auto m : table.months()) {
        table_months.insert(m);
        auto it = by_month.find(m);
        static const std::vector<InteractionRecord> none;
        const auto& recs = it == by_month.end() ? none : it->second;
        auto built = build_snapshot(m, recs, table);
        stage.used += built.used_records;
        stage.dropped += built.dropped_records;
        stage.detail["dropped_unscored_endpoint"] += built.dropped_records;
        graphs.push_back(std::move(built.graph));
    }
    for (const auto& [m, recs] : by_month) {
        if (!table_months.contains(m)) {
            stage.dropped += recs.size();
            stage.detail["dropped_month_without_opinions"] += recs.size();
        }
    }
    manifest.stages.push_back(stage);
    return graphs;
}

struct Estimation {
    std::vector<EstimationResult> results;
    std::vector<SkipAccounting> accounting;
};

Estimation estimate_pairs(const OpinionTable& table, const std::vector<SnapshotGraph>& graphs,
                          RunManifest& manifest)
{
    Estimation est;
    StageCounts stage{"estimate", 0, 0, 0, {}};
    for (const auto& g : graphs) {
        const auto m = g.month();
        if (table.month(next_month(m)).empty())
            continue;
        auto batch = estimate_all(g, table, m);
        auto acc = account_skips(batch);
        stage.ingested += batch.results.size() + batch.skips.size();
        stage.used += batch.results.size();
        stage.dropped += batch.skips.size();
        stage.detail["NoOpinionAtT"] += acc.no_opinion_at_t;
        stage.detail["NoOpinionAtT1"] += acc.no_opinion_at_t1;
        stage.detail["NoNeighbors"] += acc.no_neighbors;
        est.accounting.push_back(acc);
        for (auto& r : batch.results)
            est.results.push_back(std::move(r));
    }
    if (est.accounting.empty())
        throw Error(ErrorKind::InsufficientMonths, "no pair of contiguous months to estimate");
    manifest.stages.push_back(stage);
    return est;
}

void finish(RunManifest& manifest, OutputSet& outputs, const CommonOptions& common)
{
    manifest.outputs = outputs.paths();
    manifest.check();
    if (common.manifest)
        outputs.open(*common.manifest) << manifest.to_json().dump(2) << '\n';
    outputs.commit();
}

}  // namespace

// ---------------------------------------------------------------------------
// commands

RunManifest run_leaning(const LeaningOptions& opt)
{
    opt.common.thresholds.validate();
    RunManifest manifest;
    manifest.command = "leaning";
    auto posts = load_posts(opt.posts, opt.common, manifest);
    auto table = make_table(posts, opt.common, manifest);

    OutputSet outputs;
    io::write_opinion_table(outputs.open(opt.out), table);
    if (opt.overall) {
        std::set<std::string> users;
        for (const auto& [m, slice] : table.by_month())
            for (const auto& [user, entry] : slice)
                users.insert(user);
        auto& out = outputs.open(*opt.overall);
        out << "user_id,score,label\n";
        for (const auto& user : users) {
            auto [score, label] = overall_leaning(table, user);
            out << user << ',' << io::format_real(score) << ',' << label_code(label) << '\n';
        }
    }
    finish(manifest, outputs, opt.common);
    return manifest;
}

RunManifest run_graph_stats(const GraphStatsOptions& opt)
{
    opt.common.thresholds.validate();
    RunManifest manifest;
    manifest.command = "graph-stats";
    auto posts = load_posts(opt.posts, opt.common, manifest);
    auto records = load_interactions(opt.interactions, opt.common, manifest);
    auto table = make_table(posts, opt.common, manifest);
    auto graphs = make_snapshots(table, records, manifest);
    auto report = monthly_stats_report(graphs);

    OutputSet outputs;
    io::write_graph_stats(outputs.open(opt.out), report);
    finish(manifest, outputs, opt.common);
    return manifest;
}

RunManifest run_transitions(const TransitionsOptions& opt)
{
    opt.common.thresholds.validate();
    RunManifest manifest;
    manifest.command = "transitions";
    auto posts = load_posts(opt.posts, opt.common, manifest);
    auto table = make_table(posts, opt.common, manifest);
    auto series = transition_series(table);

    OutputSet outputs;
    outputs.open(opt.out) << io::transitions_to_json(series).dump(2) << '\n';
    if (opt.retention) {
        auto& out = outputs.open(*opt.retention);
        out << "month_from,month_to,retention\n";
        auto months = table.months();
        months.pop_back();
        for (auto m : months)
            out << m.to_string() << ',' << next_month(m).to_string() << ',' << io::format_real(retention(table, m))
                << '\n';
    }
    finish(manifest, outputs, opt.common);
    return manifest;
}

RunManifest run_estimate(const EstimateOptions& opt)
{
    opt.common.thresholds.validate();
    RunManifest manifest;
    manifest.command = "estimate";
    auto posts = load_posts(opt.posts, opt.common, manifest);
    auto records = load_interactions(opt.interactions, opt.common, manifest);
    auto table = make_table(posts, opt.common, manifest);
    auto graphs = make_snapshots(table, records, manifest);
    auto est = estimate_pairs(table, graphs, manifest);

    OutputSet outputs;
    io::write_estimates(outputs.open(opt.out), est.results);
    if (opt.skips) {
        auto& out = outputs.open(*opt.skips);
        out << "month_from,month_to,estimated,no_opinion_at_t,no_opinion_at_t1,no_neighbors,both_months,"
               "coverage,no_neighbors_fraction\n";
        for (const auto& a : est.accounting)
            out << a.from.to_string() << ',' << a.to.to_string() << ',' << a.estimated << ',' << a.no_opinion_at_t
                << ',' << a.no_opinion_at_t1 << ',' << a.no_neighbors << ',' << a.both_months << ','
                << io::format_real(a.coverage()) << ',' << io::format_real(a.no_neighbors_fraction()) << '\n';
    }
    finish(manifest, outputs, opt.common);
    return manifest;
}

RunManifest run_simulate(const SimulateOptions& opt)
{
    RunManifest manifest;
    manifest.command = "simulate";
    manifest.seed = opt.config.rng_seed;

    auto traj = sim::run(opt.config);
    manifest.warnings = traj.warnings;
    const std::size_t window = opt.window == 0 ? opt.config.snapshot_every : opt.window;
    auto bench = sim::export_benchmark(traj, window);
    if (!bench.months.empty()) {
        manifest.first_month = bench.months.front();
        manifest.last_month = bench.months.back();
    }
    manifest.stages.push_back({"simulate", traj.interactions.size(), traj.interactions.size(), 0,
                               {{"snapshots", traj.snapshots.size()}, {"isolated_agents", traj.isolated_agents}}});
    manifest.stages.push_back({"export", bench.posts.size() + bench.interactions.size(),
                               bench.posts.size() + bench.interactions.size(), 0,
                               {{"posts", bench.posts.size()}, {"interaction_records", bench.interactions.size()}}});

    OutputSet outputs;
    io::write_posts(outputs.open(opt.posts_out), bench.posts);
    io::write_interactions(outputs.open(opt.interactions_out), bench.interactions);
    if (opt.truth_out) {
        auto& out = outputs.open(*opt.truth_out);
        out << "user_id,epsilon\n";
        for (std::size_t i = 0; i < opt.config.n_agents; ++i)
            out << sim::agent_id(i, opt.config.n_agents) << ',' << io::format_exact(opt.config.epsilon_of(i)) << '\n';
    }
    finish(manifest, outputs, opt.common);
    return manifest;
}

nlohmann::json ValidationReport::to_json() const
{
    return nlohmann::json{
        {"epsilon", epsilon},
        {"agents", agents},
        {"seed", seed},
        {"windows", windows},
        {"results", results},
        {"exact_single_neighbor", exact_single},
        {"bound_violations", violations},
        {"recovery_property_holds", passed()},
        {"updating_agents", updating},
        {"updating_within_epsilon", updating_within_eps},
        {"updating_within_epsilon_fraction",
         updating == 0 ? 0.0 : static_cast<double>(updating_within_eps) / static_cast<double>(updating)},
        {"final_clusters", final_clusters},
        {"polarized", polarized},
    };
}

ValidationReport validate(const ValidateOptions& opt, std::vector<EstimationResult>* estimates)
{
    if (opt.agents < 2)
        throw Error(ErrorKind::BadConfig, "validate needs at least two agents");
    if (opt.windows < 1)
        throw Error(ErrorKind::BadConfig, "validate needs at least one window");

    const std::size_t round = opt.agents / 2;
    sim::SimConfig cfg;
    cfg.n_agents = opt.agents;
    cfg.epsilon = opt.epsilon;
    cfg.mu = opt.mu;
    cfg.topology = sim::CompleteTopology{};
    cfg.pairing = sim::Pairing::Matching;
    cfg.n_steps = opt.windows * round;
    cfg.snapshot_every = round;
    cfg.rng_seed = opt.seed;

    auto traj = sim::run(cfg);
    auto bench = sim::export_benchmark(traj, round);
    auto table = build_opinion_table(bench.posts, opt.common.thresholds);

    std::map<MonthId, std::vector<InteractionRecord>> by_month;
    for (const auto& r : bench.interactions)
        by_month[r.month].push_back(r);

    ValidationReport rep;
    rep.epsilon = opt.epsilon;
    rep.agents = opt.agents;
    rep.seed = opt.seed;
    rep.windows = opt.windows;
    for (std::size_t k = 0; k + 1 < bench.months.size(); ++k) {
        const auto m = bench.months[k];
        auto built = build_snapshot(m, by_month[m], table);
        auto batch = estimate_all(built.graph, table, m);
        for (const auto& r : batch.results) {
            ++rep.results;
            const double x_t = table.find(r.user_id, r.from_month)->score;
            const double x_t1 = table.find(r.user_id, r.to_month)->score;
            if (r.abs_error == 0.0 && r.prefix_j == 1) {
                ++rep.exact_single;
                if (r.cb_hat > opt.epsilon)
                    ++rep.violations;
            }
            if (x_t1 != x_t) {
                ++rep.updating;
                if (r.cb_hat <= opt.epsilon)
                    ++rep.updating_within_eps;
            }
        }
        if (estimates)
            estimates->insert(estimates->end(), batch.results.begin(), batch.results.end());
    }
    rep.final_clusters = sim::cluster_count(traj.final_opinions(), opt.gap_tolerance);
    rep.polarized = rep.final_clusters >= 2;
    return rep;
}

RunManifest run_validate(const ValidateOptions& opt, ValidationReport* report_out)
{
    RunManifest manifest;
    manifest.command = "validate";
    manifest.seed = opt.seed;

    std::vector<EstimationResult> estimates;
    auto rep = validate(opt, &estimates);
    manifest.stages.push_back({"estimate", rep.results, rep.results, 0, {{"exact_single_neighbor", rep.exact_single}}});

    OutputSet outputs;
    outputs.open(opt.out) << rep.to_json().dump(2) << '\n';
    if (opt.estimates_out)
        io::write_estimates(outputs.open(*opt.estimates_out), estimates);
    finish(manifest, outputs, opt.common);
    if (report_out)
        *report_out = rep;
    if (!rep.passed())
        throw Error(ErrorKind::InvariantViolation,
                    std::to_string(rep.violations) + " exact single-neighbor estimates exceed epsilon");
    return manifest;
}

namespace {

constexpr std::pair<LeaningLabel, LeaningLabel> kKsPairs[] = {
    {LeaningLabel::Democrat, LeaningLabel::Neutral},
    {LeaningLabel::Democrat, LeaningLabel::Republican},
    {LeaningLabel::Neutral, LeaningLabel::Republican},
};

struct Groups {
    std::vector<double> all;
    std::array<std::vector<double>, kLabelCount> by_label;
};

void write_ks_rows(std::ostream& out, const std::string& scope, const std::string& month, const Groups& g)
{
    for (auto [a, b] : kKsPairs) {
        const auto& sa = g.by_label[label_index(a)];
        const auto& sb = g.by_label[label_index(b)];
        if (sa.empty() || sb.empty())
            continue;
        auto ks = stats::ks_2samp(sa, sb);
        out << scope << ',' << month << ',' << label_code(a) << ',' << label_code(b) << ',' << sa.size() << ','
            << sb.size() << ',' << io::format_real(ks.d_statistic) << ',' << io::format_real(ks.p_value) << '\n';
    }
}

void write_skew_row(std::ostream& out, const std::string& scope, const std::string& month, const std::string& group,
                    const std::vector<double>& values)
{
    std::optional<double> mean, skew;
    if (!values.empty())
        mean = stats::mean(values);
    try {
        skew = stats::skewness(values);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::TooFewObservations && e.kind() != ErrorKind::ConstantSample)
            throw;
    }
    out << scope << ',' << month << ',' << group << ',' << values.size() << ',' << io::format_real(mean) << ','
        << io::format_real(skew) << '\n';
}

}  // namespace

RunManifest run_report(const ReportOptions& opt)
{
    opt.common.thresholds.validate();
    RunManifest manifest;
    manifest.command = "report";
    auto posts = load_posts(opt.posts, opt.common, manifest);
    auto table = make_table(posts, opt.common, manifest);

    auto in = open_input(opt.estimates);
    auto parsed = io::parse_estimates(in, opt.common.lenient);
    manifest.inputs["estimates"] = opt.estimates.string();
    manifest.stages.push_back({"parse_estimates", parsed.data_rows, parsed.rows.size(), parsed.dropped, {}});

    Groups pooled;
    std::map<MonthId, Groups> monthly;
    std::map<std::string, std::vector<std::pair<MonthId, double>>> per_user;
    for (const auto& r : parsed.rows) {
        const auto* entry = table.find(r.user_id, r.from_month);
        if (!entry)
            throw Error(ErrorKind::UnknownUser,
                        r.user_id + " has an estimate but no opinion in " + r.from_month.to_string());
        const int li = label_index(entry->label);
        pooled.all.push_back(r.cb_hat);
        pooled.by_label[li].push_back(r.cb_hat);
        monthly[r.from_month].all.push_back(r.cb_hat);
        monthly[r.from_month].by_label[li].push_back(r.cb_hat);
        per_user[r.user_id].emplace_back(r.from_month, r.cb_hat);
    }

    OutputSet outputs;
    const auto dir = opt.out_dir;
    auto hist = [&](const std::string& name, const std::vector<double>& values) {
        io::write_histogram(outputs.open(dir / ("histogram_" + name + ".csv")),
                            stats::histogram(values, opt.bins, 0.0, 1.0));
    };
    hist("all", pooled.all);
    for (auto l : kAllLabels)
        hist(std::string(1, label_code(l)), pooled.by_label[label_index(l)]);
    for (const auto& [m, g] : monthly) {
        hist(m.to_string(), g.all);
        for (auto l : kAllLabels)
            hist(m.to_string() + "_" + label_code(l), g.by_label[label_index(l)]);
    }

    auto& ks = outputs.open(dir / "ks.csv");
    ks << "scope,month_from,group_a,group_b,n_a,n_b,d,p_value\n";
    for (const auto& [m, g] : monthly)
        write_ks_rows(ks, "per_month", m.to_string(), g);
    write_ks_rows(ks, "pooled", "all", pooled);

    auto& skew = outputs.open(dir / "skewness.csv");
    skew << "scope,month_from,group,n,mean,skewness\n";
    auto skew_rows = [&](const std::string& scope, const std::string& month, const Groups& g) {
        write_skew_row(skew, scope, month, "all", g.all);
        for (auto l : kAllLabels)
            write_skew_row(skew, scope, month, std::string(1, label_code(l)), g.by_label[label_index(l)]);
    };
    for (const auto& [m, g] : monthly)
        skew_rows("per_month", m.to_string(), g);
    skew_rows("pooled", "all", pooled);

    std::vector<stats::DispersionSummary> disp;
    for (auto& [user, series] : per_user) {
        if (series.size() < 2)
            continue;
        std::sort(series.begin(), series.end());
        std::vector<double> values;
        for (const auto& [m, v] : series)
            values.push_back(v);
        disp.push_back(stats::dispersion(values, user));
    }
    io::write_dispersion(outputs.open(dir / "dispersion.csv"), disp);
    manifest.stages.push_back({"dispersion", per_user.size(), disp.size(), per_user.size() - disp.size(),
                               {{"users_with_single_estimate", per_user.size() - disp.size()}}});

    finish(manifest, outputs, opt.common);
    return manifest;
}

}  // namespace openmind::pipeline
