#include "openmind/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <ostream>

namespace openmind::pipeline {

namespace {

void add_common(CLI::App* cmd, CommonOptions& common, bool thresholds = true)
{
    cmd->add_flag("--lenient", common.lenient, "Count and skip malformed rows instead of failing");
    cmd->add_option("--manifest", common.manifest, "Write a JSON run manifest");
    if (thresholds) {
        cmd->add_option("--dem-threshold", common.thresholds.dem_max, "Democrat if score <= this")
            ->capture_default_str();
        cmd->add_option("--rep-threshold", common.thresholds.rep_min, "Republican if score >= this")
            ->capture_default_str();
    }
}

std::vector<double> read_epsilon_file(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::vector<double> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(line, &used));
            if (used != line.size())
                throw std::invalid_argument(line);
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::MalformedRow, "'" + line + "' is not a number", line_no);
        }
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> read_edges_file(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line == "u,v")
            continue;
        auto comma = line.find(',');
        try {
            if (comma == std::string::npos)
                throw std::invalid_argument(line);
            edges.emplace_back(std::stoul(line.substr(0, comma)), std::stoul(line.substr(comma + 1)));
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::MalformedRow, "expected 'u,v'", line_no);
        }
    }
    return edges;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Estimate per-user confidence bounds from longitudinal opinion and interaction data"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    LeaningOptions leaning;
    auto* c_leaning = app.add_subcommand("leaning", "Posts CSV -> monthly opinion table CSV");
    c_leaning->add_option("--posts", leaning.posts, "Posts CSV (user_id,month,score)")->required();
    c_leaning->add_option("--out", leaning.out, "Opinion table CSV")->required();
    c_leaning->add_option("--overall", leaning.overall, "Per-user overall leaning CSV");
    add_common(c_leaning, leaning.common);

    GraphStatsOptions graph;
    auto* c_graph = app.add_subcommand("graph-stats", "Per-month network statistics CSV");
    c_graph->add_option("--posts", graph.posts)->required();
    c_graph->add_option("--interactions", graph.interactions, "Interactions CSV (month,user_a,user_b,count)")
        ->required();
    c_graph->add_option("--out", graph.out)->required();
    add_common(c_graph, graph.common);

    TransitionsOptions trans;
    auto* c_trans = app.add_subcommand("transitions", "Leaning transition matrices JSON");
    c_trans->add_option("--posts", trans.posts)->required();
    c_trans->add_option("--out", trans.out)->required();
    c_trans->add_option("--retention", trans.retention, "Monthly retention CSV");
    add_common(c_trans, trans.common);

    EstimateOptions est;
    auto* c_est = app.add_subcommand("estimate", "Confidence-bound estimates CSV");
    c_est->add_option("--posts", est.posts)->required();
    c_est->add_option("--interactions", est.interactions)->required();
    c_est->add_option("--out", est.out)->required();
    c_est->add_option("--skips", est.skips, "Per-month skip accounting CSV");
    add_common(c_est, est.common);

    SimulateOptions simo;
    simo.config.n_steps = 10000;
    simo.config.snapshot_every = 500;
    double sim_epsilon = 0.2;
    std::optional<fs::path> epsilon_file, edges_file;
    std::string topology = "complete", pairing = "random";
    double edge_prob = 0.1;
    auto* c_sim = app.add_subcommand("simulate", "Run the bounded-confidence simulator and emit posts/interactions");
    c_sim->add_option("--agents", simo.config.n_agents)->capture_default_str();
    c_sim->add_option("--epsilon", sim_epsilon, "Global confidence bound")->capture_default_str();
    c_sim->add_option("--epsilon-file", epsilon_file, "One confidence bound per line, one line per agent");
    c_sim->add_option("--mu", simo.config.mu, "Convergence parameter")->capture_default_str();
    c_sim->add_option("--topology", topology)
        ->check(CLI::IsMember({"complete", "random", "edges"}))
        ->capture_default_str();
    c_sim->add_option("--edge-prob", edge_prob, "Edge probability for --topology random")->capture_default_str();
    c_sim->add_option("--edges-file", edges_file, "Edge list (u,v agent indices) for --topology edges");
    c_sim->add_option("--pairing", pairing)->check(CLI::IsMember({"random", "matching"}))->capture_default_str();
    c_sim->add_option("--steps", simo.config.n_steps)->capture_default_str();
    c_sim->add_option("--snapshot-every", simo.config.snapshot_every)->capture_default_str();
    c_sim->add_option("--window", simo.window, "Steps per synthetic month (default: --snapshot-every)");
    c_sim->add_option("--seed", simo.config.rng_seed)->capture_default_str();
    c_sim->add_option("--posts-out", simo.posts_out)->required();
    c_sim->add_option("--interactions-out", simo.interactions_out)->required();
    c_sim->add_option("--truth-out", simo.truth_out, "Ground-truth epsilon per agent CSV");
    add_common(c_sim, simo.common, false);

    ValidateOptions val;
    auto* c_val = app.add_subcommand("validate", "Simulate, estimate, and check recovered bounds against the truth");
    c_val->add_option("--epsilon", val.epsilon)->capture_default_str();
    c_val->add_option("--agents", val.agents)->capture_default_str();
    c_val->add_option("--seed", val.seed)->capture_default_str();
    c_val->add_option("--windows", val.windows, "Synthetic months (one interaction per agent each)")
        ->capture_default_str();
    c_val->add_option("--mu", val.mu)->capture_default_str();
    c_val->add_option("--gap-tolerance", val.gap_tolerance, "Cluster split gap")->capture_default_str();
    c_val->add_option("--out", val.out, "Validation report JSON")->required();
    c_val->add_option("--estimates-out", val.estimates_out);
    add_common(c_val, val.common);

    ReportOptions rep;
    auto* c_rep = app.add_subcommand("report", "Histograms, KS tests, skewness and dispersion of estimates");
    c_rep->add_option("--estimates", rep.estimates)->required();
    c_rep->add_option("--posts", rep.posts)->required();
    c_rep->add_option("--out-dir", rep.out_dir)->required();
    c_rep->add_option("--bins", rep.bins)->capture_default_str()->check(CLI::PositiveNumber);
    add_common(c_rep, rep.common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    try {
        RunManifest manifest;
        if (c_leaning->parsed()) {
            manifest = run_leaning(leaning);
        } else if (c_graph->parsed()) {
            manifest = run_graph_stats(graph);
        } else if (c_trans->parsed()) {
            manifest = run_transitions(trans);
        } else if (c_est->parsed()) {
            manifest = run_estimate(est);
        } else if (c_sim->parsed()) {
            if (epsilon_file)
                simo.config.epsilon = read_epsilon_file(*epsilon_file);
            else
                simo.config.epsilon = sim_epsilon;
            simo.config.pairing = pairing == "matching" ? sim::Pairing::Matching : sim::Pairing::RandomEdge;
            if (topology == "random")
                simo.config.topology = sim::RandomTopology{edge_prob};
            else if (topology == "edges") {
                if (!edges_file)
                    throw Error(ErrorKind::BadConfig, "--topology edges needs --edges-file");
                simo.config.topology = sim::EdgeListTopology{read_edges_file(*edges_file)};
            }
            manifest = run_simulate(simo);
        } else if (c_val->parsed()) {
            ValidationReport report;
            manifest = run_validate(val, &report);
            out << report.to_json().dump(2) << '\n';
        } else if (c_rep->parsed()) {
            manifest = run_report(rep);
        }
        for (const auto& w : manifest.warnings)
            err << "warning: " << w << '\n';
        for (const auto& s : manifest.stages)
            if (s.dropped > 0)
                err << manifest.command << ": stage " << s.stage << " dropped " << s.dropped << " of " << s.ingested
                    << '\n';
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.is_internal() ? 3 : 2;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace openmind::pipeline
