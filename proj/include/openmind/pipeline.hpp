#pragma once

#include "openmind/cb_estimator.hpp"
#include "openmind/deffuant.hpp"
#include "openmind/leaning.hpp"
#include "openmind/temporal_graph.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace openmind::pipeline {

inline constexpr std::string_view kToolVersion = "0.1.0";

namespace fs = std::filesystem;

/// Record flow through one stage. `ingested == used + dropped` must hold.
struct StageCounts {
    std::string stage;
    std::size_t ingested = 0;
    std::size_t used = 0;
    std::size_t dropped = 0;
    std::map<std::string, std::size_t> detail;
};

struct RunManifest {
    std::string command;
    std::string tool_version{kToolVersion};
    std::map<std::string, std::string> inputs;
    std::optional<Thresholds> thresholds;
    std::optional<MonthId> first_month;
    std::optional<MonthId> last_month;
    std::optional<std::uint64_t> seed;
    std::vector<StageCounts> stages;
    std::vector<std::string> outputs;
    std::vector<std::string> warnings;

    /// Throws InvariantViolation when any stage fails to reconcile.
    void check() const;
    nlohmann::json to_json() const;
};

/// Per month pair skip accounting for the estimator.
struct SkipAccounting {
    MonthId from;
    MonthId to;
    std::size_t estimated = 0;
    std::size_t no_opinion_at_t = 0;
    std::size_t no_opinion_at_t1 = 0;
    std::size_t no_neighbors = 0;
    /// Users with opinions in both months; the coverage denominator.
    std::size_t both_months = 0;

    /// estimated / both_months, 0 when nobody has both opinions.
    double coverage() const;
    /// no_neighbors / both_months; coverage() + this == 1 when both_months > 0.
    double no_neighbors_fraction() const;
};

SkipAccounting account_skips(const EstimateBatch& batch);

/// Buffers output files and writes them all at commit. Nothing is left on
/// disk if commit fails part way or is never reached.
class OutputSet {
public:
    OutputSet();
    OutputSet(const OutputSet&) = delete;
    OutputSet& operator=(const OutputSet&) = delete;
    ~OutputSet();

    std::ostream& open(const fs::path& path);
    void commit();
    std::vector<std::string> paths() const;

private:
    struct Pending;
    std::vector<std::unique_ptr<Pending>> files_;
    bool committed_ = false;
};

struct CommonOptions {
    bool lenient = false;
    Thresholds thresholds;
    std::optional<fs::path> manifest;
};

struct LeaningOptions {
    CommonOptions common;
    fs::path posts;
    fs::path out;
    std::optional<fs::path> overall;
};

struct GraphStatsOptions {
    CommonOptions common;
    fs::path posts;
    fs::path interactions;
    fs::path out;
};

struct TransitionsOptions {
    CommonOptions common;
    fs::path posts;
    fs::path out;
    std::optional<fs::path> retention;
};

struct EstimateOptions {
    CommonOptions common;
    fs::path posts;
    fs::path interactions;
    fs::path out;
    std::optional<fs::path> skips;
};

struct SimulateOptions {
    CommonOptions common;
    sim::SimConfig config;
    std::size_t window = 0;  // 0: use config.snapshot_every
    fs::path posts_out;
    fs::path interactions_out;
    std::optional<fs::path> truth_out;
};

struct ValidateOptions {
    CommonOptions common;
    double epsilon = 0.2;
    std::size_t agents = 100;
    std::uint64_t seed = 7;
    std::size_t windows = 40;
    double mu = 0.5;
    double gap_tolerance = 0.05;
    fs::path out;
    std::optional<fs::path> estimates_out;
};

struct ReportOptions {
    CommonOptions common;
    fs::path estimates;
    fs::path posts;
    fs::path out_dir;
    std::size_t bins = 20;
};

RunManifest run_leaning(const LeaningOptions& opt);
RunManifest run_graph_stats(const GraphStatsOptions& opt);
RunManifest run_transitions(const TransitionsOptions& opt);
RunManifest run_estimate(const EstimateOptions& opt);
RunManifest run_simulate(const SimulateOptions& opt);
RunManifest run_report(const ReportOptions& opt);

/// Outcome of the simulator round trip.
struct ValidationReport {
    double epsilon = 0.0;
    std::size_t agents = 0;
    std::uint64_t seed = 0;
    std::size_t windows = 0;
    std::size_t results = 0;
    /// Results with abs_error == 0 and prefix_j == 1.
    std::size_t exact_single = 0;
    /// Exact single-neighbor results whose cb_hat exceeds epsilon; must be 0.
    std::size_t violations = 0;
    /// Estimated agents whose opinion changed between the two months.
    std::size_t updating = 0;
    std::size_t updating_within_eps = 0;
    std::size_t final_clusters = 0;
    bool polarized = false;

    bool passed() const { return violations == 0; }
    nlohmann::json to_json() const;
};

/// Simulates with one interaction per agent per window on a complete graph,
/// estimates every window pair in memory and checks the recovered bounds.
ValidationReport validate(const ValidateOptions& opt, std::vector<EstimationResult>* estimates = nullptr);
RunManifest run_validate(const ValidateOptions& opt, ValidationReport* report = nullptr);

/// Full command-line entry point. Returns the process exit code:
/// 0 success, 1 usage error, 2 data error, 3 internal invariant violation.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace openmind::pipeline
