#pragma once

#include "openmind/cb_estimator.hpp"
#include "openmind/core.hpp"
#include "openmind/leaning.hpp"
#include "openmind/stats.hpp"
#include "openmind/temporal_graph.hpp"
#include "openmind/transitions.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace openmind::io {

inline constexpr std::string_view kPostsHeader = "user_id,month,score";
inline constexpr std::string_view kInteractionsHeader = "month,user_a,user_b,count";
inline constexpr std::string_view kEstimatesHeader =
    "user_id,month_from,month_to,cb_hat,x_hat,prefix_j,n_neighbors,abs_error";
inline constexpr std::string_view kGraphStatsHeader =
    "month,n,n_rep,n_dem,n_neu,e,avg_degree,edges_per_node,assortativity";
inline constexpr std::string_view kHistogramHeader = "bin_lo,bin_hi,count";
inline constexpr std::string_view kDispersionHeader = "user_id,mean,std_dev,fano,n_obs";

template <typename T>
struct Parsed {
    std::vector<T> rows;
    /// Data rows seen (header and blank lines excluded).
    std::size_t data_rows = 0;
    /// Rows rejected in lenient mode.
    std::size_t dropped = 0;
    std::vector<std::string> diagnostics;
};

/// Strict by default: the first bad row throws an Error carrying its line
/// number. With `lenient` bad rows are counted and skipped instead.
Parsed<PostScore> parse_posts(std::istream& in, bool lenient = false);
Parsed<InteractionRecord> parse_interactions(std::istream& in, bool lenient = false);
Parsed<EstimationResult> parse_estimates(std::istream& in, bool lenient = false);

/// `%.12g`; NaN and absent values become `nan`.
std::string format_real(double x);
std::string format_real(const std::optional<double>& x);
/// Shortest text that parses back to the same double.
std::string format_exact(double x);

void write_posts(std::ostream& out, std::span<const PostScore> posts);
void write_interactions(std::ostream& out, std::span<const InteractionRecord> records);
/// `user_id,month,score,label`, month-major then user.
void write_opinion_table(std::ostream& out, const OpinionTable& table);
void write_estimates(std::ostream& out, std::span<const EstimationResult> results);
void write_graph_stats(std::ostream& out, const StatsReport& report);
void write_histogram(std::ostream& out, const stats::Histogram& h);
void write_dispersion(std::ostream& out, std::span<const stats::DispersionSummary> rows);

nlohmann::json transition_to_json(const TransitionMatrix& tm);
nlohmann::json transitions_to_json(std::span<const TransitionMatrix> series);

}  // namespace openmind::io
