#include "openmind/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

namespace openmind::io {

namespace {

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::optional<double> parse_double(std::string_view s)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        return std::nullopt;
    return v;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view s)
{
    Int v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        return std::nullopt;
    return v;
}

MonthId parse_month_field(std::string_view s, std::size_t line_no)
{
    auto m = MonthId::parse(s);
    if (!m)
        throw Error(ErrorKind::BadMonth, "'" + std::string(s) + "' is not YYYY-MM", line_no);
    return *m;
}

double parse_score_field(std::string_view s, std::size_t line_no)
{
    auto v = parse_double(s);
    if (!v)
        throw Error(ErrorKind::MalformedRow, "'" + std::string(s) + "' is not a number", line_no);
    if (!std::isfinite(*v))
        throw Error(ErrorKind::NotFinite, std::string(s), line_no);
    if (*v < 0.0 || *v > 1.0)
        throw Error(ErrorKind::OutOfRange, std::string(s) + " outside [0,1]", line_no);
    return *v;
}

void require_id(std::string_view s, std::size_t line_no)
{
    if (s.empty())
        throw Error(ErrorKind::MalformedRow, "empty user id", line_no);
}

/// Drives line iteration, header checking and lenient-mode accounting.
template <typename T, typename RowParser>
Parsed<T> parse_csv(std::istream& in, std::string_view header, std::size_t n_fields, bool lenient,
                    RowParser&& parse_row)
{
    Parsed<T> out;
    std::string line;
    std::size_t line_no = 0;
    bool seen_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!seen_header) {
            if (line != header)
                throw Error(ErrorKind::MalformedRow, "expected header '" + std::string(header) + "'", line_no);
            seen_header = true;
            continue;
        }
        if (line.empty())
            continue;
        ++out.data_rows;
        try {
            auto fields = split(line);
            if (fields.size() != n_fields)
                throw Error(ErrorKind::MalformedRow,
                            "expected " + std::to_string(n_fields) + " fields, got " + std::to_string(fields.size()),
                            line_no);
            out.rows.push_back(parse_row(fields, line_no));
        } catch (const Error& e) {
            if (!lenient)
                throw;
            ++out.dropped;
            out.diagnostics.emplace_back(e.what());
        }
    }
    if (!seen_header)
        throw Error(ErrorKind::MalformedRow, "missing header '" + std::string(header) + "'", 1);
    return out;
}

}  // namespace

Parsed<PostScore> parse_posts(std::istream& in, bool lenient)
{
    return parse_csv<PostScore>(in, kPostsHeader, 3, lenient, [](const auto& f, std::size_t line_no) {
        require_id(f[0], line_no);
        PostScore p;
        p.user_id = std::string(f[0]);
        p.month = parse_month_field(f[1], line_no);
        p.score = parse_score_field(f[2], line_no);
        return p;
    });
}

Parsed<InteractionRecord> parse_interactions(std::istream& in, bool lenient)
{
    return parse_csv<InteractionRecord>(in, kInteractionsHeader, 4, lenient, [](const auto& f, std::size_t line_no) {
        InteractionRecord r;
        r.month = parse_month_field(f[0], line_no);
        require_id(f[1], line_no);
        require_id(f[2], line_no);
        r.user_a = std::string(f[1]);
        r.user_b = std::string(f[2]);
        auto count = parse_int<std::int64_t>(f[3]);
        if (!count)
            throw Error(ErrorKind::MalformedRow, "'" + std::string(f[3]) + "' is not an integer", line_no);
        r.count = *count;
        if (r.user_a == r.user_b)
            throw Error(ErrorKind::SelfLoop, "self-interaction of " + r.user_a, line_no);
        if (r.count < 1)
            throw Error(ErrorKind::NonPositiveCount, "count " + std::string(f[3]), line_no);
        return r;
    });
}

Parsed<EstimationResult> parse_estimates(std::istream& in, bool lenient)
{
    return parse_csv<EstimationResult>(in, kEstimatesHeader, 8, lenient, [](const auto& f, std::size_t line_no) {
        require_id(f[0], line_no);
        EstimationResult r;
        r.user_id = std::string(f[0]);
        r.from_month = parse_month_field(f[1], line_no);
        r.to_month = parse_month_field(f[2], line_no);
        if (r.to_month != next_month(r.from_month))
            throw Error(ErrorKind::MalformedRow, "month_to must follow month_from", line_no);
        r.cb_hat = parse_score_field(f[3], line_no);
        r.x_hat = parse_score_field(f[4], line_no);
        auto j = parse_int<std::size_t>(f[5]);
        auto n = parse_int<std::size_t>(f[6]);
        if (!j || !n || *n < 1 || *j > *n)
            throw Error(ErrorKind::MalformedRow, "prefix_j / n_neighbors invalid", line_no);
        r.prefix_j = *j;
        r.n_neighbors = *n;
        auto err = parse_double(f[7]);
        if (!err || !std::isfinite(*err) || *err < 0.0)
            throw Error(ErrorKind::MalformedRow, "abs_error invalid", line_no);
        r.abs_error = *err;
        r.degenerate = r.prefix_j == 0;
        return r;
    });
}

std::string format_real(double x)
{
    if (std::isnan(x))
        return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string format_real(const std::optional<double>& x)
{
    return x ? format_real(*x) : std::string("nan");
}

std::string format_exact(double x)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{})
        throw Error(ErrorKind::InvariantViolation, "cannot format double");
    return std::string(buf, ptr);
}

void write_posts(std::ostream& out, std::span<const PostScore> posts)
{
    out << kPostsHeader << '\n';
    for (const auto& p : posts)
        out << p.user_id << ',' << p.month.to_string() << ',' << format_exact(p.score) << '\n';
}

void write_interactions(std::ostream& out, std::span<const InteractionRecord> records)
{
    out << kInteractionsHeader << '\n';
    for (const auto& r : records)
        out << r.month.to_string() << ',' << r.user_a << ',' << r.user_b << ',' << r.count << '\n';
}

void write_opinion_table(std::ostream& out, const OpinionTable& table)
{
    out << "user_id,month,score,label\n";
    for (const auto& [month, slice] : table.by_month())
        for (const auto& [user, entry] : slice)
            out << user << ',' << month.to_string() << ',' << format_real(entry.score) << ','
                << label_code(entry.label) << '\n';
}

void write_estimates(std::ostream& out, std::span<const EstimationResult> results)
{
    out << kEstimatesHeader << '\n';
    for (const auto& r : results)
        out << r.user_id << ',' << r.from_month.to_string() << ',' << r.to_month.to_string() << ','
            << format_real(r.cb_hat) << ',' << format_real(r.x_hat) << ',' << r.prefix_j << ','
            << r.n_neighbors << ',' << format_real(r.abs_error) << '\n';
}

void write_graph_stats(std::ostream& out, const StatsReport& report)
{
    out << kGraphStatsHeader << '\n';
    for (const auto& s : report.per_month)
        out << s.month.to_string() << ',' << s.n_nodes << ',' << s.n_rep << ',' << s.n_dem << ',' << s.n_neu << ','
            << s.n_edges << ',' << format_real(s.avg_degree) << ',' << format_real(s.edges_per_node) << ','
            << format_real(s.assortativity) << '\n';
    const auto& m = report.mean;
    out << "mean," << format_real(m.n_nodes) << ',' << format_real(m.n_rep) << ',' << format_real(m.n_dem) << ','
        << format_real(m.n_neu) << ',' << format_real(m.n_edges) << ',' << format_real(m.avg_degree) << ','
        << format_real(m.edges_per_node) << ',' << format_real(m.assortativity) << '\n';
}

void write_histogram(std::ostream& out, const stats::Histogram& h)
{
    out << kHistogramHeader << '\n';
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        out << format_real(h.bin_lo(i)) << ',' << format_real(h.bin_hi(i)) << ',' << h.counts[i] << '\n';
}

void write_dispersion(std::ostream& out, std::span<const stats::DispersionSummary> rows)
{
    out << kDispersionHeader << '\n';
    for (const auto& d : rows)
        out << d.user_id << ',' << format_real(d.mean) << ',' << format_real(d.std_dev) << ','
            << format_real(d.fano) << ',' << d.n_obs << '\n';
}

nlohmann::json transition_to_json(const TransitionMatrix& tm)
{
    nlohmann::json matrix = nlohmann::json::array();
    for (const auto& row : tm.p)
        matrix.push_back(nlohmann::json(std::vector<double>(row.begin(), row.end())));
    nlohmann::json row_counts = nlohmann::json::array();
    for (auto c : tm.row_counts)
        row_counts.push_back(c);
    return nlohmann::json{
        {"from", tm.from.to_string()},
        {"to", tm.to.to_string()},
        {"rows", {"D", "N", "R"}},
        {"matrix", matrix},
        {"row_counts", row_counts},
    };
}

nlohmann::json transitions_to_json(std::span<const TransitionMatrix> series)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& tm : series)
        out.push_back(transition_to_json(tm));
    return out;
}

}  // namespace openmind::io
