#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace openmind {

enum class ErrorKind {
    // data errors
    OutOfRange,
    NotFinite,
    EmptyPostSet,
    MixedKeys,
    DuplicateEntry,
    UnknownUser,
    Degenerate,
    EmptySequence,
    EmptyMonth,
    InsufficientMonths,
    NoNeighbors,
    MonthMismatch,
    EmptySample,
    TooFewObservations,
    ConstantSample,
    BadRange,
    EmptyVector,
    WindowLargerThanTrajectory,
    BadConfig,
    MalformedRow,
    BadMonth,
    SelfLoop,
    NonPositiveCount,
    Io,
    // internal
    InvariantViolation,
};

std::string_view to_string(ErrorKind kind);

/// Error raised by every module. Parse errors carry the 1-based input line.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, std::optional<std::size_t> line = std::nullopt);

    ErrorKind kind() const noexcept { return kind_; }
    std::optional<std::size_t> line() const noexcept { return line_; }
    bool is_internal() const noexcept { return kind_ == ErrorKind::InvariantViolation; }

private:
    ErrorKind kind_;
    std::optional<std::size_t> line_;
};

/// Calendar month. Ordered chronologically.
struct MonthId {
    int year = 0;
    int month = 1;

    constexpr auto operator<=>(const MonthId&) const = default;

    /// 12 * year + (month - 1); consecutive months differ by exactly one.
    constexpr std::int64_t index() const { return 12 * std::int64_t{year} + (month - 1); }
    static MonthId from_index(std::int64_t index);

    bool valid() const { return month >= 1 && month <= 12; }

    /// `YYYY-MM`
    std::string to_string() const;
    static std::optional<MonthId> parse(std::string_view text);
};

MonthId next_month(MonthId m);

/// Returns x unchanged iff 0 <= x <= 1.
double validate_score(double x);

enum class LeaningLabel : int { Democrat = 0, Neutral = 1, Republican = 2 };

inline constexpr int kLabelCount = 3;
inline constexpr LeaningLabel kAllLabels[kLabelCount] = {
    LeaningLabel::Democrat, LeaningLabel::Neutral, LeaningLabel::Republican};

constexpr int label_index(LeaningLabel l) { return static_cast<int>(l); }
char label_code(LeaningLabel l);
std::string_view label_name(LeaningLabel l);
std::optional<LeaningLabel> parse_label(std::string_view code);

struct PostScore {
    std::string user_id;
    MonthId month;
    double score = 0.0;
};

struct InteractionRecord {
    MonthId month;
    std::string user_a;
    std::string user_b;
    std::int64_t count = 1;
};

/// Throws SelfLoop / NonPositiveCount / BadMonth for records that cannot enter a graph.
void validate_record(const InteractionRecord& r);

}  // namespace openmind
