#include "openmind/core.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace openmind {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::NotFinite: return "NotFinite";
    case ErrorKind::EmptyPostSet: return "EmptyPostSet";
    case ErrorKind::MixedKeys: return "MixedKeys";
    case ErrorKind::DuplicateEntry: return "DuplicateEntry";
    case ErrorKind::UnknownUser: return "UnknownUser";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::EmptySequence: return "EmptySequence";
    case ErrorKind::EmptyMonth: return "EmptyMonth";
    case ErrorKind::InsufficientMonths: return "InsufficientMonths";
    case ErrorKind::NoNeighbors: return "NoNeighbors";
    case ErrorKind::MonthMismatch: return "MonthMismatch";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::TooFewObservations: return "TooFewObservations";
    case ErrorKind::ConstantSample: return "ConstantSample";
    case ErrorKind::BadRange: return "BadRange";
    case ErrorKind::EmptyVector: return "EmptyVector";
    case ErrorKind::WindowLargerThanTrajectory: return "WindowLargerThanTrajectory";
    case ErrorKind::BadConfig: return "BadConfig";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::BadMonth: return "BadMonth";
    case ErrorKind::SelfLoop: return "SelfLoop";
    case ErrorKind::NonPositiveCount: return "NonPositiveCount";
    case ErrorKind::Io: return "Io";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    }
    return "Unknown";
}

namespace {

std::string format_message(ErrorKind kind, const std::string& what, std::optional<std::size_t> line)
{
    std::string msg(to_string(kind));
    if (line)
        msg += " (line " + std::to_string(*line) + ")";
    if (!what.empty())
        msg += ": " + what;
    return msg;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& what, std::optional<std::size_t> line)
    : std::runtime_error(format_message(kind, what, line)), kind_(kind), line_(line)
{
}

MonthId MonthId::from_index(std::int64_t index)
{
    // floor division so negative years stay consistent
    std::int64_t year = index >= 0 ? index / 12 : -((-index + 11) / 12);
    return MonthId{static_cast<int>(year), static_cast<int>(index - 12 * year) + 1};
}

std::string MonthId::to_string() const
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
}

std::optional<MonthId> MonthId::parse(std::string_view text)
{
    if (text.size() != 7 || text[4] != '-')
        return std::nullopt;
    MonthId m;
    auto digits = [](std::string_view s) {
        for (char c : s)
            if (c < '0' || c > '9')
                return false;
        return true;
    };
    auto ys = text.substr(0, 4), ms = text.substr(5, 2);
    if (!digits(ys) || !digits(ms))
        return std::nullopt;
    std::from_chars(ys.data(), ys.data() + ys.size(), m.year);
    std::from_chars(ms.data(), ms.data() + ms.size(), m.month);
    if (!m.valid())
        return std::nullopt;
    return m;
}

MonthId next_month(MonthId m)
{
    if (m.month == 12)
        return MonthId{m.year + 1, 1};
    return MonthId{m.year, m.month + 1};
}

double validate_score(double x)
{
    if (!std::isfinite(x))
        throw Error(ErrorKind::NotFinite, "score is not finite");
    if (x < 0.0 || x > 1.0)
        throw Error(ErrorKind::OutOfRange, "score " + std::to_string(x) + " outside [0,1]");
    return x;
}

char label_code(LeaningLabel l)
{
    switch (l) {
    case LeaningLabel::Democrat: return 'D';
    case LeaningLabel::Neutral: return 'N';
    case LeaningLabel::Republican: return 'R';
    }
    return '?';
}

std::string_view label_name(LeaningLabel l)
{
    switch (l) {
    case LeaningLabel::Democrat: return "Democrat";
    case LeaningLabel::Neutral: return "Neutral";
    case LeaningLabel::Republican: return "Republican";
    }
    return "?";
}

std::optional<LeaningLabel> parse_label(std::string_view code)
{
    if (code == "D" || code == "Democrat")
        return LeaningLabel::Democrat;
    if (code == "N" || code == "Neutral")
        return LeaningLabel::Neutral;
    if (code == "R" || code == "Republican")
        return LeaningLabel::Republican;
    return std::nullopt;
}

void validate_record(const InteractionRecord& r)
{
    if (!r.month.valid())
        throw Error(ErrorKind::BadMonth, "invalid month");
    if (r.user_a == r.user_b)
        throw Error(ErrorKind::SelfLoop, "self-interaction of " + r.user_a);
    if (r.count < 1)
        throw Error(ErrorKind::NonPositiveCount, "count " + std::to_string(r.count));
}

}  // namespace openmind
