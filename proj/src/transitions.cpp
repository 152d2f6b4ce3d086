#include "openmind/transitions.hpp"

namespace openmind {

TransitionMatrix transition_matrix(const OpinionTable& table, MonthId m)
{
    TransitionMatrix tm;
    tm.from = m;
    tm.to = next_month(m);

    std::array<std::array<std::size_t, kLabelCount>, kLabelCount> counts{};
    const auto& next = table.month(tm.to);
    for (const auto& [user, entry] : table.month(m)) {
        auto it = next.find(user);
        if (it == next.end())
            continue;
        ++counts[label_index(entry.label)][label_index(it->second.label)];
        ++tm.row_counts[label_index(entry.label)];
    }
    for (int i = 0; i < kLabelCount; ++i) {
        if (tm.row_counts[i] == 0)
            continue;
        const double denom = static_cast<double>(tm.row_counts[i]);
        for (int j = 0; j < kLabelCount; ++j)
            tm.p[i][j] = static_cast<double>(counts[i][j]) / denom;
    }
    return tm;
}

double retention(const OpinionTable& table, MonthId m)
{
    const auto& now = table.month(m);
    if (now.empty())
        throw Error(ErrorKind::EmptyMonth, m.to_string() + " has no users");
    const auto& next = table.month(next_month(m));
    std::size_t kept = 0;
    for (const auto& [user, entry] : now)
        kept += next.contains(user) ? 1 : 0;
    return static_cast<double>(kept) / static_cast<double>(now.size());
}

std::vector<TransitionMatrix> transition_series(const OpinionTable& table)
{
    auto months = table.months();
    if (months.size() < 2)
        throw Error(ErrorKind::InsufficientMonths, "need at least two months");
    std::vector<TransitionMatrix> series;
    for (std::size_t i = 0; i + 1 < months.size(); ++i) {
        if (months[i + 1] == next_month(months[i]))
            series.push_back(transition_matrix(table, months[i]));
    }
    if (series.empty())
        throw Error(ErrorKind::InsufficientMonths, "no contiguous month pairs");
    return series;
}

}  // namespace openmind
