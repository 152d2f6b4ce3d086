#pragma once

#include "openmind/core.hpp"
#include "openmind/leaning.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace openmind {

/// Leaning-state transitions between month `from` and the following month.
/// Rows are the source label, columns the target label (D, N, R order).
struct TransitionMatrix {
    MonthId from;
    MonthId to;
    std::array<std::array<double, kLabelCount>, kLabelCount> p{};
    std::array<std::size_t, kLabelCount> row_counts{};

    bool row_empty(LeaningLabel source) const { return row_counts[label_index(source)] == 0; }
    double at(LeaningLabel source, LeaningLabel target) const
    {
        return p[label_index(source)][label_index(target)];
    }
};

/// Users absent in the following month are excluded from both numerator and denominator.
TransitionMatrix transition_matrix(const OpinionTable& table, MonthId m);

/// Fraction of users active in `m` that are also active in the following month.
double retention(const OpinionTable& table, MonthId m);

/// One matrix per pair of consecutive calendar months that are both present.
std::vector<TransitionMatrix> transition_series(const OpinionTable& table);

}  // namespace openmind
