#pragma once

#include "openmind/core.hpp"

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace openmind {

/// Discretization cut points. Scores <= dem_max are Democrat, >= rep_min Republican.
struct Thresholds {
    double dem_max = 0.4;
    double rep_min = 0.6;

    /// Throws BadConfig unless 0 < dem_max < rep_min < 1.
    void validate() const;
};

/// Mean of the post scores of one (user, month).
double leaning_score(std::span<const PostScore> posts);

LeaningLabel discretize(double score, const Thresholds& t = {});

struct OpinionEntry {
    double score = 0.0;
    LeaningLabel label = LeaningLabel::Neutral;
};

/// Per-(user, month) leaning. Labels are always derived from the stored
/// score with the table's thresholds, so the pair can never disagree.
class OpinionTable {
public:
    using MonthSlice = std::map<std::string, OpinionEntry>;

    explicit OpinionTable(Thresholds t = {});

    /// Throws DuplicateEntry, OutOfRange, NotFinite or BadMonth.
    const OpinionEntry& insert(const std::string& user, MonthId month, double score);

    const OpinionEntry* find(const std::string& user, MonthId month) const;
    bool contains(const std::string& user, MonthId month) const { return find(user, month) != nullptr; }

    /// Users with an entry in `month`, sorted by id. Empty slice when the month is absent.
    const MonthSlice& month(MonthId m) const;

    /// Months with at least one entry, chronological.
    std::vector<MonthId> months() const;

    /// All (month, entry) pairs of one user, chronological.
    std::vector<std::pair<MonthId, OpinionEntry>> user_history(const std::string& user) const;

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    const Thresholds& thresholds() const { return thresholds_; }

    const std::map<MonthId, MonthSlice>& by_month() const { return by_month_; }

private:
    Thresholds thresholds_;
    std::map<MonthId, MonthSlice> by_month_;
    std::size_t size_ = 0;
};

/// Groups posts by (user, month) and stores the mean score of each group.
OpinionTable build_opinion_table(std::span<const PostScore> posts, const Thresholds& t = {});

/// Unweighted mean of a user's monthly scores plus its label.
std::pair<double, LeaningLabel> overall_leaning(const OpinionTable& table, const std::string& user);

}  // namespace openmind
