#include "openmind/leaning.hpp"

#include <algorithm>

namespace openmind {

void Thresholds::validate() const
{
    if (!(0.0 < dem_max && dem_max < rep_min && rep_min < 1.0))
        throw Error(ErrorKind::BadConfig, "thresholds must satisfy 0 < dem_max < rep_min < 1");
}

double leaning_score(std::span<const PostScore> posts)
{
    if (posts.empty())
        throw Error(ErrorKind::EmptyPostSet, "no posts for user-month");
    const auto& first = posts.front();
    double sum = 0.0;
    double lo = 1.0, hi = 0.0;
    for (const auto& p : posts) {
        if (p.user_id != first.user_id || p.month != first.month)
            throw Error(ErrorKind::MixedKeys, "posts of " + first.user_id + "/" + first.month.to_string()
                                                  + " mixed with " + p.user_id + "/" + p.month.to_string());
        sum += validate_score(p.score);
        lo = std::min(lo, p.score);
        hi = std::max(hi, p.score);
    }
    // rounding can push the mean an ulp past the extremes
    return std::clamp(sum / static_cast<double>(posts.size()), lo, hi);
}

LeaningLabel discretize(double score, const Thresholds& t)
{
    validate_score(score);
    if (score <= t.dem_max)
        return LeaningLabel::Democrat;
    if (score >= t.rep_min)
        return LeaningLabel::Republican;
    return LeaningLabel::Neutral;
}

OpinionTable::OpinionTable(Thresholds t) : thresholds_(t)
{
    thresholds_.validate();
}

const OpinionEntry& OpinionTable::insert(const std::string& user, MonthId month, double score)
{
    if (!month.valid())
        throw Error(ErrorKind::BadMonth, month.to_string());
    OpinionEntry entry{validate_score(score), discretize(score, thresholds_)};
    auto [it, inserted] = by_month_[month].emplace(user, entry);
    if (!inserted)
        throw Error(ErrorKind::DuplicateEntry, user + " already has an entry for " + month.to_string());
    ++size_;
    return it->second;
}

const OpinionEntry* OpinionTable::find(const std::string& user, MonthId month) const
{
    auto m = by_month_.find(month);
    if (m == by_month_.end())
        return nullptr;
    auto u = m->second.find(user);
    return u == m->second.end() ? nullptr : &u->second;
}

const OpinionTable::MonthSlice& OpinionTable::month(MonthId m) const
{
    static const MonthSlice empty;
    auto it = by_month_.find(m);
    return it == by_month_.end() ? empty : it->second;
}

std::vector<MonthId> OpinionTable::months() const
{
    std::vector<MonthId> out;
    out.reserve(by_month_.size());
    for (const auto& [m, slice] : by_month_)
        if (!slice.empty())
            out.push_back(m);
    return out;
}

std::vector<std::pair<MonthId, OpinionEntry>> OpinionTable::user_history(const std::string& user) const
{
    std::vector<std::pair<MonthId, OpinionEntry>> out;
    for (const auto& [m, slice] : by_month_) {
        auto it = slice.find(user);
        if (it != slice.end())
            out.emplace_back(m, it->second);
    }
    return out;
}

OpinionTable build_opinion_table(std::span<const PostScore> posts, const Thresholds& t)
{
    std::map<std::pair<std::string, MonthId>, std::vector<PostScore>> groups;
    for (const auto& p : posts) {
        if (!p.month.valid())
            throw Error(ErrorKind::BadMonth, p.month.to_string());
        validate_score(p.score);
        groups[{p.user_id, p.month}].push_back(p);
    }
    OpinionTable table(t);
    for (const auto& [key, group] : groups)
        table.insert(key.first, key.second, leaning_score(group));
    return table;
}

std::pair<double, LeaningLabel> overall_leaning(const OpinionTable& table, const std::string& user)
{
    auto history = table.user_history(user);
    if (history.empty())
        throw Error(ErrorKind::UnknownUser, user);
    double sum = 0.0;
    double lo = 1.0, hi = 0.0;
    for (const auto& [m, e] : history) {
        sum += e.score;
        lo = std::min(lo, e.score);
        hi = std::max(hi, e.score);
    }
    double mean = std::clamp(sum / static_cast<double>(history.size()), lo, hi);
    return {mean, discretize(mean, table.thresholds())};
}

}  // namespace openmind
