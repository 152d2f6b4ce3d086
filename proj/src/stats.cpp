#include "openmind/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace openmind::stats {

namespace {

void require_finite(std::span<const double> values)
{
    for (double v : values)
        if (!std::isfinite(v))
            throw Error(ErrorKind::NotFinite, "sample contains a non-finite value");
}

}  // namespace

double mean(std::span<const double> values)
{
    if (values.empty())
        throw Error(ErrorKind::EmptySample, "mean of empty sample");
    double sum = 0.0;
    for (double v : values)
        sum += v;
    return sum / static_cast<double>(values.size());
}

double kolmogorov_q(double lambda)
{
    constexpr double kTermTolerance = 1e-12;
    constexpr int kMaxTerms = 100000;
    if (!(lambda > 0.0))
        return 1.0;

    const double a = -2.0 * lambda * lambda;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= kMaxTerms; ++k) {
        const double term = 2.0 * sign * std::exp(a * k * k);
        sum += term;
        if (std::fabs(term) < kTermTolerance)
            return std::clamp(sum, std::numeric_limits<double>::min(), 1.0);
        sign = -sign;
    }
    // series has not settled; lambda is tiny and Q is 1 to working precision
    return 1.0;
}

KsResult ks_2samp(std::span<const double> a, std::span<const double> b)
{
    if (a.empty() || b.empty())
        throw Error(ErrorKind::EmptySample, "KS test needs two non-empty samples");
    require_finite(a);
    require_finite(b);

    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());

    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < sa.size() && j < sb.size()) {
        const double x = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] == x)
            ++i;
        while (j < sb.size() && sb[j] == x)
            ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }

    KsResult r;
    r.d_statistic = d;
    if (d == 0.0) {
        r.p_value = 1.0;
        return r;
    }
    const double ne = na * nb / (na + nb);
    const double root = std::sqrt(ne);
    r.p_value = kolmogorov_q((root + 0.12 + 0.11 / root) * d);
    return r;
}

DispersionSummary dispersion(std::span<const double> series, std::string user_id)
{
    if (series.size() < 2)
        throw Error(ErrorKind::TooFewObservations, "dispersion needs at least two observations");
    require_finite(series);
    for (double v : series)
        if (v < 0.0)
            throw Error(ErrorKind::OutOfRange, "dispersion expects non-negative observations");

    DispersionSummary s;
    s.user_id = std::move(user_id);
    s.n_obs = series.size();
    s.mean = mean(series);
    double ss = 0.0;
    for (double v : series)
        ss += (v - s.mean) * (v - s.mean);
    const double variance = ss / static_cast<double>(series.size());
    s.std_dev = std::sqrt(variance);
    if (s.mean > 0.0)
        s.fano = variance / s.mean;
    return s;
}

double Histogram::bin_lo(std::size_t i) const
{
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(counts.size());
}

double Histogram::bin_hi(std::size_t i) const
{
    return i + 1 == counts.size() ? hi : bin_lo(i + 1);
}

std::size_t Histogram::total() const
{
    std::size_t t = overflow;
    for (auto c : counts)
        t += c;
    return t;
}

Histogram histogram(std::span<const double> values, std::size_t n_bins, double lo, double hi)
{
    if (n_bins == 0 || !std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        throw Error(ErrorKind::BadRange, "histogram needs n_bins >= 1 and finite lo < hi");

    Histogram h;
    h.lo = lo;
    h.hi = hi;
    h.counts.assign(n_bins, 0);
    const double width = hi - lo;
    for (double v : values) {
        if (!(v >= lo && v <= hi)) {
            ++h.overflow;
            continue;
        }
        auto idx = static_cast<std::size_t>(std::floor((v - lo) / width * static_cast<double>(n_bins)));
        idx = std::min(idx, n_bins - 1);
        // keep the index consistent with the reported edges
        while (idx > 0 && v < h.bin_lo(idx))
            --idx;
        while (idx + 1 < n_bins && v >= h.bin_lo(idx + 1))
            ++idx;
        ++h.counts[idx];
    }
    return h;
}

double skewness(std::span<const double> values)
{
    if (values.size() < 3)
        throw Error(ErrorKind::TooFewObservations, "skewness needs at least three observations");
    require_finite(values);
    const double m = mean(values);
    double m2 = 0.0, m3 = 0.0;
    for (double v : values) {
        const double dev = v - m;
        m2 += dev * dev;
        m3 += dev * dev * dev;
    }
    const double n = static_cast<double>(values.size());
    m2 /= n;
    m3 /= n;
    if (m2 == 0.0)
        throw Error(ErrorKind::ConstantSample, "skewness undefined for a constant sample");
    return m3 / std::pow(m2, 1.5);
}

}  // namespace openmind::stats
