#pragma once

#include "openmind/core.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace openmind::stats {

struct KsResult {
    double d_statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test. D is exact (merged ECDF scan); the
/// p-value uses the asymptotic Kolmogorov distribution with the Stephens
/// small-sample correction on lambda.
KsResult ks_2samp(std::span<const double> a, std::span<const double> b);

/// Q_KS(lambda) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2), clamped to (0, 1].
double kolmogorov_q(double lambda);

struct DispersionSummary {
    std::string user_id;
    double mean = 0.0;
    double std_dev = 0.0;  // population (divisor n)
    std::optional<double> fano;  // empty when mean == 0
    std::size_t n_obs = 0;
};

DispersionSummary dispersion(std::span<const double> series, std::string user_id = {});

struct Histogram {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<std::size_t> counts;
    std::size_t overflow = 0;  // values outside [lo, hi], NaN included

    double bin_lo(std::size_t i) const;
    double bin_hi(std::size_t i) const;
    std::size_t total() const;
};

/// Equal-width bins, half-open except the last which also takes `hi`.
Histogram histogram(std::span<const double> values, std::size_t n_bins, double lo, double hi);

/// Fisher-Pearson g1 from population moments.
double skewness(std::span<const double> values);

double mean(std::span<const double> values);

}  // namespace openmind::stats
