#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hypersona/ingest.hpp"
#include "hypersona/types.hpp"

namespace hypersona {

struct DistributionEntry {
    std::string label;
    int count = 0;
    double proportion = 0.0;
};

// Per-type counts and proportions over users carrying the scheme's label.
// Proportions sum to 1; covers all P classes including empty ones.
std::vector<DistributionEntry> distribution(const std::vector<UserRecord>& users,
                                            LabelScheme scheme);

struct Crosstab {
    std::string row_axis;
    std::string col_axis;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<std::vector<int>> counts;
    int excluded = 0;  // users missing either axis value
};

// Cross-tabulation of two axes. Axis names: "mbti", "enneagram", "mbti_mid2"
// (the middle S/N + T/F letters), "follower_quartile", or any standard
// attribute key. Users missing either value are excluded and tallied.
Crosstab crosstab(const std::vector<UserRecord>& users, const std::string& axis_a,
                  const std::string& axis_b);

struct PowerlawFit {
    double alpha = 0.0;
    std::int64_t xmin = 1;
    int n_tail = 0;
    double ks = 0.0;  // Kolmogorov-Smirnov distance of the selected fit
};

// Discrete maximum-likelihood power-law fit:
//   alpha_hat = 1 + n / sum_i ln(x_i / (xmin - 0.5))   over the tail x_i >= xmin
// When xmin is absent it is chosen from the observed values by minimizing the
// KS distance between the tail's empirical CCDF and the fitted law. Requires
// at least 10 tail points with at least two distinct values.
PowerlawFit powerlaw_fit(const std::vector<std::int64_t>& values,
                         std::optional<std::int64_t> xmin = std::nullopt);

// Seeded sampler from the discrete power law P(x) ~ x^-alpha, x >= xmin.
std::vector<std::int64_t> sample_discrete_powerlaw(double alpha, std::int64_t xmin, std::size_t n,
                                                   std::uint64_t seed);

}  // namespace hypersona
