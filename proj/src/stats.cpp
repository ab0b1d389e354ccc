#include "hypersona/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "hypersona/rng.hpp"

namespace hypersona {

std::vector<DistributionEntry> distribution(const std::vector<UserRecord>& users,
                                            LabelScheme scheme) {
    const int p = num_classes(scheme);
    std::vector<DistributionEntry> out(static_cast<std::size_t>(p));
    for (int c = 0; c < p; ++c) out[static_cast<std::size_t>(c)].label = label_name(scheme, c);

    int labeled = 0;
    for (const auto& user : users) {
        int cls = -1;
        if (scheme == LabelScheme::MBTI16 && user.mbti)
            cls = user.mbti->class_index();
        else if (scheme == LabelScheme::ENNEAGRAM9 && user.enneagram)
            cls = *user.enneagram - 1;
        if (cls >= 0) {
            out[static_cast<std::size_t>(cls)].count += 1;
            ++labeled;
        }
    }
    if (labeled == 0) throw InvalidArgument("distribution: no users carry the requested label");
    for (auto& entry : out)
        entry.proportion = static_cast<double>(entry.count) / static_cast<double>(labeled);
    return out;
}

namespace {

// Category extractor for one crosstab axis; nullopt = value missing.
struct Axis {
    std::string name;
    std::vector<std::string> categories;          // fixed order
    std::vector<std::optional<std::string>> values;  // per user
};

Axis make_axis(const std::vector<UserRecord>& users, const std::string& name) {
    Axis axis;
    axis.name = name;
    axis.values.resize(users.size());

    if (name == "mbti") {
        for (int c = 0; c < 16; ++c) axis.categories.push_back(label_name(LabelScheme::MBTI16, c));
        for (std::size_t i = 0; i < users.size(); ++i)
            if (users[i].mbti) axis.values[i] = format_mbti(*users[i].mbti);
        return axis;
    }
    if (name == "enneagram") {
        for (int c = 0; c < 9; ++c) axis.categories.push_back(std::to_string(c + 1));
        for (std::size_t i = 0; i < users.size(); ++i)
            if (users[i].enneagram) axis.values[i] = std::to_string(*users[i].enneagram);
        return axis;
    }
    if (name == "mbti_mid2") {
        // The perceiving/judgment letters (S/N and T/F), e.g. "NF" for INFP.
        axis.categories = {"ST", "SF", "NT", "NF"};
        for (std::size_t i = 0; i < users.size(); ++i)
            if (users[i].mbti) {
                const std::string full = format_mbti(*users[i].mbti);
                axis.values[i] = full.substr(1, 2);
            }
        return axis;
    }
    if (name == "follower_quartile") {
        std::vector<std::int64_t> sorted;
        for (const auto& u : users)
            if (u.follower_count) sorted.push_back(*u.follower_count);
        std::sort(sorted.begin(), sorted.end());
        axis.categories = {"Q1", "Q2", "Q3", "Q4"};
        if (sorted.empty()) return axis;
        auto quantile = [&](double q) {
            const auto idx = static_cast<std::size_t>(q * static_cast<double>(sorted.size() - 1));
            return sorted[idx];
        };
        const std::int64_t q1 = quantile(0.25), q2 = quantile(0.5), q3 = quantile(0.75);
        for (std::size_t i = 0; i < users.size(); ++i)
            if (users[i].follower_count) {
                const std::int64_t f = *users[i].follower_count;
                axis.values[i] = f <= q1 ? "Q1" : f <= q2 ? "Q2" : f <= q3 ? "Q3" : "Q4";
            }
        return axis;
    }

    // Attribute axis over the observed vocabulary.
    bool known = false;
    for (const auto& key : standard_attribute_keys()) known = known || key == name;
    if (!known) throw InvalidArgument("crosstab: unknown axis \"" + name + "\"");
    std::set<std::string> observed;
    for (std::size_t i = 0; i < users.size(); ++i)
        if (const auto* v = users[i].find_attribute(name); v && v->has_value()) {
            axis.values[i] = **v;
            observed.insert(**v);
        }
    axis.categories.assign(observed.begin(), observed.end());
    return axis;
}

}  // namespace

Crosstab crosstab(const std::vector<UserRecord>& users, const std::string& axis_a,
                  const std::string& axis_b) {
    const Axis a = make_axis(users, axis_a);
    const Axis b = make_axis(users, axis_b);

    std::map<std::string, std::size_t> a_index, b_index;
    for (std::size_t i = 0; i < a.categories.size(); ++i) a_index[a.categories[i]] = i;
    for (std::size_t i = 0; i < b.categories.size(); ++i) b_index[b.categories[i]] = i;

    Crosstab tab;
    tab.row_axis = axis_a;
    tab.col_axis = axis_b;
    tab.row_labels = a.categories;
    tab.col_labels = b.categories;
    tab.counts.assign(a.categories.size(), std::vector<int>(b.categories.size(), 0));
    for (std::size_t i = 0; i < users.size(); ++i) {
        if (!a.values[i] || !b.values[i]) {
            ++tab.excluded;
            continue;
        }
        tab.counts[a_index.at(*a.values[i])][b_index.at(*b.values[i])] += 1;
    }
    return tab;
}

PowerlawFit powerlaw_fit(const std::vector<std::int64_t>& values,
                         std::optional<std::int64_t> xmin) {
    for (std::int64_t v : values)
        if (v < 1) throw InvalidArgument("powerlaw_fit: values must be positive integers");

    auto fit_at = [&](std::int64_t x_min) -> std::optional<PowerlawFit> {
        std::vector<std::int64_t> tail;
        for (std::int64_t v : values)
            if (v >= x_min) tail.push_back(v);
        if (tail.size() < 10) return std::nullopt;
        std::sort(tail.begin(), tail.end());
        if (tail.front() == tail.back()) return std::nullopt;  // degenerate tail

        const double shift = static_cast<double>(x_min) - 0.5;
        double log_sum = 0.0;
        for (std::int64_t v : tail) log_sum += std::log(static_cast<double>(v) / shift);
        PowerlawFit fit;
        fit.alpha = 1.0 + static_cast<double>(tail.size()) / log_sum;
        fit.xmin = x_min;
        fit.n_tail = static_cast<int>(tail.size());

        // KS distance between the tail's empirical CCDF and the fitted law
        // CCDF(x) = ((x - 0.5) / (xmin - 0.5))^(1 - alpha), at observed points.
        const double n = static_cast<double>(tail.size());
        double ks = 0.0;
        std::size_t i = 0;
        while (i < tail.size()) {
            std::size_t j = i;
            while (j < tail.size() && tail[j] == tail[i]) ++j;
            const double emp_ccdf = static_cast<double>(tail.size() - i) / n;
            const double fit_ccdf =
                std::pow((static_cast<double>(tail[i]) - 0.5) / shift, 1.0 - fit.alpha);
            ks = std::max(ks, std::abs(emp_ccdf - fit_ccdf));
            i = j;
        }
        fit.ks = ks;
        return fit;
    };

    if (xmin.has_value()) {
        if (*xmin < 1) throw InvalidArgument("powerlaw_fit: xmin must be >= 1");
        auto fit = fit_at(*xmin);
        if (!fit)
            throw InvalidArgument(
                "powerlaw_fit: tail at the requested xmin is degenerate or has fewer than 10 "
                "points");
        return *fit;
    }

    std::set<std::int64_t> candidates(values.begin(), values.end());
    std::optional<PowerlawFit> best;
    for (std::int64_t candidate : candidates) {
        auto fit = fit_at(candidate);
        if (fit && (!best || fit->ks < best->ks)) best = fit;
    }
    if (!best)
        throw InvalidArgument(
            "powerlaw_fit: no viable xmin (need a tail of >= 10 points with >= 2 distinct "
            "values)");
    return *best;
}

std::vector<std::int64_t> sample_discrete_powerlaw(double alpha, std::int64_t xmin, std::size_t n,
                                                   std::uint64_t seed) {
    if (alpha <= 1.0) throw InvalidArgument("sample_discrete_powerlaw: alpha must be > 1");
    if (xmin < 1) throw InvalidArgument("sample_discrete_powerlaw: xmin must be >= 1");
    Rng rng(seed);
    std::vector<std::int64_t> out;
    out.reserve(n);
    const double shift = static_cast<double>(xmin) - 0.5;
    for (std::size_t i = 0; i < n; ++i) {
        double u = rng.uniform();
        while (u <= 0.0) u = rng.uniform();
        // Inverse-transform of the continuous approximation, rounded to the
        // nearest integer.
        const double x = shift * std::pow(u, -1.0 / (alpha - 1.0));
        std::int64_t v = std::llround(x);
        if (v < xmin) v = xmin;
        out.push_back(v);
    }
    return out;
}

}  // namespace hypersona
