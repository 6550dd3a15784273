#include "theorygen/stats/bootstrap.hpp"

#include <numeric>
#include <stdexcept>

#include "theorygen/core/errors.hpp"
#include "theorygen/core/rng.hpp"

namespace theorygen {

std::string_view to_string(TestDirection d) {
    return d == TestDirection::greater ? "greater" : "less";
}

TestDirection parse_direction(const std::string& s) {
    if (s == "greater") return TestDirection::greater;
    if (s == "less") return TestDirection::less;
    throw ValidationError("unknown test direction: '" + s + "'");
}

namespace {

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double resampled_mean(const std::vector<double>& v, Rng& rng) {
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        sum += v[rng.below(v.size())];
    }
    return sum / static_cast<double>(v.size());
}

}  // namespace

BootstrapResult bootstrap_one_sided(const std::vector<double>& group_a,
                                    const std::vector<double>& group_b,
                                    long n_resamples,
                                    TestDirection direction,
                                    std::uint64_t seed) {
    if (group_a.empty() || group_b.empty()) {
        throw ValidationError("bootstrap groups must be non-empty");
    }
    if (n_resamples < 1) {
        throw ValidationError("bootstrap requires at least one resample");
    }

    BootstrapResult result;
    result.observed_delta = mean_of(group_a) - mean_of(group_b);
    result.n_resamples = n_resamples;
    result.direction = direction;
    result.seed = seed;

    Rng rng(derive_seed(seed, "bootstrap"));
    long failures = 0;
    for (long r = 0; r < n_resamples; ++r) {
        double diff = resampled_mean(group_a, rng) - resampled_mean(group_b, rng);
        // ties fail the strict direction
        bool success = direction == TestDirection::greater ? diff > 0.0 : diff < 0.0;
        if (!success) ++failures;
    }
    result.p_value = static_cast<double>(failures) / static_cast<double>(n_resamples);
    return result;
}

SignificanceMark significance_mark(double p) {
    if (p < 0.01) return SignificanceMark::twofold;
    if (p < 0.05) return SignificanceMark::single;
    return SignificanceMark::none;
}

std::string_view mark_symbol(SignificanceMark mark) {
    switch (mark) {
        case SignificanceMark::none: return "";
        case SignificanceMark::single: return "*";
        case SignificanceMark::twofold: return "**";
    }
    return "";
}

}  // namespace theorygen
