#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace theorygen {

enum class TestDirection { greater, less };

std::string_view to_string(TestDirection d);
TestDirection parse_direction(const std::string& s);

struct BootstrapResult {
    double observed_delta = 0.0;  // mean(group_a) - mean(group_b)
    double p_value = 1.0;
    long n_resamples = 0;
    TestDirection direction = TestDirection::greater;
    std::uint64_t seed = 0;
};

/// One-sided non-parametric bootstrap on the difference of group means.
/// The resample unit is the individual score. Each resample draws with
/// replacement from each group and takes the mean difference; p is the
/// proportion of resamples whose difference fails the direction, with ties
/// counted as failures (a resampled difference of exactly 0 fails both
/// directions). The resample sequence depends only on the seed, never on the
/// direction, so p(greater) + p(less) >= 1 holds exactly for a fixed seed.
BootstrapResult bootstrap_one_sided(const std::vector<double>& group_a,
                                    const std::vector<double>& group_b,
                                    long n_resamples,
                                    TestDirection direction,
                                    std::uint64_t seed);

enum class SignificanceMark { none, single, twofold };

/// twofold below 0.01, single below 0.05, strict inequalities.
SignificanceMark significance_mark(double p);

/// Display form: "" / "*" / "**".
std::string_view mark_symbol(SignificanceMark mark);

}  // namespace theorygen
