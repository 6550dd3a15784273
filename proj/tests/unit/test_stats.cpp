#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "theorygen/core/rng.hpp"
#include "theorygen/stats/bootstrap.hpp"

using namespace theorygen;

namespace {

// Independent oracle: exact p over all resample multisets of both groups.
// A resample of a group of size n is a multiset of size n drawn from its
// values; its probability is multinomial(counts) / n^n.
struct WeightedMean {
    double probability;
    double mean;
};

void enumerate_multisets(const std::vector<double>& values, std::size_t slot, long remaining,
                         std::vector<long>& counts, std::vector<WeightedMean>& out) {
    if (slot + 1 == values.size()) {
        counts[slot] = remaining;
        double n = static_cast<double>(values.size());
        double log_prob = std::lgamma(n + 1.0);
        double sum = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            log_prob -= std::lgamma(static_cast<double>(counts[i]) + 1.0);
            sum += values[i] * static_cast<double>(counts[i]);
        }
        log_prob -= n * std::log(n);
        out.push_back({std::exp(log_prob), sum / n});
        return;
    }
    for (long c = 0; c <= remaining; ++c) {
        counts[slot] = c;
        enumerate_multisets(values, slot + 1, remaining - c, counts, out);
    }
}

std::vector<WeightedMean> all_resample_means(const std::vector<double>& values) {
    std::vector<WeightedMean> out;
    std::vector<long> counts(values.size(), 0);
    enumerate_multisets(values, 0, static_cast<long>(values.size()), counts, out);
    return out;
}

double exact_one_sided_p(const std::vector<double>& a, const std::vector<double>& b,
                         TestDirection direction) {
    double p = 0.0;
    for (const auto& ma : all_resample_means(a)) {
        for (const auto& mb : all_resample_means(b)) {
            double diff = ma.mean - mb.mean;
            bool success = direction == TestDirection::greater ? diff > 0.0 : diff < 0.0;
            if (!success) p += ma.probability * mb.probability;
        }
    }
    return p;
}

std::vector<double> random_group(Rng& rng, std::size_t max_size) {
    std::vector<double> g(1 + rng.below(max_size));
    for (auto& v : g) v = static_cast<double>(rng.below(11));
    return g;
}

}  // namespace

TEST_CASE("degenerate cases are exact") {
    // identical constant groups: every resampled difference ties, ties fail
    std::vector<double> fives(8, 5.0);
    BootstrapResult r = bootstrap_one_sided(fives, fives, 10000, TestDirection::greater, 1);
    CHECK(r.p_value == 1.0);
    CHECK(r.observed_delta == 0.0);

    // disjoint support: group_a always wins under direction greater
    std::vector<double> tens(6, 10.0), ones(9, 1.0);
    r = bootstrap_one_sided(tens, ones, 10000, TestDirection::greater, 2);
    CHECK(r.p_value == 0.0);
    CHECK(r.observed_delta == doctest::Approx(9.0));

    // and loses with the direction reversed
    r = bootstrap_one_sided(tens, ones, 10000, TestDirection::less, 3);
    CHECK(r.p_value == 1.0);
}

TEST_CASE("small groups match the exhaustive enumeration oracle within 0.02") {
    Rng rng(424242);
    for (int trial = 0; trial < 12; ++trial) {
        std::vector<double> a = random_group(rng, 5);
        std::vector<double> b = random_group(rng, 5);
        TestDirection dir = rng.below(2) ? TestDirection::greater : TestDirection::less;
        double exact = exact_one_sided_p(a, b, dir);
        BootstrapResult r = bootstrap_one_sided(a, b, 10000, dir, 1000 + trial);
        CAPTURE(trial);
        CHECK(std::abs(r.p_value - exact) <= 0.02);
    }
}

TEST_CASE("fixed seed reproduces; direction does not disturb the resample stream") {
    std::vector<double> a = {3, 5, 2, 8, 6, 4};
    std::vector<double> b = {4, 4, 5, 3, 7};
    BootstrapResult r1 = bootstrap_one_sided(a, b, 5000, TestDirection::greater, 99);
    BootstrapResult r2 = bootstrap_one_sided(a, b, 5000, TestDirection::greater, 99);
    CHECK(r1.p_value == r2.p_value);

    // p(greater) + p(less) >= 1 exactly under the tie rule with a shared seed
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> ga = random_group(rng, 8);
        std::vector<double> gb = random_group(rng, 8);
        double pg = bootstrap_one_sided(ga, gb, 2000, TestDirection::greater, trial).p_value;
        double pl = bootstrap_one_sided(ga, gb, 2000, TestDirection::less, trial).p_value;
        CHECK(pg + pl >= 1.0);
    }
}

TEST_CASE("shifting group_a upward cannot increase p for direction greater") {
    Rng rng(515);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a = random_group(rng, 8);
        std::vector<double> b = random_group(rng, 8);
        double p0 = bootstrap_one_sided(a, b, 2000, TestDirection::greater, trial).p_value;
        std::vector<double> shifted = a;
        for (auto& v : shifted) v += 2.5;
        double p1 = bootstrap_one_sided(shifted, b, 2000, TestDirection::greater, trial).p_value;
        CHECK(p1 <= p0);
    }
}

TEST_CASE("empty groups and zero resamples are rejected") {
    std::vector<double> some = {1.0};
    CHECK_THROWS_AS(bootstrap_one_sided({}, some, 10, TestDirection::greater, 1), ValidationError);
    CHECK_THROWS_AS(bootstrap_one_sided(some, {}, 10, TestDirection::greater, 1), ValidationError);
    CHECK_THROWS_AS(bootstrap_one_sided(some, some, 0, TestDirection::greater, 1), ValidationError);
}

TEST_CASE("significance marks use strict thresholds") {
    CHECK(significance_mark(0.005) == SignificanceMark::twofold);
    CHECK(significance_mark(0.0) == SignificanceMark::twofold);
    CHECK(significance_mark(0.03) == SignificanceMark::single);
    CHECK(significance_mark(0.01) == SignificanceMark::single);   // strict at 0.01
    CHECK(significance_mark(0.05) == SignificanceMark::none);     // strict at 0.05
    CHECK(significance_mark(0.049999) == SignificanceMark::single);
    CHECK(significance_mark(1.0) == SignificanceMark::none);
    CHECK(mark_symbol(SignificanceMark::twofold) == "**");
    CHECK(mark_symbol(SignificanceMark::single) == "*");
    CHECK(mark_symbol(SignificanceMark::none) == "");
}
