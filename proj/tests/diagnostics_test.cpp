#include "hawkesboot/diagnostics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "hawkesboot/rng.hpp"

using namespace hawkesboot;

TEST(KsExp1, PlugInQuantileGridHasTinyStatistic) {
    // values sitting exactly at the Exp(1) quantiles of a uniform grid
    const int n = 400;
    std::vector<double> xs;
    for (int i = 1; i <= n; ++i) {
        xs.push_back(-std::log(1.0 - (static_cast<double>(i) - 0.5) / n));
    }
    const auto r = ks_exp1(xs);
    EXPECT_LE(r.statistic, 1.0 / n + 1e-12);
    EXPECT_GT(r.p_value, 0.99);
}

TEST(KsExp1, OrderInvariance) {
    Rng rng(3);
    std::vector<double> xs;
    for (int i = 0; i < 300; ++i) xs.push_back(rng.exp1());
    const auto sorted_stat = ks_exp1(xs);
    std::vector<double> shuffled = xs;
    std::mt19937 mt(4);
    std::shuffle(shuffled.begin(), shuffled.end(), mt);
    const auto shuffled_stat = ks_exp1(shuffled);
    EXPECT_DOUBLE_EQ(sorted_stat.statistic, shuffled_stat.statistic);
    EXPECT_DOUBLE_EQ(sorted_stat.p_value, shuffled_stat.p_value);
}

TEST(KsExp1, PValuesApproximatelyUniformUnderTheNull) {
    // n = 428 Exp(1) samples per run; the p-values across runs should
    // themselves look uniform (checked with a KS test at the 1% level).
    std::vector<double> pvals;
    for (int rep = 0; rep < 500; ++rep) {
        Rng rng(9000 + static_cast<std::uint64_t>(rep));
        std::vector<double> xs;
        for (int i = 0; i < 428; ++i) xs.push_back(rng.exp1());
        pvals.push_back(ks_exp1(xs).p_value);
    }
    std::sort(pvals.begin(), pvals.end());
    const double n = static_cast<double>(pvals.size());
    double d = 0.0;
    for (std::size_t i = 0; i < pvals.size(); ++i) {
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - pvals[i], pvals[i] - static_cast<double>(i) / n});
    }
    EXPECT_GT(kolmogorov_q(std::sqrt(n) * d), 0.01);
    // mildly calibrated sizes as well
    const auto below = std::lower_bound(pvals.begin(), pvals.end(), 0.05) - pvals.begin();
    EXPECT_NEAR(static_cast<double>(below) / n, 0.05, 0.03);
}

TEST(KsExp1, RejectsObviouslyWrongDistribution) {
    Rng rng(12);
    std::vector<double> xs;
    for (int i = 0; i < 400; ++i) xs.push_back(2.5 * rng.exp1());
    EXPECT_LT(ks_exp1(xs).p_value, 1e-6);
}

TEST(KsExp1, TooFewValuesThrow) {
    EXPECT_THROW(ks_exp1(std::vector<double>{}), std::invalid_argument);
    EXPECT_THROW(ks_exp1(std::vector<double>{1.0}), std::invalid_argument);
}

TEST(QqPairs, SingleValueUsesHazenPosition) {
    const auto pairs = qq_pairs(std::vector<double>{0.9});
    ASSERT_EQ(pairs.size(), 1u);
    EXPECT_DOUBLE_EQ(pairs[0].first, 0.9);
    EXPECT_DOUBLE_EQ(pairs[0].second, -std::log(0.5));
}

TEST(QqPairs, MonotoneInBothCoordinatesAndFullLength) {
    Rng rng(21);
    std::vector<double> xs;
    for (int i = 0; i < 777; ++i) xs.push_back(rng.exp1());
    const auto pairs = qq_pairs(xs);
    ASSERT_EQ(pairs.size(), xs.size());
    for (std::size_t i = 1; i < pairs.size(); ++i) {
        EXPECT_GE(pairs[i].first, pairs[i - 1].first);
        EXPECT_GT(pairs[i].second, pairs[i - 1].second);
    }
}

TEST(QqPairs, MedianNearLogTwoForUnitExponentialData) {
    Rng rng(31);
    std::vector<double> xs;
    for (int i = 0; i < 10000; ++i) xs.push_back(rng.exp1());
    const auto pairs = qq_pairs(xs);
    const double median_emp = pairs[pairs.size() / 2].first;
    EXPECT_NEAR(median_emp, std::log(2.0), 0.03);
}

TEST(Acf, LagZeroIsOneAndValuesBounded) {
    Rng rng(41);
    std::vector<double> xs;
    for (int i = 0; i < 500; ++i) xs.push_back(rng.exp1());
    const auto r = acf(xs, 30);
    EXPECT_DOUBLE_EQ(r.values[0], 1.0);
    for (double v : r.values) {
        EXPECT_GE(v, -1.0);
        EXPECT_LE(v, 1.0);
    }
    EXPECT_NEAR(r.band, 1.96 / std::sqrt(500.0), 1e-12);
}

TEST(Acf, WhiteNoiseStaysInsideTheBand) {
    // 5 seeds x lags 1..20 = 100 band checks; a 5%-band should fail at most 8.
    int outside = 0;
    for (int seed = 0; seed < 5; ++seed) {
        Rng rng(5000 + static_cast<std::uint64_t>(seed));
        std::vector<double> xs;
        for (int i = 0; i < 2000; ++i) xs.push_back(rng.exp1());
        const auto r = acf(xs, 20);
        for (int k = 1; k <= 20; ++k) {
            if (std::abs(r.values[static_cast<std::size_t>(k)]) > r.band) {
                ++outside;
            }
        }
    }
    EXPECT_LE(outside, 8);
}

TEST(Acf, PositivelyCorrelatedDurationsAgainstDirectFormula) {
    // AR(1)-like positive duration series
    Rng rng(61);
    std::vector<double> xs;
    double prev = 1.0;
    for (int i = 0; i < 1500; ++i) {
        prev = 0.3 + 0.6 * prev + 0.4 * rng.exp1();
        xs.push_back(prev);
    }
    const auto r = acf(xs, 5);
    EXPECT_GT(r.values[1], 0.2);
    // direct covariance-formula oracle
    const int n = static_cast<int>(xs.size());
    double m = 0.0;
    for (double x : xs) m += x;
    m /= n;
    double c0 = 0.0, c1 = 0.0;
    for (int t = 0; t < n; ++t) c0 += (xs[static_cast<std::size_t>(t)] - m) * (xs[static_cast<std::size_t>(t)] - m);
    for (int t = 0; t + 1 < n; ++t) c1 += (xs[static_cast<std::size_t>(t)] - m) * (xs[static_cast<std::size_t>(t + 1)] - m);
    EXPECT_NEAR(r.values[1], c1 / c0, 1e-12);
}

TEST(Acf, ErrorPaths) {
    std::vector<double> constant(50, 3.3);
    EXPECT_THROW(acf(constant, 5), std::domain_error);
    std::vector<double> xs{1.0, 2.0, 3.0};
    EXPECT_THROW(acf(xs, 3), std::invalid_argument);
    EXPECT_THROW(acf(xs, -1), std::invalid_argument);
}
