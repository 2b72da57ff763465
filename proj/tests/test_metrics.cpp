#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "liquidrank/metrics.hpp"
#include "liquidrank/rng.hpp"
#include "support/oracles.hpp"

using namespace liquidrank;

namespace {

AgentEconomics econ(ParticipantId id, double received, double spent, double quality,
                    double reputation = 0.5) {
    AgentEconomics a;
    a.agent = id;
    a.volume_received = received;
    a.volume_spent = spent;
    a.quality = quality;
    a.reputation = reputation;
    return a;
}

double classical_pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

} // namespace

TEST_CASE("weighted_covariance: constant series has zero covariance") {
    const std::vector<double> a{3.0, 3.0, 3.0};
    const std::vector<double> b{1.0, 5.0, 9.0};
    const std::vector<double> w{1.0, 2.0, 0.5};
    CHECK(weighted_covariance(a, b, w) == 0.0);
}

TEST_CASE("weighted_covariance: direct evaluations") {
    CHECK(weighted_covariance(std::vector{0.0, 2.0}, std::vector{0.0, 2.0},
                              std::vector{1.0, 1.0}) == 1.0);
    // weighted means 1.25 and 1.75, cov = 4.25/4
    CHECK(weighted_covariance(std::vector{0.0, 1.0, 2.0}, std::vector{0.0, 1.0, 3.0},
                              std::vector{1.0, 1.0, 2.0}) == 1.0625);
}

TEST_CASE("weighted_covariance: bad inputs throw") {
    CHECK_THROWS_AS(weighted_covariance(std::vector{1.0}, std::vector{1.0, 2.0},
                                        std::vector{1.0, 1.0}),
                    std::domain_error);
    CHECK_THROWS_AS(weighted_covariance(std::vector{1.0, 2.0}, std::vector{1.0, 2.0},
                                        std::vector{0.0, 0.0}),
                    std::domain_error);
}

TEST_CASE("weighted_pearson: perfect correlations") {
    WeightedSample s;
    s.x = {1.0, 2.0, 3.0};
    s.y = {1.0, 2.0, 3.0};
    s.w = {1.0, 1.0, 1.0};
    CHECK(weighted_pearson(s) == doctest::Approx(1.0).epsilon(1e-12));
    s.y = {3.0, 2.0, 1.0};
    CHECK(weighted_pearson(s) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("weighted_pearson: weighted evaluation") {
    WeightedSample s;
    s.x = {0.0, 1.0, 2.0};
    s.y = {0.0, 1.0, 3.0};
    s.w = {1.0, 1.0, 2.0};
    // 1.0625 / sqrt(0.6875 * 1.6875)
    const double expected = 1.0625 / std::sqrt(0.6875 * 1.6875);
    CHECK(weighted_pearson(s) == doctest::Approx(0.9864).epsilon(1e-3));
    CHECK(weighted_pearson(s) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("weighted_pearson: zero variance is undefined") {
    WeightedSample s;
    s.x = {1.0, 1.0};
    s.y = {0.0, 1.0};
    s.w = {1.0, 1.0};
    CHECK_THROWS_AS(weighted_pearson(s), std::domain_error);
    CHECK(!try_weighted_pearson(s).has_value());
}

TEST_CASE("weighted_pearson: uniform weights reduce to classical Pearson") {
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.uniform_index(30);
        WeightedSample s;
        for (std::size_t i = 0; i < n; ++i) {
            s.x.push_back(rng.uniform() * 10.0 - 5.0);
            s.y.push_back(rng.uniform() * 4.0 + rng.uniform());
            s.w.push_back(1.0);
        }
        const auto r = try_weighted_pearson(s);
        if (!r) {
            continue;
        }
        CHECK(*r == doctest::Approx(classical_pearson(s.x, s.y)).epsilon(1e-12));
    }
}

TEST_CASE("weighted_pearson: invariant under positive affine transforms") {
    Rng rng(29);
    for (int trial = 0; trial < 50; ++trial) {
        WeightedSample s;
        for (int i = 0; i < 12; ++i) {
            s.x.push_back(rng.uniform());
            s.y.push_back(rng.uniform());
            s.w.push_back(0.1 + rng.uniform());
        }
        const auto base = try_weighted_pearson(s);
        REQUIRE(base.has_value());
        WeightedSample t = s;
        const double ax = 0.5 + 2.0 * rng.uniform();
        const double bx = rng.uniform() - 0.5;
        const double ay = 0.5 + 2.0 * rng.uniform();
        const double by = rng.uniform() - 0.5;
        for (std::size_t i = 0; i < t.x.size(); ++i) {
            t.x[i] = ax * t.x[i] + bx;
            t.y[i] = ay * t.y[i] + by;
        }
        CHECK(*try_weighted_pearson(t) == doctest::Approx(*base).epsilon(1e-9));
        // rescaling the weights changes nothing either
        WeightedSample u = s;
        const double c = 0.1 + 5.0 * rng.uniform();
        for (double& w : u.w) {
            w *= c;
        }
        CHECK(*try_weighted_pearson(u) == doctest::Approx(*base).epsilon(1e-9));
    }
}

TEST_CASE("equity_weights: complement for security, identity for equity") {
    const std::vector<double> reps{0.0, 1.0};
    CHECK(equity_weights(reps, EquityDirection::low) == std::vector{1.0, 0.0});
    CHECK(equity_weights(reps, EquityDirection::high) == std::vector{0.0, 1.0});
    const std::vector<double> mid{0.25, 0.5, 0.75};
    CHECK(equity_weights(mid, EquityDirection::low) == std::vector{0.75, 0.5, 0.25});
}

TEST_CASE("pearson_by_good: qualifying goods and the average") {
    std::map<int, WeightedSample> samples;
    samples[0] = {{0.1, 0.4, 0.7, 1.0}, {0.1, 0.4, 0.7, 1.0}, {1, 1, 1, 1}};
    const PearsonByGood single = pearson_by_good(samples);
    CHECK(single.coefficients.at(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(single.average.value() == doctest::Approx(1.0).epsilon(1e-12));

    // a 3-sample good is reported but excluded from the average
    samples[1] = {{0.0, 0.5, 1.0}, {1.0, 0.5, 0.0}, {1, 1, 1}};
    const PearsonByGood with_small = pearson_by_good(samples);
    CHECK(with_small.coefficients.count(1) == 1);
    CHECK(with_small.average.value() == doctest::Approx(1.0).epsilon(1e-12));

    // two qualifying goods average their coefficients
    WeightedSample half;
    half.x = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
    half.y = {0.0, 2.0, 1.0, 4.0, 2.0, 4.0};
    half.w.assign(6, 1.0);
    samples[2] = half;
    const double r2 = weighted_pearson(half);
    const PearsonByGood two = pearson_by_good(samples);
    CHECK(two.average.value() == doctest::Approx((1.0 + r2) / 2.0).epsilon(1e-12));

    // undefined correlations are absent
    samples[3] = {{0.5, 0.5, 0.5, 0.5}, {0.0, 1.0, 0.0, 1.0}, {1, 1, 1, 1}};
    const PearsonByGood with_flat = pearson_by_good(samples);
    CHECK(with_flat.coefficients.count(3) == 0);
}

TEST_CASE("inequity: uniform shares give exactly zero") {
    std::vector<AgentEconomics> agents;
    for (int i = 0; i < 4; ++i) {
        agents.push_back(econ(i, 10.0, 10.0, 1.0));
    }
    CHECK(inequity(agents) == 0.0);
}

TEST_CASE("inequity: single holder reaches 1 - 1/N") {
    const std::vector<AgentEconomics> agents{econ(0, 0.0, 0.0, 1.0), econ(1, 20.0, 0.0, 1.0)};
    CHECK(inequity(agents) == 0.5);
}

TEST_CASE("inequity: two-agent [5,10] case equals 1/6") {
    const std::vector<AgentEconomics> agents{econ(0, 10.0, 0.0, 1.0), econ(1, 20.0, 0.0, 1.0)};
    CHECK(inequity(agents) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("inequity: quality divides the share") {
    // same volume but half the quality doubles the share
    const std::vector<AgentEconomics> a{econ(0, 10.0, 0.0, 1.0), econ(1, 10.0, 0.0, 0.5)};
    const std::vector<AgentEconomics> b{econ(0, 10.0, 0.0, 1.0), econ(1, 20.0, 0.0, 1.0)};
    CHECK(inequity(a) == doctest::Approx(inequity(b)).epsilon(1e-12));
}

TEST_CASE("inequity: matches the mean-absolute-difference Gini oracle") {
    Rng rng(31);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.uniform_index(20);
        std::vector<AgentEconomics> agents;
        std::vector<double> shares;
        for (std::size_t i = 0; i < n; ++i) {
            const double received = rng.uniform() * 100.0;
            const double spent = rng.uniform() * 100.0;
            const double quality = 0.05 + 0.95 * rng.uniform();
            agents.push_back(econ(static_cast<ParticipantId>(i), received, spent, quality));
            shares.push_back(0.5 * (received + spent) / quality);
        }
        const double ours = inequity(agents);
        const double oracle = test_oracles::mad_gini(shares);
        CHECK(ours == doctest::Approx(oracle).epsilon(1e-9));
        CHECK(ours >= -1e-12);
        CHECK(ours <= 1.0 - 1.0 / static_cast<double>(n) + 1e-12);
    }
}

TEST_CASE("inequity: invariant under volume rescaling") {
    Rng rng(37);
    std::vector<AgentEconomics> agents;
    for (int i = 0; i < 9; ++i) {
        agents.push_back(econ(i, rng.uniform() * 50.0, rng.uniform() * 50.0,
                              0.1 + 0.9 * rng.uniform()));
    }
    const double base = inequity(agents);
    for (auto& a : agents) {
        a.volume_received *= 1000.0;
        a.volume_spent *= 1000.0;
    }
    CHECK(inequity(agents) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("inequity: degenerate inputs throw") {
    CHECK_THROWS_AS(inequity(std::vector<AgentEconomics>{econ(0, 1.0, 1.0, 1.0)}),
                    std::domain_error);
    const std::vector<AgentEconomics> bad{econ(0, 1.0, 1.0, 1.0), econ(1, 1.0, 1.0, 0.0)};
    CHECK_THROWS_AS(inequity(bad), std::domain_error);
}

TEST_CASE("inequity: zero total share means perfect equality") {
    const std::vector<AgentEconomics> agents{econ(0, 0.0, 0.0, 0.5), econ(1, 0.0, 0.0, 0.9)};
    CHECK(inequity(agents) == 0.0);
}

TEST_CASE("utility: arithmetic mean of ratings") {
    CHECK(utility(std::vector{1.0, 1.0, 1.0}) == 1.0);
    CHECK(utility(std::vector{0.0, 1.0}) == 0.5);
    CHECK(utility(std::vector{0.2, 0.4, 0.9}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(utility({}), std::domain_error);
}

TEST_CASE("utility: permutation invariant") {
    const std::vector<double> a{0.1, 0.9, 0.4, 0.7, 0.3};
    const std::vector<double> b{0.9, 0.3, 0.7, 0.1, 0.4};
    CHECK(utility(a) == doctest::Approx(utility(b)).epsilon(1e-15));
}

TEST_CASE("loss_to_scam: only honest-to-scam trades count") {
    std::vector<RatedTransaction> ledger;
    RatedTransaction t;
    t.value = 7.0;
    t.rater = 1;
    t.ratee = 100;
    ledger.push_back(t); // honest -> scam
    t.rater = 50;
    t.ratee = 100;
    ledger.push_back(t); // scam rater -> scam supplier (fake)
    t.rater = 1;
    t.ratee = 2;
    ledger.push_back(t); // honest -> honest
    const std::set<ParticipantId> scam_suppliers{100};
    const std::set<ParticipantId> honest_consumers{1, 2};
    CHECK(loss_to_scam(ledger, scam_suppliers, honest_consumers) == 7.0);
    CHECK(loss_to_scam({}, scam_suppliers, honest_consumers) == 0.0);
}

TEST_CASE("student_t_two_sided_p: matches published t-table values") {
    // two-sided critical values: P(|T| > t) at the given df
    CHECK(student_t_two_sided_p(12.7062, 1.0) == doctest::Approx(0.05).epsilon(2e-4));
    CHECK(student_t_two_sided_p(2.2281, 10.0) == doctest::Approx(0.05).epsilon(2e-4));
    CHECK(student_t_two_sided_p(2.0860, 20.0) == doctest::Approx(0.05).epsilon(2e-4));
    CHECK(student_t_two_sided_p(2.8453, 20.0) == doctest::Approx(0.01).epsilon(2e-4));
    // df=1 is Cauchy: P(|T| > 1) = 0.5 exactly
    CHECK(student_t_two_sided_p(1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(student_t_two_sided_p(0.0, 30.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("significance_test: identical samples are not significant") {
    const std::vector<double> a{0.0, 1.0};
    const auto result = significance_test(a, a);
    CHECK(result.p_value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(!result.significant_at_99);
}

TEST_CASE("significance_test: well separated samples are significant") {
    Rng rng(41);
    std::vector<double> a, b;
    for (int i = 0; i < 20; ++i) {
        a.push_back(rng.normal(0.89, 0.01));
        b.push_back(rng.normal(0.76, 0.01));
    }
    const auto result = significance_test(a, b);
    CHECK(result.significant_at_99);
    CHECK(result.p_value < 1e-6);
    CHECK(result.t_statistic > 10.0);
}

TEST_CASE("significance_test: Welch degrees of freedom") {
    // var_a=2 (n=2) -> se_a=1; var_b=16/3 (n=4) -> se_b=4/3; se2=7/3;
    // df = (7/3)^2 / (1^2/1 + (4/3)^2/3) = (49/9)/(43/27) = 147/43
    const std::vector<double> a{0.0, 2.0};
    const std::vector<double> b{0.0, 4.0, 0.0, 4.0};
    const auto result = significance_test(a, b);
    CHECK(result.degrees_of_freedom == doctest::Approx(147.0 / 43.0).epsilon(1e-12));
}

TEST_CASE("significance_test: degenerate samples throw") {
    CHECK_THROWS_AS(significance_test(std::vector{1.0}, std::vector{1.0, 2.0}),
                    std::domain_error);
    CHECK_THROWS_AS(significance_test(std::vector{1.0, 1.0}, std::vector{2.0, 2.0}),
                    std::domain_error);
}
