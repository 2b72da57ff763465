#include "liquidrank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace liquidrank {

namespace {

constexpr double kQuietNan = std::numeric_limits<double>::quiet_NaN();

struct WeightedMoments {
    double mean_a = 0.0;
    double mean_b = 0.0;
    double weight_sum = 0.0;
};

WeightedMoments weighted_means(std::span<const double> a, std::span<const double> b,
                               std::span<const double> w) {
    if (a.size() != b.size() || a.size() != w.size()) {
        throw std::domain_error("weighted series must have equal lengths");
    }
    if (a.empty()) {
        throw std::domain_error("weighted series must be non-empty");
    }
    WeightedMoments m;
    double sum_a = 0.0;
    double sum_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(w[i] >= 0.0)) {
            throw std::domain_error("weights must be non-negative");
        }
        m.weight_sum += w[i];
        sum_a += w[i] * a[i];
        sum_b += w[i] * b[i];
    }
    if (!(m.weight_sum > 0.0)) {
        throw std::domain_error("weight sum must be positive");
    }
    m.mean_a = sum_a / m.weight_sum;
    m.mean_b = sum_b / m.weight_sum;
    return m;
}

/// Continued fraction for the regularized incomplete beta (modified Lentz).
double incomplete_beta_cf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 3e-14;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * incomplete_beta_cf(a, b, x) / a;
    }
    return 1.0 - front * incomplete_beta_cf(b, a, 1.0 - x) / b;
}

struct SampleStats {
    double mean = 0.0;
    double variance = 0.0; // unbiased
    std::size_t n = 0;
};

SampleStats sample_stats(std::span<const double> values) {
    SampleStats s;
    s.n = values.size();
    if (s.n < 2) {
        throw std::domain_error("significance_test: each sample needs at least 2 values");
    }
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
    double ss = 0.0;
    for (const double v : values) {
        ss += (v - s.mean) * (v - s.mean);
    }
    s.variance = ss / static_cast<double>(s.n - 1);
    return s;
}

} // namespace

double weighted_covariance(std::span<const double> a, std::span<const double> b,
                           std::span<const double> w) {
    const WeightedMoments m = weighted_means(a, b, w);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += w[i] * (a[i] - m.mean_a) * (b[i] - m.mean_b);
    }
    return acc / m.weight_sum;
}

double weighted_pearson(const WeightedSample& sample) {
    const double var_x = weighted_covariance(sample.x, sample.x, sample.w);
    const double var_y = weighted_covariance(sample.y, sample.y, sample.w);
    if (!(var_x > 0.0) || !(var_y > 0.0)) {
        throw std::domain_error("weighted_pearson: undefined correlation (zero variance)");
    }
    return weighted_covariance(sample.x, sample.y, sample.w) / std::sqrt(var_x * var_y);
}

std::optional<double> try_weighted_pearson(const WeightedSample& sample) {
    double weight_sum = 0.0;
    for (const double w : sample.w) {
        weight_sum += w;
    }
    if (sample.x.empty() || !(weight_sum > 0.0)) {
        return std::nullopt; // degenerate weighting counts as undefined
    }
    const double var_x = weighted_covariance(sample.x, sample.x, sample.w);
    const double var_y = weighted_covariance(sample.y, sample.y, sample.w);
    if (!(var_x > 0.0) || !(var_y > 0.0)) {
        return std::nullopt;
    }
    return weighted_covariance(sample.x, sample.y, sample.w) / std::sqrt(var_x * var_y);
}

std::vector<double> equity_weights(std::span<const double> reputations,
                                   EquityDirection direction) {
    std::vector<double> weights;
    weights.reserve(reputations.size());
    for (const double r : reputations) {
        weights.push_back(direction == EquityDirection::low ? 1.0 - r : r);
    }
    return weights;
}

PearsonByGood pearson_by_good(const std::map<int, WeightedSample>& samples) {
    PearsonByGood result;
    double sum = 0.0;
    int qualifying = 0;
    for (const auto& [good, sample] : samples) {
        if (sample.x.size() < 2) {
            continue;
        }
        const auto coefficient = try_weighted_pearson(sample);
        if (!coefficient) {
            continue;
        }
        result.coefficients[good] = *coefficient;
        if (sample.x.size() > 3) {
            sum += *coefficient;
            ++qualifying;
        }
    }
    if (qualifying > 0) {
        result.average = sum / qualifying;
    }
    return result;
}

double inequity(std::span<const AgentEconomics> agents) {
    const std::size_t n = agents.size();
    if (n < 2) {
        throw std::domain_error("inequity: need at least 2 agents");
    }
    std::vector<double> shares;
    shares.reserve(n);
    for (const AgentEconomics& a : agents) {
        if (!(a.quality > 0.0)) {
            throw std::domain_error("inequity: agent quality must be > 0");
        }
        shares.push_back(0.5 * (a.volume_received + a.volume_spent) / a.quality);
    }
    std::sort(shares.begin(), shares.end());
    if (shares.front() == shares.back()) {
        return 0.0; // constant shares are exactly equal
    }
    const double total = std::accumulate(shares.begin(), shares.end(), 0.0);
    if (!(total > 0.0)) {
        return 0.0; // perfect equality of nothing
    }
    double b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        b += shares[i] * static_cast<double>(n - (i + 1));
    }
    b /= static_cast<double>(n) * total;
    return 1.0 - 1.0 / static_cast<double>(n) - 2.0 * b;
}

double utility(std::span<const double> ratings) {
    if (ratings.empty()) {
        throw std::domain_error("utility: no ratings");
    }
    return std::accumulate(ratings.begin(), ratings.end(), 0.0) /
           static_cast<double>(ratings.size());
}

double loss_to_scam(std::span<const RatedTransaction> ledger,
                    const std::set<ParticipantId>& scam_suppliers,
                    const std::set<ParticipantId>& honest_consumers) {
    double loss = 0.0;
    for (const RatedTransaction& t : ledger) {
        if (honest_consumers.contains(t.rater) && scam_suppliers.contains(t.ratee)) {
            loss += t.value;
        }
    }
    return loss;
}

double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) {
        throw std::domain_error("student_t_two_sided_p: df must be > 0");
    }
    if (std::isnan(t)) {
        return kQuietNan;
    }
    const double x = df / (df + t * t);
    return regularized_incomplete_beta(0.5 * df, 0.5, x);
}

SignificanceResult significance_test(std::span<const double> sample_a,
                                     std::span<const double> sample_b) {
    const SampleStats a = sample_stats(sample_a);
    const SampleStats b = sample_stats(sample_b);
    const double na = static_cast<double>(a.n);
    const double nb = static_cast<double>(b.n);
    const double sea = a.variance / na;
    const double seb = b.variance / nb;
    const double se2 = sea + seb;
    if (!(se2 > 0.0)) {
        throw std::domain_error("significance_test: both samples are degenerate");
    }
    SignificanceResult r;
    r.t_statistic = (a.mean - b.mean) / std::sqrt(se2);
    r.degrees_of_freedom =
        se2 * se2 / (sea * sea / (na - 1.0) + seb * seb / (nb - 1.0));
    r.p_value = student_t_two_sided_p(r.t_statistic, r.degrees_of_freedom);
    r.significant_at_99 = r.p_value < 0.01;
    return r;
}

} // namespace liquidrank
