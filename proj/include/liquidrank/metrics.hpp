#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "liquidrank/types.hpp"

namespace liquidrank {

/// Paired series with per-point weights. x holds reputation scores, y actual
/// qualities; weights must be non-negative with a positive sum.
struct WeightedSample {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> w;
};

enum class EquityDirection { low, high };

/// Per-agent totals feeding the inequity metric. quality is the agent's true
/// goodness in (0,1]; volumes are currency received and spent.
struct AgentEconomics {
    ParticipantId agent = 0;
    double volume_received = 0.0;
    double volume_spent = 0.0;
    double quality = 1.0;
    double reputation = 0.0;
};

struct PearsonByGood {
    /// Goods with a defined correlation (at least two points, nonzero variances).
    std::map<int, double> coefficients;
    /// Mean over goods with more than three samples and a defined coefficient.
    std::optional<double> average;
};

struct SignificanceResult {
    double p_value = 1.0;
    bool significant_at_99 = false;
    double t_statistic = 0.0;
    double degrees_of_freedom = 0.0;
};

/// Everything one run reports. Correlation fields are NaN when undefined
/// (zero variance or no qualifying data).
struct MetricsReport {
    double utility = 0.0;
    double inequity = 0.0;
    double pccw_overall = 0.0;
    double pccw_low_weighted = 0.0;
    double pccw_high_weighted = 0.0;
    std::map<int, double> pearson_by_good;
    double pearson_by_good_avg = 0.0;
    double loss_to_scam = 0.0;
};

/// Weighted covariance sum(w*(a-mean_a)*(b-mean_b))/sum(w) with w-weighted
/// means. Series must have equal nonzero length and sum(w) > 0.
double weighted_covariance(std::span<const double> a, std::span<const double> b,
                           std::span<const double> w);

/// Weighted Pearson coefficient cov(x,y,w)/sqrt(cov(x,x,w)*cov(y,y,w)).
/// Throws std::domain_error when either variance is zero.
double weighted_pearson(const WeightedSample& sample);

/// As weighted_pearson but nullopt instead of throwing on zero variance.
std::optional<double> try_weighted_pearson(const WeightedSample& sample);

/// Per-point weights emphasizing one end of the reputation range:
/// low -> 1-r (security view), high -> r (equity view).
std::vector<double> equity_weights(std::span<const double> reputations,
                                   EquityDirection direction);

/// Unweighted Pearson per good, plus the average over goods with more than
/// three samples. Goods whose correlation is undefined are omitted from the
/// coefficient map and the average.
PearsonByGood pearson_by_good(const std::map<int, WeightedSample>& samples);

/// Gini-style concentration of equitable shares W = (received+spent)/2/quality:
/// 0 when wealth is proportional to quality everywhere, 1-1/N when one agent
/// holds everything. Needs at least two agents, all with quality > 0.
double inequity(std::span<const AgentEconomics> agents);

/// Mean rating; the caller restricts the list to honest consumers' ratings.
/// Empty input throws.
double utility(std::span<const double> ratings);

/// Currency honest consumers spent on scam suppliers.
double loss_to_scam(std::span<const RatedTransaction> ledger,
                    const std::set<ParticipantId>& scam_suppliers,
                    const std::set<ParticipantId>& honest_consumers);

/// Two-sided Welch unequal-variance t-test. Each sample needs at least two
/// values; a zero-variance pair of samples is a domain error.
SignificanceResult significance_test(std::span<const double> sample_a,
                                     std::span<const double> sample_b);

/// Two-sided p-value of the t statistic at the given degrees of freedom.
double student_t_two_sided_p(double t, double df);

} // namespace liquidrank
