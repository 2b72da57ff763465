#pragma once

#include <set>
#include <span>

#include "liquidrank/types.hpp"

namespace liquidrank {

/// Knobs for the periodic rank update. All real-valued fields live in [0,1].
struct ReputationParams {
    /// Rank assumed for raters that were unseen at the end of the previous period.
    double default_rank = 0.5;
    /// Blend weight kept by the old ranks; 1 freezes history, 0 forgets it.
    double conservatism = 0.5;
    /// Weight transactions by log10(1+value) instead of raw value.
    bool logarithmic_ratings = true;
    /// Differential substitute for participants with no incoming ratings this period.
    double decay_value = 0.5;

    /// Throws std::domain_error when a field leaves [0,1].
    void validate() const;

    friend bool operator==(const ReputationParams&, const ReputationParams&) = default;
};

/// Weight a transaction contributes: the financial value, or log10(1+value) in
/// logarithmic mode. value must be > 0.
double rating_weight(double value, const ReputationParams& params);

/// One period's ranks from that period's transactions alone: per ratee, the
/// sum of rater_rank * rating * rating_weight over incoming transactions,
/// normalized by the maximum sum. Raters missing from prev_ranks count with
/// params.default_rank. Only ratees with at least one incoming transaction
/// appear; an empty transaction list yields an empty map.
RankMap compute_differential_ranks(std::span<const RatedTransaction> transactions,
                                   const RankMap& prev_ranks,
                                   const ReputationParams& params);

/// Convex blend of old ranks with differential ranks over `all_known`
/// (which must cover the keys of both maps): conservatism * old +
/// (1 - conservatism) * differential, with default_rank standing in for
/// missing old ranks and decay_value for participants unrated this period.
/// The result is normalized by its maximum.
RankMap blend_ranks(const RankMap& prev_ranks, const RankMap& differential,
                    const ReputationParams& params,
                    const std::set<ParticipantId>& all_known);

/// Full periodic update: differential ranks from `transactions`, then the
/// conservatism blend over every participant in prev_ranks or rated this
/// period. Pure function; identical inputs give bit-identical output.
RankMap update_ranks(std::span<const RatedTransaction> transactions,
                     const RankMap& prev_ranks, const ReputationParams& params);

} // namespace liquidrank
