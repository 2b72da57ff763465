#include "liquidrank/reputation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace liquidrank {

namespace {

void require_unit_interval(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::domain_error(std::string(name) + " must be in [0,1], got " +
                                std::to_string(v));
    }
}

/// Divide by the maximum entry so the largest rank is exactly 1. An all-zero
/// (or empty) map is left untouched.
void normalize_by_max(RankMap& ranks) {
    double max_value = 0.0;
    for (const auto& [id, value] : ranks) {
        max_value = std::max(max_value, value);
    }
    if (max_value <= 0.0) {
        return;
    }
    for (auto& [id, value] : ranks) {
        value /= max_value;
    }
}

void validate_transaction(const RatedTransaction& t) {
    if (!(t.value > 0.0)) {
        throw std::domain_error("transaction value must be > 0");
    }
    if (!(t.rating >= 0.0 && t.rating <= 1.0)) {
        throw std::domain_error("transaction rating must be in [0,1]");
    }
    if (t.rater == t.ratee) {
        throw std::domain_error("transaction rater and ratee must differ");
    }
}

} // namespace

void ReputationParams::validate() const {
    require_unit_interval(default_rank, "default_rank");
    require_unit_interval(conservatism, "conservatism");
    require_unit_interval(decay_value, "decay_value");
}

double rating_weight(double value, const ReputationParams& params) {
    if (!(value > 0.0)) {
        throw std::domain_error("rating_weight: value must be > 0");
    }
    return params.logarithmic_ratings ? std::log10(1.0 + value) : value;
}

RankMap compute_differential_ranks(std::span<const RatedTransaction> transactions,
                                   const RankMap& prev_ranks,
                                   const ReputationParams& params) {
    params.validate();
    RankMap raw;
    for (const RatedTransaction& t : transactions) {
        validate_transaction(t);
        const auto it = prev_ranks.find(t.rater);
        const double rater_value = it != prev_ranks.end() ? it->second : params.default_rank;
        raw[t.ratee] += rater_value * t.rating * rating_weight(t.value, params);
    }
    normalize_by_max(raw);
    return raw;
}

RankMap blend_ranks(const RankMap& prev_ranks, const RankMap& differential,
                    const ReputationParams& params,
                    const std::set<ParticipantId>& all_known) {
    params.validate();
    RankMap blended;
    for (const ParticipantId p : all_known) {
        const auto old_it = prev_ranks.find(p);
        const double old_rank = old_it != prev_ranks.end() ? old_it->second : params.default_rank;
        const auto diff_it = differential.find(p);
        const double diff_rank =
            diff_it != differential.end() ? diff_it->second : params.decay_value;
        blended[p] = params.conservatism * old_rank + (1.0 - params.conservatism) * diff_rank;
    }
    normalize_by_max(blended);
    return blended;
}

RankMap update_ranks(std::span<const RatedTransaction> transactions,
                     const RankMap& prev_ranks, const ReputationParams& params) {
    const RankMap differential = compute_differential_ranks(transactions, prev_ranks, params);
    std::set<ParticipantId> all_known;
    for (const auto& [id, rank] : prev_ranks) {
        all_known.insert(id);
    }
    for (const auto& [id, rank] : differential) {
        all_known.insert(id);
    }
    return blend_ranks(prev_ranks, differential, params, all_known);
}

} // namespace liquidrank
