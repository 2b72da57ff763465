#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>

namespace liquidrank {

/// Opaque agent identifier, stable for the lifetime of a simulation run.
using ParticipantId = std::int64_t;

/// One purchase event: the rater (consumer) grades the ratee (supplier).
/// `value` is the financial size of the transaction in currency units,
/// `rating` the delivered quality in [0,1].
struct RatedTransaction {
    int day = 0;
    ParticipantId rater = 0;
    ParticipantId ratee = 0;
    int good = 0;
    double value = 0.0;
    double rating = 0.0;

    friend bool operator==(const RatedTransaction&, const RatedTransaction&) = default;
};

/// Reputation scores per participant at a period boundary. All values stay in
/// [0,1]; a non-empty map with any positive entry has maximum exactly 1.
using RankMap = std::map<ParticipantId, double>;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace liquidrank
