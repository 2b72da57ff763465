#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "liquidrank/metrics.hpp"
#include "liquidrank/reputation.hpp"
#include "liquidrank/rng.hpp"
#include "liquidrank/types.hpp"

namespace liquidrank {

/// How consumers turn reputation scores into supplier choices.
/// `none` disables the reputation system entirely.
enum class Strategy { winner_take_all, roulette, thresholded_random, none };

std::string to_string(Strategy strategy);
Strategy strategy_from_string(const std::string& name);

struct AgentSpec {
    ParticipantId id = 0;
    bool is_consumer = false;
    bool is_supplier = false;
    bool honest = true;
    /// True goodness per supplied good, each in (0,1]. Empty for pure consumers.
    std::map<int, double> quality;

    friend bool operator==(const AgentSpec&, const AgentSpec&) = default;
};

/// Full experiment description. Defaults give a consumer marketplace of a
/// thousand agents trading ten goods over six months.
struct MarketConfig {
    int n_agents = 1000;
    int n_goods = 10;
    int n_days = 183;
    /// Fraction of honest agents acting as both consumer and supplier.
    double overlap_fraction = 0.0;
    /// Supplier share of the honest agents that are not dual-role.
    double pure_supplier_share = 0.5;
    int scam_supplier_count = 5;
    int scam_rater_count = 50;
    /// Minimum cumulative honest:scam market volume ratio; scam activity is
    /// throttled to keep it. Set to infinity to disable scam injection.
    double target_volume_ratio = 50.0;
    Strategy strategy = Strategy::roulette;
    /// Reputation cutoff used by thresholded_random.
    double threshold = 0.5;
    /// Bindings rated below this are dropped the next day.
    double satisfaction_threshold = 0.5;
    /// Per good, per day chance that a consumer wants that good.
    double shopping_probability = 0.3;
    /// Price per good; empty means 10.0 for every good.
    std::vector<double> prices;
    double rating_noise_sd = 0.1;
    double quality_mean = 0.6;
    double quality_sd = 0.2;
    double scam_supplier_quality = 0.05;
    ReputationParams reputation;
    std::uint64_t seed = 1;

    /// Throws ConfigError on inconsistent values.
    void validate() const;
    /// Price of a good after defaulting.
    double price_of(int good) const;

    friend bool operator==(const MarketConfig&, const MarketConfig&) = default;
};

struct SimulationResult {
    std::vector<RatedTransaction> ledger;
    /// One snapshot per day; stays empty when strategy is none, which never
    /// computes ranks at all.
    std::vector<RankMap> rank_history;
    std::vector<AgentSpec> agents;
    /// Absent for degenerate runs (no transactions or fewer than two suppliers).
    std::optional<MetricsReport> metrics;
};

/// Lays out the population: dual-role honest agents first, then pure
/// consumers, pure suppliers, scam raters and scam suppliers. Every supplier
/// carries one good (round-robin) with quality drawn from the clipped normal;
/// scam suppliers get the fixed low quality instead.
std::vector<AgentSpec> init_population(const MarketConfig& config, Rng& rng);

/// Goods the consumer wants today; each good independently with
/// config.shopping_probability.
std::vector<int> shopping_list(const AgentSpec& consumer, const MarketConfig& config,
                               Rng& rng);

struct SupplierBinding {
    ParticipantId supplier = 0;
    double last_rating = 0.0;

    friend bool operator==(const SupplierBinding&, const SupplierBinding&) = default;
};

/// What a consumer remembers per good: its current supplier and the last
/// rating it gave there.
using ConsumerMemory = std::map<int, SupplierBinding>;

/// Keeps bindings rated at or above the satisfaction threshold, drops the rest.
ConsumerMemory drop_unsatisfying_suppliers(ConsumerMemory memory,
                                           const MarketConfig& config);

/// Picks a supplier from a non-empty candidate list. Candidates missing from
/// `ranks` count as rank zero. winner_take_all takes the argmax with ties
/// broken by lowest id; roulette picks proportionally to rank (uniform when
/// all ranks are zero); thresholded_random picks uniformly over candidates at
/// or above `threshold`, falling back to all of them when none qualify; none
/// ignores ranks and picks uniformly.
ParticipantId select_supplier(std::span<const ParticipantId> candidates,
                              const RankMap& ranks, Strategy strategy,
                              double threshold, Rng& rng);

/// One purchase at the good's price. Honest consumers rate the supplier's true
/// quality plus clipped Gaussian noise; a scam rater buying from a scam
/// supplier always rates 1.
RatedTransaction transact_and_rate(const AgentSpec& consumer, const AgentSpec& supplier,
                                   int good, int day, const MarketConfig& config,
                                   Rng& rng);

/// Emits fabricated scam-rater -> scam-supplier transactions, throttled so the
/// cumulative honest:scam volume ratio never falls below the target.
class ScamInjector {
public:
    ScamInjector(const MarketConfig& config, std::span<const AgentSpec> agents);

    /// Fake transactions for one day given the honest volume traded so far.
    std::vector<RatedTransaction> emit(int day, double cumulative_honest_volume,
                                       Rng& rng);

    double emitted_volume() const { return emitted_volume_; }
    bool active() const { return !raters_.empty() && !suppliers_.empty(); }

private:
    struct ScamSupplier {
        ParticipantId id;
        int good;
        double price;
    };
    std::vector<ParticipantId> raters_;
    std::vector<ScamSupplier> suppliers_;
    double target_ratio_;
    double emitted_volume_ = 0.0;
    std::size_t cursor_ = 0;
};

/// Assembles the evaluation report from a finished run: utility over honest
/// consumers' ratings, loss to scam, supplier-level inequity, and the
/// reputation-vs-quality correlations against `final_ranks`.
MetricsReport compute_metrics(const std::vector<RatedTransaction>& ledger,
                              const std::vector<AgentSpec>& agents,
                              const RankMap& final_ranks);

/// Runs the daily market loop: shopping lists, supplier dropping, selection
/// per strategy, purchases and ratings, scam injection, and an end-of-day rank
/// update (skipped when strategy is none). Deterministic given config.seed.
SimulationResult run_simulation(const MarketConfig& config);

} // namespace liquidrank
