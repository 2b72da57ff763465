#include "liquidrank/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace liquidrank {

namespace {

constexpr double kQuietNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kDefaultPrice = 10.0;
constexpr double kMinQuality = 0.01;

double clip(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw ConfigError(message);
    }
}

double mean_quality(const AgentSpec& agent) {
    double sum = 0.0;
    for (const auto& [good, q] : agent.quality) {
        sum += q;
    }
    return sum / static_cast<double>(agent.quality.size());
}

double rank_or_zero(const RankMap& ranks, ParticipantId id) {
    const auto it = ranks.find(id);
    return it != ranks.end() ? it->second : 0.0;
}

} // namespace

std::string to_string(Strategy strategy) {
    switch (strategy) {
    case Strategy::winner_take_all: return "winner_take_all";
    case Strategy::roulette: return "roulette";
    case Strategy::thresholded_random: return "thresholded_random";
    case Strategy::none: return "none";
    }
    throw std::logic_error("unreachable strategy");
}

Strategy strategy_from_string(const std::string& name) {
    if (name == "winner_take_all") return Strategy::winner_take_all;
    if (name == "roulette") return Strategy::roulette;
    if (name == "thresholded_random") return Strategy::thresholded_random;
    if (name == "none") return Strategy::none;
    throw ConfigError("unknown strategy: " + name);
}

void MarketConfig::validate() const {
    require(n_agents >= 2, "n_agents must be at least 2");
    require(n_goods >= 1, "n_goods must be at least 1");
    require(n_days >= 0, "n_days must be non-negative");
    require(overlap_fraction >= 0.0 && overlap_fraction <= 1.0,
            "overlap_fraction must be in [0,1]");
    require(pure_supplier_share >= 0.0 && pure_supplier_share <= 1.0,
            "pure_supplier_share must be in [0,1]");
    require(scam_supplier_count >= 0 && scam_rater_count >= 0,
            "scam cohort sizes must be non-negative");
    require(scam_supplier_count + scam_rater_count <= n_agents,
            "scam cohort does not fit into n_agents");
    require(target_volume_ratio > 0.0, "target_volume_ratio must be positive");
    require(threshold >= 0.0 && threshold <= 1.0, "threshold must be in [0,1]");
    require(satisfaction_threshold >= 0.0 && satisfaction_threshold <= 1.0,
            "satisfaction_threshold must be in [0,1]");
    require(shopping_probability >= 0.0 && shopping_probability <= 1.0,
            "shopping_probability must be in [0,1]");
    require(prices.empty() || static_cast<int>(prices.size()) == n_goods,
            "prices must be empty or have one entry per good");
    for (const double p : prices) {
        require(p > 0.0, "prices must be positive");
    }
    require(rating_noise_sd >= 0.0, "rating_noise_sd must be non-negative");
    require(quality_sd >= 0.0, "quality_sd must be non-negative");
    require(scam_supplier_quality > 0.0 && scam_supplier_quality <= 1.0,
            "scam_supplier_quality must be in (0,1]");
    try {
        reputation.validate();
    } catch (const std::domain_error& e) {
        throw ConfigError(std::string("reputation params: ") + e.what());
    }
}

double MarketConfig::price_of(int good) const {
    if (good < 0 || good >= n_goods) {
        throw std::domain_error("price_of: good index out of range");
    }
    return prices.empty() ? kDefaultPrice : prices[static_cast<std::size_t>(good)];
}

std::vector<AgentSpec> init_population(const MarketConfig& config, Rng& rng) {
    config.validate();
    const int honest = config.n_agents - config.scam_supplier_count - config.scam_rater_count;
    const int n_both = static_cast<int>(std::lround(config.overlap_fraction * honest));
    const int remainder = honest - n_both;
    const int n_pure_suppliers =
        static_cast<int>(std::lround(config.pure_supplier_share * remainder));
    const int n_pure_consumers = remainder - n_pure_suppliers;

    std::vector<AgentSpec> agents;
    agents.reserve(static_cast<std::size_t>(config.n_agents));
    int supplier_ordinal = 0;

    const auto add_agent = [&](bool consumer, bool supplier, bool is_honest) {
        AgentSpec a;
        a.id = static_cast<ParticipantId>(agents.size());
        a.is_consumer = consumer;
        a.is_supplier = supplier;
        a.honest = is_honest;
        if (supplier) {
            const int good = supplier_ordinal % config.n_goods;
            ++supplier_ordinal;
            const double q =
                is_honest
                    ? clip(rng.normal(config.quality_mean, config.quality_sd), kMinQuality, 1.0)
                    : config.scam_supplier_quality;
            a.quality[good] = q;
        }
        agents.push_back(std::move(a));
    };

    for (int i = 0; i < n_both; ++i) add_agent(true, true, true);
    for (int i = 0; i < n_pure_consumers; ++i) add_agent(true, false, true);
    for (int i = 0; i < n_pure_suppliers; ++i) add_agent(false, true, true);
    for (int i = 0; i < config.scam_rater_count; ++i) add_agent(true, false, false);
    for (int i = 0; i < config.scam_supplier_count; ++i) add_agent(false, true, false);
    return agents;
}

std::vector<int> shopping_list(const AgentSpec& consumer, const MarketConfig& config,
                               Rng& rng) {
    if (!consumer.is_consumer) {
        throw std::domain_error("shopping_list: agent is not a consumer");
    }
    std::vector<int> goods;
    for (int good = 0; good < config.n_goods; ++good) {
        if (rng.bernoulli(config.shopping_probability)) {
            goods.push_back(good);
        }
    }
    return goods;
}

ConsumerMemory drop_unsatisfying_suppliers(ConsumerMemory memory,
                                           const MarketConfig& config) {
    std::erase_if(memory, [&](const auto& entry) {
        return entry.second.last_rating < config.satisfaction_threshold;
    });
    return memory;
}

ParticipantId select_supplier(std::span<const ParticipantId> candidates,
                              const RankMap& ranks, Strategy strategy,
                              double threshold, Rng& rng) {
    if (candidates.empty()) {
        throw std::domain_error("select_supplier: empty candidate list");
    }
    switch (strategy) {
    case Strategy::winner_take_all: {
        ParticipantId best = candidates.front();
        double best_rank = rank_or_zero(ranks, best);
        for (const ParticipantId c : candidates.subspan(1)) {
            const double r = rank_or_zero(ranks, c);
            if (r > best_rank || (r == best_rank && c < best)) {
                best = c;
                best_rank = r;
            }
        }
        return best;
    }
    case Strategy::roulette: {
        double total = 0.0;
        for (const ParticipantId c : candidates) {
            total += rank_or_zero(ranks, c);
        }
        if (!(total > 0.0)) {
            return candidates[rng.uniform_index(candidates.size())];
        }
        const double u = rng.uniform() * total;
        double acc = 0.0;
        ParticipantId last_positive = candidates.front();
        for (const ParticipantId c : candidates) {
            const double r = rank_or_zero(ranks, c);
            if (r <= 0.0) {
                continue;
            }
            acc += r;
            last_positive = c;
            if (u < acc) {
                return c;
            }
        }
        return last_positive; // floating-point edge of the prefix scan
    }
    case Strategy::thresholded_random: {
        std::vector<ParticipantId> qualifying;
        for (const ParticipantId c : candidates) {
            if (rank_or_zero(ranks, c) >= threshold) {
                qualifying.push_back(c);
            }
        }
        if (qualifying.empty()) {
            return candidates[rng.uniform_index(candidates.size())];
        }
        return qualifying[rng.uniform_index(qualifying.size())];
    }
    case Strategy::none:
        return candidates[rng.uniform_index(candidates.size())];
    }
    throw std::logic_error("unreachable strategy");
}

RatedTransaction transact_and_rate(const AgentSpec& consumer, const AgentSpec& supplier,
                                   int good, int day, const MarketConfig& config,
                                   Rng& rng) {
    const auto quality_it = supplier.quality.find(good);
    if (quality_it == supplier.quality.end()) {
        throw std::domain_error("transact_and_rate: supplier does not supply this good");
    }
    RatedTransaction t;
    t.day = day;
    t.rater = consumer.id;
    t.ratee = supplier.id;
    t.good = good;
    t.value = config.price_of(good);
    if (!consumer.honest && !supplier.honest) {
        t.rating = 1.0; // colluding fake review
    } else {
        t.rating = clip(quality_it->second + rng.normal(0.0, config.rating_noise_sd), 0.0, 1.0);
    }
    return t;
}

ScamInjector::ScamInjector(const MarketConfig& config, std::span<const AgentSpec> agents)
    : target_ratio_(config.target_volume_ratio) {
    for (const AgentSpec& a : agents) {
        if (a.honest) {
            continue;
        }
        if (a.is_consumer) {
            raters_.push_back(a.id);
        }
        if (a.is_supplier) {
            for (const auto& [good, q] : a.quality) {
                suppliers_.push_back({a.id, good, config.price_of(good)});
            }
        }
    }
}

std::vector<RatedTransaction> ScamInjector::emit(int day, double cumulative_honest_volume,
                                                 Rng& rng) {
    std::vector<RatedTransaction> fakes;
    if (!active()) {
        return fakes;
    }
    const double budget = cumulative_honest_volume / target_ratio_;
    while (true) {
        const ScamSupplier& s = suppliers_[cursor_];
        if (emitted_volume_ + s.price > budget) {
            break;
        }
        RatedTransaction t;
        t.day = day;
        t.rater = raters_[rng.uniform_index(raters_.size())];
        t.ratee = s.id;
        t.good = s.good;
        t.value = s.price;
        t.rating = 1.0;
        fakes.push_back(t);
        emitted_volume_ += s.price;
        cursor_ = (cursor_ + 1) % suppliers_.size();
    }
    return fakes;
}

MetricsReport compute_metrics(const std::vector<RatedTransaction>& ledger,
                              const std::vector<AgentSpec>& agents,
                              const RankMap& final_ranks) {
    std::set<ParticipantId> honest_consumers;
    std::set<ParticipantId> scam_suppliers;
    for (const AgentSpec& a : agents) {
        if (a.honest && a.is_consumer) {
            honest_consumers.insert(a.id);
        }
        if (!a.honest && a.is_supplier) {
            scam_suppliers.insert(a.id);
        }
    }

    MetricsReport report;

    std::vector<double> honest_ratings;
    std::map<ParticipantId, double> received;
    std::map<ParticipantId, double> spent;
    for (const RatedTransaction& t : ledger) {
        if (!honest_consumers.contains(t.rater)) {
            continue; // fabricated trades stay out of utility and volume accounting
        }
        honest_ratings.push_back(t.rating);
        received[t.ratee] += t.value;
        spent[t.rater] += t.value;
    }
    report.utility = honest_ratings.empty() ? kQuietNan : utility(honest_ratings);
    report.loss_to_scam = loss_to_scam(ledger, scam_suppliers, honest_consumers);

    std::vector<AgentEconomics> economics;
    std::vector<double> xs;
    std::vector<double> ys;
    std::map<int, WeightedSample> per_good;
    for (const AgentSpec& a : agents) {
        if (!a.is_supplier || a.quality.empty()) {
            continue;
        }
        const double rank = rank_or_zero(final_ranks, a.id);
        AgentEconomics econ;
        econ.agent = a.id;
        const auto recv_it = received.find(a.id);
        econ.volume_received = recv_it != received.end() ? recv_it->second : 0.0;
        const auto spent_it = spent.find(a.id);
        econ.volume_spent = spent_it != spent.end() ? spent_it->second : 0.0;
        econ.quality = mean_quality(a);
        econ.reputation = rank;
        economics.push_back(econ);

        for (const auto& [good, q] : a.quality) {
            xs.push_back(rank);
            ys.push_back(q);
            WeightedSample& sample = per_good[good];
            sample.x.push_back(rank);
            sample.y.push_back(q);
            sample.w.push_back(1.0);
        }
    }

    report.inequity = economics.size() >= 2 ? inequity(economics) : kQuietNan;

    const std::vector<double> unit(xs.size(), 1.0);
    const auto overall = try_weighted_pearson({xs, ys, unit});
    report.pccw_overall = overall ? *overall : kQuietNan;
    const auto low = try_weighted_pearson({xs, ys, equity_weights(xs, EquityDirection::low)});
    report.pccw_low_weighted = low ? *low : kQuietNan;
    const auto high = try_weighted_pearson({xs, ys, equity_weights(xs, EquityDirection::high)});
    report.pccw_high_weighted = high ? *high : kQuietNan;

    const PearsonByGood by_good = pearson_by_good(per_good);
    report.pearson_by_good = by_good.coefficients;
    report.pearson_by_good_avg = by_good.average.value_or(kQuietNan);
    return report;
}

SimulationResult run_simulation(const MarketConfig& config_in) {
    MarketConfig config = config_in;
    if (config.prices.empty()) {
        config.prices.assign(static_cast<std::size_t>(config.n_goods), kDefaultPrice);
    }
    config.validate();

    Rng rng(config.seed);
    SimulationResult result;
    result.agents = init_population(config, rng);
    const bool use_reputation = config.strategy != Strategy::none;

    std::vector<std::vector<ParticipantId>> suppliers_of_good(
        static_cast<std::size_t>(config.n_goods));
    std::vector<ParticipantId> shoppers;
    for (const AgentSpec& a : result.agents) {
        if (a.is_supplier) {
            for (const auto& [good, q] : a.quality) {
                suppliers_of_good[static_cast<std::size_t>(good)].push_back(a.id);
            }
        }
        if (a.is_consumer && a.honest) {
            shoppers.push_back(a.id);
        }
    }

    std::vector<ConsumerMemory> memory(static_cast<std::size_t>(config.n_agents));
    // Under strategy none a consumer avoids the supplier it dropped most
    // recently for a good; there is no other information to go on.
    std::vector<std::map<int, ParticipantId>> recently_dropped(
        static_cast<std::size_t>(config.n_agents));

    ScamInjector injector(config, result.agents);
    RankMap ranks;
    double honest_volume = 0.0;
    std::vector<ParticipantId> candidates;

    for (int day = 0; day < config.n_days; ++day) {
        std::vector<RatedTransaction> day_transactions;
        for (const ParticipantId consumer_id : shoppers) {
            const AgentSpec& consumer = result.agents[static_cast<std::size_t>(consumer_id)];
            const std::vector<int> goods = shopping_list(consumer, config, rng);

            ConsumerMemory& mem = memory[static_cast<std::size_t>(consumer_id)];
            ConsumerMemory kept = drop_unsatisfying_suppliers(mem, config);
            if (config.strategy == Strategy::none) {
                for (const auto& [good, binding] : mem) {
                    if (!kept.contains(good)) {
                        recently_dropped[static_cast<std::size_t>(consumer_id)][good] =
                            binding.supplier;
                    }
                }
            }
            mem = std::move(kept);

            for (const int good : goods) {
                ParticipantId supplier_id = 0;
                if (const auto it = mem.find(good); it != mem.end()) {
                    supplier_id = it->second.supplier;
                } else {
                    candidates.clear();
                    const auto& pool = suppliers_of_good[static_cast<std::size_t>(good)];
                    const auto& dropped = recently_dropped[static_cast<std::size_t>(consumer_id)];
                    const auto dropped_it = dropped.find(good);
                    const ParticipantId avoided =
                        dropped_it != dropped.end() ? dropped_it->second : -1;
                    for (const ParticipantId c : pool) {
                        if (c != consumer_id && c != avoided) {
                            candidates.push_back(c);
                        }
                    }
                    if (candidates.empty() && avoided >= 0) {
                        for (const ParticipantId c : pool) {
                            if (c != consumer_id) {
                                candidates.push_back(c);
                            }
                        }
                    }
                    if (candidates.empty()) {
                        continue; // nobody else sells this good
                    }
                    supplier_id = select_supplier(candidates, ranks, config.strategy,
                                                  config.threshold, rng);
                }
                const AgentSpec& supplier = result.agents[static_cast<std::size_t>(supplier_id)];
                const RatedTransaction t =
                    transact_and_rate(consumer, supplier, good, day, config, rng);
                day_transactions.push_back(t);
                mem[good] = SupplierBinding{supplier_id, t.rating};
                honest_volume += t.value;
            }
        }

        const std::vector<RatedTransaction> fakes = injector.emit(day, honest_volume, rng);
        day_transactions.insert(day_transactions.end(), fakes.begin(), fakes.end());

        if (use_reputation) {
            ranks = update_ranks(day_transactions, ranks, config.reputation);
            result.rank_history.push_back(ranks);
        }
        result.ledger.insert(result.ledger.end(), day_transactions.begin(),
                             day_transactions.end());
    }

    const RankMap final_ranks =
        result.rank_history.empty() ? RankMap{} : result.rank_history.back();
    int supplier_count = 0;
    for (const AgentSpec& a : result.agents) {
        supplier_count += a.is_supplier ? 1 : 0;
    }
    if (!result.ledger.empty() && supplier_count >= 2) {
        result.metrics = compute_metrics(result.ledger, result.agents, final_ranks);
    }
    return result;
}

} // namespace liquidrank
