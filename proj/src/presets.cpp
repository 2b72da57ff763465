#include "liquidrank/presets.hpp"

namespace liquidrank {

namespace {

// Shared base for both experiments: a thousand agents, ten goods, six months,
// and a scam cohort throttled to a 50:1 honest:scam volume ratio. The fake
// volume is split across many colluding suppliers, which keeps each one's
// pumped rating flow below that of a typical honest supplier.
MarketConfig base_market() {
    MarketConfig m;
    m.n_agents = 1000;
    m.n_goods = 10;
    m.n_days = 183;
    m.scam_supplier_count = 35;
    m.scam_rater_count = 50;
    m.scam_supplier_quality = 0.05;
    m.target_volume_ratio = 50.0;
    m.shopping_probability = 0.3;
    m.rating_noise_sd = 0.1;
    m.quality_mean = 0.6;
    m.quality_sd = 0.2;
    // A small default rank makes cold-start ranks track the first observed
    // ratings quickly, which is what separates scam suppliers early.
    m.reputation.default_rank = 0.1;
    m.reputation.conservatism = 0.6;
    m.reputation.logarithmic_ratings = true;
    m.reputation.decay_value = 0.1;
    m.seed = 1;
    return m;
}

} // namespace

MarketConfig preset_market(const std::string& name) {
    if (name == "experiment1") {
        // Consumer marketplace: no consumer/supplier overlap, far more buyers
        // than sellers, and loyal customers (low satisfaction threshold).
        // Consumers pick uniformly among suppliers above a reputation floor.
        MarketConfig m = base_market();
        m.overlap_fraction = 0.0;
        m.pure_supplier_share = 0.12;
        m.strategy = Strategy::thresholded_random;
        m.threshold = 0.25;
        m.satisfaction_threshold = 0.2;
        return m;
    }
    if (name == "experiment2-wta" || name == "experiment2-roulette") {
        // B2B-style market: ninety percent of honest agents both buy and
        // sell, and buyers drop suppliers that fall short of a strict bar.
        MarketConfig m = base_market();
        m.overlap_fraction = 0.9;
        m.pure_supplier_share = 0.5;
        m.satisfaction_threshold = 0.5;
        m.strategy = name == "experiment2-wta" ? Strategy::winner_take_all
                                               : Strategy::roulette;
        return m;
    }
    throw ConfigError("unknown preset: " + name +
                      " (expected experiment1, experiment2-wta or experiment2-roulette)");
}

std::vector<std::string> preset_names() {
    return {"experiment1", "experiment2-wta", "experiment2-roulette"};
}

} // namespace liquidrank
