#include "liquidrank/experiment_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace liquidrank {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string format_fixed(double value, int decimals) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
    return buffer;
}

std::string format_metric(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.6g", value);
    return buffer;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    return out;
}

// Missing or unreadable inputs are configuration mistakes (the caller named
// the path); only write failures count as I/O errors.
std::ifstream open_for_read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open for reading: " + path.string());
    }
    return in;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out.good()) {
        throw IoError("write failed: " + path.string());
    }
}

void check_keys(const ordered_json& j, std::initializer_list<const char*> allowed,
                const std::string& context) {
    for (const auto& [key, value] : j.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
                return key == a;
            }) == allowed.end()) {
            throw ConfigError("unknown key '" + key + "' in " + context);
        }
    }
}

ordered_json reputation_to_json(const ReputationParams& p) {
    ordered_json j;
    j["default_rank"] = p.default_rank;
    j["conservatism"] = p.conservatism;
    j["logarithmic_ratings"] = p.logarithmic_ratings;
    j["decay_value"] = p.decay_value;
    return j;
}

ReputationParams reputation_from_json(const ordered_json& j) {
    check_keys(j, {"default_rank", "conservatism", "logarithmic_ratings", "decay_value"},
               "reputation");
    ReputationParams p;
    if (j.contains("default_rank")) j.at("default_rank").get_to(p.default_rank);
    if (j.contains("conservatism")) j.at("conservatism").get_to(p.conservatism);
    if (j.contains("logarithmic_ratings"))
        j.at("logarithmic_ratings").get_to(p.logarithmic_ratings);
    if (j.contains("decay_value")) j.at("decay_value").get_to(p.decay_value);
    return p;
}

ordered_json market_to_json(const MarketConfig& m) {
    ordered_json j;
    j["n_agents"] = m.n_agents;
    j["n_goods"] = m.n_goods;
    j["n_days"] = m.n_days;
    j["overlap_fraction"] = m.overlap_fraction;
    j["pure_supplier_share"] = m.pure_supplier_share;
    j["scam_supplier_count"] = m.scam_supplier_count;
    j["scam_rater_count"] = m.scam_rater_count;
    j["scam_supplier_quality"] = m.scam_supplier_quality;
    j["target_volume_ratio"] = m.target_volume_ratio;
    j["strategy"] = to_string(m.strategy);
    j["threshold"] = m.threshold;
    j["satisfaction_threshold"] = m.satisfaction_threshold;
    j["shopping_probability"] = m.shopping_probability;
    j["prices"] = m.prices;
    j["rating_noise_sd"] = m.rating_noise_sd;
    j["quality_mean"] = m.quality_mean;
    j["quality_sd"] = m.quality_sd;
    j["reputation"] = reputation_to_json(m.reputation);
    j["seed"] = m.seed;
    return j;
}

MarketConfig market_from_json(const ordered_json& j) {
    check_keys(j,
               {"n_agents", "n_goods", "n_days", "overlap_fraction", "pure_supplier_share",
                "scam_supplier_count", "scam_rater_count", "scam_supplier_quality",
                "target_volume_ratio", "strategy", "threshold", "satisfaction_threshold",
                "shopping_probability", "prices", "rating_noise_sd", "quality_mean",
                "quality_sd", "reputation", "seed"},
               "market");
    MarketConfig m;
    if (j.contains("n_agents")) j.at("n_agents").get_to(m.n_agents);
    if (j.contains("n_goods")) j.at("n_goods").get_to(m.n_goods);
    if (j.contains("n_days")) j.at("n_days").get_to(m.n_days);
    if (j.contains("overlap_fraction")) j.at("overlap_fraction").get_to(m.overlap_fraction);
    if (j.contains("pure_supplier_share"))
        j.at("pure_supplier_share").get_to(m.pure_supplier_share);
    if (j.contains("scam_supplier_count"))
        j.at("scam_supplier_count").get_to(m.scam_supplier_count);
    if (j.contains("scam_rater_count")) j.at("scam_rater_count").get_to(m.scam_rater_count);
    if (j.contains("scam_supplier_quality"))
        j.at("scam_supplier_quality").get_to(m.scam_supplier_quality);
    if (j.contains("target_volume_ratio"))
        j.at("target_volume_ratio").get_to(m.target_volume_ratio);
    if (j.contains("strategy")) m.strategy = strategy_from_string(j.at("strategy"));
    if (j.contains("threshold")) j.at("threshold").get_to(m.threshold);
    if (j.contains("satisfaction_threshold"))
        j.at("satisfaction_threshold").get_to(m.satisfaction_threshold);
    if (j.contains("shopping_probability"))
        j.at("shopping_probability").get_to(m.shopping_probability);
    if (j.contains("prices")) {
        const auto& prices = j.at("prices");
        if (prices.is_number()) {
            m.prices.assign(static_cast<std::size_t>(m.n_goods), prices.get<double>());
        } else {
            prices.get_to(m.prices);
        }
    }
    if (j.contains("rating_noise_sd")) j.at("rating_noise_sd").get_to(m.rating_noise_sd);
    if (j.contains("quality_mean")) j.at("quality_mean").get_to(m.quality_mean);
    if (j.contains("quality_sd")) j.at("quality_sd").get_to(m.quality_sd);
    if (j.contains("reputation")) m.reputation = reputation_from_json(j.at("reputation"));
    if (j.contains("seed")) j.at("seed").get_to(m.seed);
    return m;
}

} // namespace

std::string render_config(const ExperimentConfig& config) {
    ordered_json j;
    j["run_id"] = config.run_id;
    j["repetitions"] = config.repetitions;
    j["out_dir"] = config.out_dir;
    j["market"] = market_to_json(config.market);
    return j.dump(2) + "\n";
}

ExperimentConfig parse_config(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const ordered_json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    try {
        check_keys(j, {"run_id", "repetitions", "out_dir", "market"}, "config");
        ExperimentConfig config;
        if (j.contains("run_id")) j.at("run_id").get_to(config.run_id);
        if (j.contains("repetitions")) j.at("repetitions").get_to(config.repetitions);
        if (j.contains("out_dir")) j.at("out_dir").get_to(config.out_dir);
        if (j.contains("market")) config.market = market_from_json(j.at("market"));
        return config;
    } catch (const ordered_json::exception& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    }
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file: " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

void write_transactions(std::span<const RatedTransaction> ledger,
                        std::span<const AgentSpec> agents,
                        const std::filesystem::path& path) {
    std::map<ParticipantId, bool> honest;
    for (const AgentSpec& a : agents) {
        honest[a.id] = a.honest;
    }
    auto out = open_for_write(path);
    for (const RatedTransaction& t : ledger) {
        ordered_json j;
        j["day"] = t.day;
        j["rater"] = t.rater;
        j["ratee"] = t.ratee;
        j["good"] = t.good;
        j["value"] = t.value;
        j["rating"] = t.rating;
        const auto rater_it = honest.find(t.rater);
        const auto ratee_it = honest.find(t.ratee);
        j["rater_honest"] = rater_it != honest.end() ? rater_it->second : true;
        j["ratee_honest"] = ratee_it != honest.end() ? ratee_it->second : true;
        out << j.dump() << '\n';
    }
    finish_write(out, path);
}

std::vector<RatedTransaction> read_transactions(const std::filesystem::path& path) {
    auto in = open_for_read(path);
    std::vector<RatedTransaction> ledger;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) {
            continue;
        }
        try {
            const ordered_json j = ordered_json::parse(line);
            RatedTransaction t;
            j.at("day").get_to(t.day);
            j.at("rater").get_to(t.rater);
            j.at("ratee").get_to(t.ratee);
            j.at("good").get_to(t.good);
            j.at("value").get_to(t.value);
            j.at("rating").get_to(t.rating);
            if (!(t.value > 0.0) || !(t.rating >= 0.0 && t.rating <= 1.0) ||
                t.rater == t.ratee) {
                throw ConfigError("transactions line " + std::to_string(line_number) +
                                  ": invalid record (value must be > 0, rating in [0,1], "
                                  "rater != ratee)");
            }
            ledger.push_back(t);
        } catch (const ordered_json::exception& e) {
            throw ConfigError("transactions line " + std::to_string(line_number) + ": " +
                              e.what());
        }
    }
    return ledger;
}

void write_rank_history(std::span<const RankMap> history,
                        const std::filesystem::path& path) {
    auto out = open_for_write(path);
    out << "day,agent_id,rank\n";
    for (std::size_t day = 0; day < history.size(); ++day) {
        for (const auto& [id, rank] : history[day]) {
            out << day << ',' << id << ',' << format_fixed(rank, 9) << '\n';
        }
    }
    finish_write(out, path);
}

std::vector<RankMap> read_rank_history(const std::filesystem::path& path) {
    auto in = open_for_read(path);
    std::vector<RankMap> history;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line_number == 1 || line.empty()) {
            continue; // header
        }
        std::size_t day = 0;
        ParticipantId id = 0;
        double rank = 0.0;
        char scratch = 0;
        std::istringstream row(line);
        if (!(row >> day >> scratch >> id >> scratch >> rank)) {
            throw ConfigError("ranks line " + std::to_string(line_number) +
                              ": malformed row");
        }
        if (history.size() <= day) {
            history.resize(day + 1);
        }
        history[day][id] = rank;
    }
    return history;
}

void write_agents(std::span<const AgentSpec> agents, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    for (const AgentSpec& a : agents) {
        ordered_json j;
        j["id"] = a.id;
        j["is_consumer"] = a.is_consumer;
        j["is_supplier"] = a.is_supplier;
        j["honest"] = a.honest;
        ordered_json quality = ordered_json::object();
        for (const auto& [good, q] : a.quality) {
            quality[std::to_string(good)] = q;
        }
        j["quality"] = quality;
        out << j.dump() << '\n';
    }
    finish_write(out, path);
}

std::vector<AgentSpec> read_agents(const std::filesystem::path& path) {
    auto in = open_for_read(path);
    std::vector<AgentSpec> agents;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) {
            continue;
        }
        try {
            const ordered_json j = ordered_json::parse(line);
            AgentSpec a;
            j.at("id").get_to(a.id);
            j.at("is_consumer").get_to(a.is_consumer);
            j.at("is_supplier").get_to(a.is_supplier);
            j.at("honest").get_to(a.honest);
            for (const auto& [key, value] : j.at("quality").items()) {
                a.quality[std::stoi(key)] = value.get<double>();
            }
            agents.push_back(std::move(a));
        } catch (const ordered_json::exception& e) {
            throw ConfigError("agents line " + std::to_string(line_number) + ": " + e.what());
        }
    }
    return agents;
}

std::string render_metrics_csv(std::span<const RunRow> rows) {
    std::string text = "run_id,seed,strategy,overlap,utility,inequity,pccw_overall,"
                       "pccw_low,pccw_high,pearson_by_good_avg,loss_to_scam\n";
    for (const RunRow& row : rows) {
        text += row.run_id;
        text += ',' + std::to_string(row.seed);
        text += ',' + to_string(row.strategy);
        text += ',' + format_metric(row.overlap);
        text += ',' + format_metric(row.metrics.utility);
        text += ',' + format_metric(row.metrics.inequity);
        text += ',' + format_metric(row.metrics.pccw_overall);
        text += ',' + format_metric(row.metrics.pccw_low_weighted);
        text += ',' + format_metric(row.metrics.pccw_high_weighted);
        text += ',' + format_metric(row.metrics.pearson_by_good_avg);
        text += ',' + format_metric(row.metrics.loss_to_scam);
        text += '\n';
    }
    return text;
}

void write_metrics_csv(std::span<const RunRow> rows, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    out << render_metrics_csv(rows);
    finish_write(out, path);
}

std::string plot_reputation_vs_quality(const RankMap& final_ranks,
                                       std::span<const AgentSpec> agents, int good) {
    struct Point {
        double rank;
        double quality;
        bool honest;
    };
    std::vector<Point> points;
    for (const AgentSpec& a : agents) {
        if (!a.is_supplier) {
            continue;
        }
        const auto q_it = a.quality.find(good);
        if (q_it == a.quality.end()) {
            continue;
        }
        const auto rank_it = final_ranks.find(a.id);
        const double rank = rank_it != final_ranks.end() ? rank_it->second : 0.0;
        points.push_back({rank, q_it->second, a.honest});
    }
    if (points.empty()) {
        throw std::domain_error("plot_reputation_vs_quality: no supplier of good " +
                                std::to_string(good));
    }

    WeightedSample sample;
    for (const Point& p : points) {
        sample.x.push_back(p.rank);
        sample.y.push_back(p.quality);
        sample.w.push_back(1.0);
    }
    const auto pearson = try_weighted_pearson(sample);

    // 400x400 plot area, origin at (60,40); y axis points up.
    const auto px = [](double rank) { return 60.0 + rank * 400.0; };
    const auto py = [](double quality) { return 40.0 + (1.0 - quality) * 400.0; };

    std::string title = "good " + std::to_string(good);
    title += pearson ? " (r=" + format_fixed(*pearson, 4) + ", " : " (r undefined, ";
    title += std::to_string(points.size()) + " suppliers)";

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"520\" height=\"520\" "
           "viewBox=\"0 0 520 520\">\n";
    svg += "<title>" + title + "</title>\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"520\" height=\"520\" fill=\"white\"/>\n";
    svg += "<text x=\"260\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" + title + "</text>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double f = tick / 4.0;
        const std::string x = format_fixed(px(f), 2);
        const std::string y = format_fixed(py(f), 2);
        const std::string label = format_fixed(f, 2);
        svg += "<line x1=\"" + x + "\" y1=\"40\" x2=\"" + x +
               "\" y2=\"440\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
        svg += "<line x1=\"60\" y1=\"" + y + "\" x2=\"460\" y2=\"" + y +
               "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + x + "\" y=\"458\" text-anchor=\"middle\" "
               "font-family=\"sans-serif\" font-size=\"12\">" + label + "</text>\n";
        svg += "<text x=\"52\" y=\"" + format_fixed(py(f) + 4.0, 2) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
               label + "</text>\n";
    }
    svg += "<rect x=\"60\" y=\"40\" width=\"400\" height=\"400\" fill=\"none\" "
           "stroke=\"#333\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"260\" y=\"492\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"14\">reputation score</text>\n";
    svg += "<text x=\"16\" y=\"240\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"14\" transform=\"rotate(-90 16 240)\">actual quality</text>\n";
    for (const Point& p : points) {
        const std::string x = format_fixed(px(p.rank), 2);
        const std::string y = format_fixed(py(p.quality), 2);
        if (p.honest) {
            svg += "<circle cx=\"" + x + "\" cy=\"" + y +
                   "\" r=\"4\" fill=\"#3b6fa0\" fill-opacity=\"0.8\"/>\n";
        } else {
            const double cx = px(p.rank);
            const double cy = py(p.quality);
            svg += "<path d=\"M " + format_fixed(cx - 5.0, 2) + ' ' +
                   format_fixed(cy - 5.0, 2) + " L " + format_fixed(cx + 5.0, 2) + ' ' +
                   format_fixed(cy + 5.0, 2) + " M " + format_fixed(cx - 5.0, 2) + ' ' +
                   format_fixed(cy + 5.0, 2) + " L " + format_fixed(cx + 5.0, 2) + ' ' +
                   format_fixed(cy - 5.0, 2) +
                   "\" stroke=\"#c0392b\" stroke-width=\"2.5\"/>\n";
        }
    }
    svg += "</svg>\n";
    return svg;
}

std::filesystem::path write_run_artifacts(const ExperimentConfig& config,
                                          const SimulationResult& result,
                                          const ArtifactOptions& options) {
    ExperimentConfig resolved = config;
    if (resolved.market.prices.empty()) {
        resolved.market.prices.assign(static_cast<std::size_t>(resolved.market.n_goods), 10.0);
    }

    const std::filesystem::path run_dir =
        std::filesystem::path(resolved.out_dir) / resolved.run_id;
    std::error_code ec;
    std::filesystem::create_directories(run_dir, ec);
    if (ec) {
        throw IoError("cannot create run directory: " + run_dir.string());
    }

    {
        auto out = open_for_write(run_dir / "config.resolved");
        out << render_config(resolved);
        finish_write(out, run_dir / "config.resolved");
    }
    if (options.transactions) {
        write_transactions(result.ledger, result.agents, run_dir / "transactions.jsonl");
    }
    if (options.ranks) {
        write_rank_history(result.rank_history, run_dir / "ranks.csv");
    }
    if (options.agents) {
        write_agents(result.agents, run_dir / "agents.jsonl");
    }
    if (options.metrics && result.metrics) {
        const RunRow row{resolved.run_id, resolved.market.seed, resolved.market.strategy,
                         resolved.market.overlap_fraction, *result.metrics};
        write_metrics_csv(std::span<const RunRow>(&row, 1), run_dir / "metrics.csv");
    }
    if (options.plots) {
        const std::filesystem::path plot_dir = run_dir / "plots";
        std::filesystem::create_directories(plot_dir, ec);
        if (ec) {
            throw IoError("cannot create plot directory: " + plot_dir.string());
        }
        const RankMap final_ranks =
            result.rank_history.empty() ? RankMap{} : result.rank_history.back();
        for (int good = 0; good < resolved.market.n_goods; ++good) {
            const bool has_supplier =
                std::any_of(result.agents.begin(), result.agents.end(), [&](const AgentSpec& a) {
                    return a.is_supplier && a.quality.contains(good);
                });
            if (!has_supplier) {
                continue;
            }
            const std::string svg =
                plot_reputation_vs_quality(final_ranks, result.agents, good);
            const std::filesystem::path plot_path =
                plot_dir / ("good_" + std::to_string(good) + ".svg");
            auto out = open_for_write(plot_path);
            out << svg;
            finish_write(out, plot_path);
        }
    }
    return run_dir;
}

} // namespace liquidrank
