#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "liquidrank/simulator.hpp"

namespace liquidrank {

/// Run description persisted next to the artifacts: the market config plus
/// run metadata. Round-trips exactly through render/parse.
struct ExperimentConfig {
    std::string run_id = "run";
    int repetitions = 1;
    std::string out_dir = "runs";
    MarketConfig market;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// JSON text for the config; stable key order, shortest round-trip numbers.
std::string render_config(const ExperimentConfig& config);

/// Parses JSON produced by render_config (or written by hand). Missing keys
/// take defaults; unknown keys are ConfigErrors.
ExperimentConfig parse_config(const std::string& json_text);

ExperimentConfig load_config_file(const std::filesystem::path& path);

/// JSON Lines ledger, one transaction per line with fields day, rater, ratee,
/// good, value, rating, rater_honest, ratee_honest in that order.
void write_transactions(std::span<const RatedTransaction> ledger,
                        std::span<const AgentSpec> agents,
                        const std::filesystem::path& path);

/// Reads a JSON Lines ledger back; the honesty flags are ignored here (they
/// are derivable from the agents file). Malformed lines raise ConfigError
/// naming the line number.
std::vector<RatedTransaction> read_transactions(const std::filesystem::path& path);

/// CSV with header day,agent_id,rank; ranks printed with 9 decimal digits.
void write_rank_history(std::span<const RankMap> history,
                        const std::filesystem::path& path);

std::vector<RankMap> read_rank_history(const std::filesystem::path& path);

/// JSON Lines agent roster: id, is_consumer, is_supplier, honest, quality.
void write_agents(std::span<const AgentSpec> agents, const std::filesystem::path& path);

std::vector<AgentSpec> read_agents(const std::filesystem::path& path);

/// One metrics.csv row: run metadata plus the report.
struct RunRow {
    std::string run_id;
    std::uint64_t seed = 0;
    Strategy strategy = Strategy::none;
    double overlap = 0.0;
    MetricsReport metrics;
};

/// Columns: run_id, seed, strategy, overlap, utility, inequity, pccw_overall,
/// pccw_low, pccw_high, pearson_by_good_avg, loss_to_scam.
void write_metrics_csv(std::span<const RunRow> rows, const std::filesystem::path& path);

std::string render_metrics_csv(std::span<const RunRow> rows);

/// Self-contained SVG scatter of supplier reputation (x) against true quality
/// (y) for one good, axes [0,1]x[0,1]. Scam suppliers are drawn as red
/// crosses; the per-good Pearson coefficient goes into the title when defined.
/// Throws std::domain_error when no supplier carries the good.
std::string plot_reputation_vs_quality(const RankMap& final_ranks,
                                       std::span<const AgentSpec> agents, int good);

struct ArtifactOptions {
    bool transactions = true;
    bool ranks = true;
    bool agents = true;
    bool metrics = true;
    bool plots = true;
};

/// Writes <out_dir>/<run_id>/{config.resolved, transactions.jsonl, ranks.csv,
/// agents.jsonl, metrics.csv, plots/good_<k>.svg}. Returns the run directory.
std::filesystem::path write_run_artifacts(const ExperimentConfig& config,
                                          const SimulationResult& result,
                                          const ArtifactOptions& options = {});

} // namespace liquidrank
