// liquidrank CLI: simulate | rank | metrics | compare | plot
//
// Exit codes: 0 success, 2 usage or configuration error, 3 I/O error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "liquidrank/experiment_io.hpp"
#include "liquidrank/presets.hpp"

using namespace liquidrank;
namespace fs = std::filesystem;

namespace {

std::string default_out_dir() {
    const char* env = std::getenv("LIQUIDRANK_OUT");
    return env != nullptr && *env != '\0' ? env : "runs";
}

std::string format_rank(double rank) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.9f", rank);
    return buffer;
}

struct SimulateArgs {
    std::string preset;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir; // empty: config file's out_dir, else $LIQUIDRANK_OUT, else ./runs
    std::string run_id;
    bool skip_transactions = false;
};

ExperimentConfig resolve_experiment(const std::string& preset, const std::string& config_path,
                                    const std::optional<std::uint64_t>& seed,
                                    const std::string& out_dir, const std::string& run_id) {
    ExperimentConfig config;
    if (!config_path.empty()) {
        config = load_config_file(config_path);
    } else if (!preset.empty()) {
        config.market = preset_market(preset);
        config.run_id = preset;
        config.out_dir = default_out_dir();
    } else {
        throw ConfigError("either --preset or --config is required");
    }
    if (seed) {
        config.market.seed = *seed;
    }
    if (!out_dir.empty()) {
        config.out_dir = out_dir;
    }
    if (!run_id.empty()) {
        config.run_id = run_id;
    } else if (config_path.empty()) {
        config.run_id = preset + "-s" + std::to_string(config.market.seed);
    }
    return config;
}

int cmd_simulate(const SimulateArgs& args) {
    const ExperimentConfig config = resolve_experiment(args.preset, args.config_path,
                                                       args.seed, args.out_dir, args.run_id);
    config.market.validate();
    const SimulationResult result = run_simulation(config.market);
    ArtifactOptions options;
    options.transactions = !args.skip_transactions;
    const fs::path run_dir = write_run_artifacts(config, result, options);
    std::cout << "wrote " << run_dir.string() << '\n';
    if (result.metrics) {
        const RunRow row{config.run_id, config.market.seed, config.market.strategy,
                         config.market.overlap_fraction, *result.metrics};
        std::cout << render_metrics_csv(std::span<const RunRow>(&row, 1));
    }
    return 0;
}

struct RankArgs {
    std::string transactions_path;
    std::string prev_ranks_path;
    ReputationParams params;
};

RankMap read_prev_ranks(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open prev-ranks file: " + path.string());
    }
    RankMap ranks;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty() || (line_number == 1 && line.rfind("agent_id", 0) == 0)) {
            continue;
        }
        std::istringstream row(line);
        ParticipantId id = 0;
        double rank = 0.0;
        char comma = 0;
        if (!(row >> id >> comma >> rank) || comma != ',') {
            throw ConfigError("prev-ranks line " + std::to_string(line_number) +
                              ": malformed row");
        }
        ranks[id] = rank;
    }
    return ranks;
}

int cmd_rank(const RankArgs& args) {
    const std::vector<RatedTransaction> ledger = read_transactions(args.transactions_path);
    RankMap ranks;
    if (!args.prev_ranks_path.empty()) {
        ranks = read_prev_ranks(args.prev_ranks_path);
    }
    std::map<int, std::vector<RatedTransaction>> by_day;
    for (const RatedTransaction& t : ledger) {
        by_day[t.day].push_back(t);
    }
    for (const auto& [day, transactions] : by_day) {
        ranks = update_ranks(transactions, ranks, args.params);
    }
    std::cout << "agent_id,rank\n";
    for (const auto& [id, rank] : ranks) {
        std::cout << id << ',' << format_rank(rank) << '\n';
    }
    return 0;
}

struct RunDirData {
    ExperimentConfig config;
    std::vector<RatedTransaction> ledger;
    std::vector<AgentSpec> agents;
    RankMap final_ranks;
};

RunDirData load_run_dir(const fs::path& run_dir) {
    if (!fs::exists(run_dir / "config.resolved")) {
        throw ConfigError("not a run directory (missing config.resolved): " +
                          run_dir.string());
    }
    RunDirData data;
    std::ifstream in(run_dir / "config.resolved", std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    data.config = parse_config(text.str());
    data.ledger = read_transactions(run_dir / "transactions.jsonl");
    data.agents = read_agents(run_dir / "agents.jsonl");
    const auto history = read_rank_history(run_dir / "ranks.csv");
    if (!history.empty()) {
        data.final_ranks = history.back();
    }
    return data;
}

int cmd_metrics(const std::string& run_dir_arg) {
    const fs::path run_dir(run_dir_arg);
    const RunDirData data = load_run_dir(run_dir);
    const MetricsReport report = compute_metrics(data.ledger, data.agents, data.final_ranks);
    const RunRow row{data.config.run_id, data.config.market.seed,
                     data.config.market.strategy, data.config.market.overlap_fraction,
                     report};
    write_metrics_csv(std::span<const RunRow>(&row, 1), run_dir / "metrics.csv");
    std::cout << render_metrics_csv(std::span<const RunRow>(&row, 1));
    return 0;
}

int cmd_plot(const std::string& run_dir_arg) {
    const fs::path run_dir(run_dir_arg);
    const RunDirData data = load_run_dir(run_dir);
    const fs::path plot_dir = run_dir / "plots";
    std::error_code ec;
    fs::create_directories(plot_dir, ec);
    if (ec) {
        throw IoError("cannot create plot directory: " + plot_dir.string());
    }
    int written = 0;
    for (int good = 0; good < data.config.market.n_goods; ++good) {
        const bool has_supplier =
            std::any_of(data.agents.begin(), data.agents.end(), [&](const AgentSpec& a) {
                return a.is_supplier && a.quality.contains(good);
            });
        if (!has_supplier) {
            continue;
        }
        const std::string svg = plot_reputation_vs_quality(data.final_ranks, data.agents, good);
        std::ofstream out(plot_dir / ("good_" + std::to_string(good) + ".svg"),
                          std::ios::binary);
        if (!out) {
            throw IoError("cannot write plot for good " + std::to_string(good));
        }
        out << svg;
        ++written;
    }
    std::cout << "wrote " << written << " plots under " << plot_dir.string() << '\n';
    return 0;
}

struct CompareArgs {
    std::string preset_a;
    std::string preset_b;
    std::string config_a;
    std::string config_b;
    int runs = 20;
    std::uint64_t seed_base = 1;
    std::string out_dir = default_out_dir();
    unsigned jobs = 0;
    bool full_artifacts = false;
};

struct PresetStats {
    double utility_mean = 0.0;
    double utility_sd = 0.0;
    double inequity_mean = 0.0;
    double inequity_sd = 0.0;
};

PresetStats stats_of(const std::vector<RunRow>& rows) {
    PresetStats s;
    const double n = static_cast<double>(rows.size());
    for (const RunRow& r : rows) {
        s.utility_mean += r.metrics.utility;
        s.inequity_mean += r.metrics.inequity;
    }
    s.utility_mean /= n;
    s.inequity_mean /= n;
    for (const RunRow& r : rows) {
        s.utility_sd += (r.metrics.utility - s.utility_mean) * (r.metrics.utility - s.utility_mean);
        s.inequity_sd +=
            (r.metrics.inequity - s.inequity_mean) * (r.metrics.inequity - s.inequity_mean);
    }
    s.utility_sd = std::sqrt(s.utility_sd / (n - 1.0));
    s.inequity_sd = std::sqrt(s.inequity_sd / (n - 1.0));
    return s;
}

int cmd_compare(const CompareArgs& args) {
    if (args.runs < 2) {
        throw ConfigError("--runs must be at least 2");
    }
    struct Side {
        std::string label;
        MarketConfig market;
    };
    const auto make_side = [](const std::string& preset, const std::string& config_path,
                              const char* which) {
        if (!config_path.empty()) {
            const ExperimentConfig c = load_config_file(config_path);
            const std::string label = c.run_id != "run" ? c.run_id : std::string(which);
            return Side{label, c.market};
        }
        if (preset.empty()) {
            throw ConfigError(std::string("--preset-") + which + " or --config-" + which +
                              " is required");
        }
        return Side{preset, preset_market(preset)};
    };
    const Side side_a = make_side(args.preset_a, args.config_a, "a");
    const Side side_b = make_side(args.preset_b, args.config_b, "b");

    const fs::path out_dir(args.out_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory: " + out_dir.string());
    }

    struct Job {
        Side side;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const Side& side : {side_a, side_b}) {
        for (int i = 0; i < args.runs; ++i) {
            jobs.push_back({side, args.seed_base + static_cast<std::uint64_t>(i)});
        }
    }

    std::vector<RunRow> rows(jobs.size());
    const unsigned workers =
        args.jobs > 0 ? args.jobs
                      : std::max(1u, std::min(std::thread::hardware_concurrency(),
                                              static_cast<unsigned>(jobs.size())));
    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        while (true) {
            const std::size_t index = next.fetch_add(1);
            if (index >= jobs.size()) {
                return;
            }
            const Job& job = jobs[index];
            ExperimentConfig config;
            config.market = job.side.market;
            config.market.seed = job.seed;
            config.run_id = job.side.label + "-s" + std::to_string(job.seed);
            config.out_dir = out_dir.string();
            const SimulationResult result = run_simulation(config.market);
            ArtifactOptions options;
            options.transactions = args.full_artifacts;
            options.ranks = args.full_artifacts;
            options.metrics = false; // rows land in the comparison CSV instead
            write_run_artifacts(config, result, options);
            if (!result.metrics) {
                throw std::runtime_error("run produced no metrics: " + config.run_id);
            }
            rows[index] = RunRow{config.run_id, job.seed, config.market.strategy,
                                 config.market.overlap_fraction, *result.metrics};
        }
    };
    std::vector<std::future<void>> futures;
    for (unsigned i = 1; i < workers; ++i) {
        futures.push_back(std::async(std::launch::async, worker));
    }
    worker();
    for (auto& f : futures) {
        f.get();
    }

    write_metrics_csv(rows, out_dir / "comparison.csv");

    const std::vector<RunRow> rows_a(rows.begin(), rows.begin() + args.runs);
    const std::vector<RunRow> rows_b(rows.begin() + args.runs, rows.end());
    std::vector<double> utility_a, utility_b, inequity_a, inequity_b;
    for (const RunRow& r : rows_a) {
        utility_a.push_back(r.metrics.utility);
        inequity_a.push_back(r.metrics.inequity);
    }
    for (const RunRow& r : rows_b) {
        utility_b.push_back(r.metrics.utility);
        inequity_b.push_back(r.metrics.inequity);
    }
    const PresetStats stats_a = stats_of(rows_a);
    const PresetStats stats_b = stats_of(rows_b);
    const SignificanceResult utility_test = significance_test(utility_b, utility_a);
    const SignificanceResult inequity_test = significance_test(inequity_b, inequity_a);

    std::ostringstream summary;
    summary.precision(6);
    summary << "runs per side: " << args.runs << ", seeds " << args.seed_base << ".."
            << args.seed_base + static_cast<std::uint64_t>(args.runs) - 1 << '\n';
    const auto describe = [&summary](const std::string& label, const PresetStats& s) {
        summary << label << ": utility mean=" << s.utility_mean << " sd=" << s.utility_sd
                << ", inequity mean=" << s.inequity_mean << " sd=" << s.inequity_sd << '\n';
    };
    describe(side_a.label, stats_a);
    describe(side_b.label, stats_b);
    const auto verdict = [&summary, &side_a, &side_b](const std::string& metric,
                                                      const SignificanceResult& test,
                                                      double mean_a, double mean_b) {
        summary << metric << ": " << side_b.label << " - " << side_a.label << " = "
                << mean_b - mean_a << ", Welch p=" << test.p_value << " -> "
                << (test.significant_at_99 ? "significant at 99%"
                                           : "not significant at 99%")
                << '\n';
    };
    verdict("utility", utility_test, stats_a.utility_mean, stats_b.utility_mean);
    verdict("inequity", inequity_test, stats_a.inequity_mean, stats_b.inequity_mean);

    std::ofstream summary_file(out_dir / "summary.txt", std::ios::binary);
    if (!summary_file) {
        throw IoError("cannot write summary: " + (out_dir / "summary.txt").string());
    }
    summary_file << summary.str();
    std::cout << summary.str();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic market simulator with a weighted liquid rank "
                 "reputation system"};
    app.require_subcommand(1);

    SimulateArgs simulate_args;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "run one simulation and write its artifacts");
    simulate->add_option("--preset", simulate_args.preset,
                         "preset name: experiment1, experiment2-wta, experiment2-roulette");
    simulate->add_option("--config", simulate_args.config_path, "experiment config JSON file");
    simulate->add_option("--seed", simulate_args.seed, "override the RNG seed");
    simulate->add_option("--out", simulate_args.out_dir,
                         "output directory (default: config's out_dir, else "
                         "$LIQUIDRANK_OUT, else ./runs)");
    simulate->add_option("--run-id", simulate_args.run_id,
                         "run directory name (default: <preset>-s<seed>)");
    simulate->add_flag("--skip-transactions", simulate_args.skip_transactions,
                       "do not write transactions.jsonl");

    RankArgs rank_args;
    CLI::App* rank = app.add_subcommand(
        "rank", "compute reputation ranks from a transactions file");
    rank->add_option("--transactions", rank_args.transactions_path,
                     "JSON Lines transactions file")
        ->required();
    rank->add_option("--prev-ranks", rank_args.prev_ranks_path,
                     "CSV agent_id,rank with the starting ranks");
    rank->add_option("--default-rank", rank_args.params.default_rank,
                     "rank assumed for unseen raters")
        ->capture_default_str();
    rank->add_option("--conservatism", rank_args.params.conservatism,
                     "blend weight kept by old ranks")
        ->capture_default_str();
    rank->add_option("--decay-value", rank_args.params.decay_value,
                     "differential for participants without ratings")
        ->capture_default_str();
    rank->add_flag("--logarithmic-ratings,!--linear-ratings",
                   rank_args.params.logarithmic_ratings,
                   "weight transactions by log10(1+value) instead of value")
        ->capture_default_str();

    std::string metrics_run_dir;
    CLI::App* metrics = app.add_subcommand(
        "metrics", "recompute metrics.csv from stored run artifacts");
    metrics->add_option("--run", metrics_run_dir, "run directory")->required();

    std::string plot_run_dir;
    CLI::App* plot = app.add_subcommand(
        "plot", "regenerate the per-good scatter plots from stored run artifacts");
    plot->add_option("--run", plot_run_dir, "run directory")->required();

    CompareArgs compare_args;
    CLI::App* compare = app.add_subcommand(
        "compare", "run two presets over N seeds and test the differences");
    compare->add_option("--preset-a", compare_args.preset_a, "first preset name");
    compare->add_option("--preset-b", compare_args.preset_b, "second preset name");
    compare->add_option("--config-a", compare_args.config_a, "first config file");
    compare->add_option("--config-b", compare_args.config_b, "second config file");
    compare->add_option("--runs", compare_args.runs, "repetitions per side (>= 2)")
        ->capture_default_str();
    compare->add_option("--seed-base", compare_args.seed_base,
                        "first seed; runs use consecutive seeds")
        ->capture_default_str();
    compare->add_option("--out", compare_args.out_dir, "output directory")
        ->capture_default_str();
    compare->add_option("--jobs", compare_args.jobs,
                        "worker threads (default: hardware concurrency)");
    compare->add_flag("--full-artifacts", compare_args.full_artifacts,
                      "also write transactions and rank history per run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (simulate->parsed()) {
            return cmd_simulate(simulate_args);
        }
        if (rank->parsed()) {
            return cmd_rank(rank_args);
        }
        if (metrics->parsed()) {
            return cmd_metrics(metrics_run_dir);
        }
        if (plot->parsed()) {
            return cmd_plot(plot_run_dir);
        }
        if (compare->parsed()) {
            return cmd_compare(compare_args);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 3;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
