#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "liquidrank/experiment_io.hpp"

using namespace liquidrank;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    const char* env = std::getenv("LIQUIDRANK_CLI");
    REQUIRE_MESSAGE(env != nullptr, "LIQUIDRANK_CLI must point at the CLI binary");
    return env;
}

struct CliResult {
    int exit_code = -1;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    const std::string command = cli_path() + " " + args + " 2>&1";
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult result;
    std::array<char, 4096> buffer{};
    std::size_t got = 0;
    while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
        result.output.append(buffer.data(), got);
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

fs::path temp_dir() {
    static int counter = 0;
    const fs::path dir =
        fs::temp_directory_path() / ("liquidrank_cli_test_" + std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), ("missing file: " + path.string()));
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

fs::path write_small_config(const fs::path& dir, const std::string& run_id,
                            std::uint64_t seed, const std::string& strategy = "roulette") {
    ExperimentConfig config;
    config.run_id = run_id;
    config.out_dir = dir.string();
    config.market.n_agents = 40;
    config.market.n_goods = 3;
    config.market.n_days = 10;
    config.market.pure_supplier_share = 0.3;
    config.market.scam_supplier_count = 1;
    config.market.scam_rater_count = 3;
    config.market.strategy = strategy_from_string(strategy);
    config.market.seed = seed;
    const fs::path path = dir / (run_id + ".json");
    std::ofstream out(path);
    out << render_config(config);
    return path;
}

} // namespace

TEST_CASE("cli: --help succeeds and lists the subcommands") {
    const CliResult result = run_cli("--help");
    CHECK(result.exit_code == 0);
    for (const char* name : {"simulate", "rank", "metrics", "compare", "plot"}) {
        CHECK(result.output.find(name) != std::string::npos);
    }
    // every subcommand help lists its flags
    const CliResult sim_help = run_cli("simulate --help");
    CHECK(sim_help.exit_code == 0);
    CHECK(sim_help.output.find("--preset") != std::string::npos);
    CHECK(sim_help.output.find("--seed") != std::string::npos);
    const CliResult cmp_help = run_cli("compare --help");
    CHECK(cmp_help.exit_code == 0);
    CHECK(cmp_help.output.find("--seed-base") != std::string::npos);
}

TEST_CASE("cli: unknown flags are hard errors") {
    CHECK(run_cli("simulate --does-not-exist").exit_code == 2);
    CHECK(run_cli("frobnicate").exit_code == 2);
}

TEST_CASE("cli simulate: config run writes artifacts and exits 0") {
    const fs::path dir = temp_dir();
    const fs::path config = write_small_config(dir, "smoke", 5);
    const CliResult result = run_cli("simulate --config " + config.string());
    CHECK(result.exit_code == 0);
    const fs::path run_dir = dir / "smoke";
    CHECK(fs::exists(run_dir / "config.resolved"));
    CHECK(fs::exists(run_dir / "transactions.jsonl"));
    CHECK(fs::exists(run_dir / "ranks.csv"));
    CHECK(fs::exists(run_dir / "agents.jsonl"));
    CHECK(fs::exists(run_dir / "metrics.csv"));
    CHECK(fs::exists(run_dir / "plots" / "good_0.svg"));
}

TEST_CASE("cli simulate: missing config file exits 2") {
    CHECK(run_cli("simulate --config /nonexistent/config.json").exit_code == 2);
    CHECK(run_cli("simulate --preset no-such-preset").exit_code == 2);
    CHECK(run_cli("simulate").exit_code == 2);
}

TEST_CASE("cli simulate: identical config and seed give byte-identical artifacts") {
    const fs::path dir = temp_dir();
    const fs::path config_a = write_small_config(dir, "rep-a", 11);
    const fs::path config_b = write_small_config(dir, "rep-b", 11);
    REQUIRE(run_cli("simulate --config " + config_a.string()).exit_code == 0);
    REQUIRE(run_cli("simulate --config " + config_b.string()).exit_code == 0);
    for (const char* name : {"transactions.jsonl", "ranks.csv", "agents.jsonl"}) {
        CHECK(slurp(dir / "rep-a" / name) == slurp(dir / "rep-b" / name));
    }
    CHECK(slurp(dir / "rep-a" / "plots" / "good_0.svg") ==
          slurp(dir / "rep-b" / "plots" / "good_0.svg"));
}

TEST_CASE("cli rank: empty transactions file prints only the header") {
    const fs::path dir = temp_dir();
    const fs::path file = dir / "empty.jsonl";
    std::ofstream(file).close();
    const CliResult result = run_cli("rank --transactions " + file.string());
    CHECK(result.exit_code == 0);
    CHECK(result.output == "agent_id,rank\n");
}

TEST_CASE("cli rank: two-transaction file matches the hand-executed update") {
    const fs::path dir = temp_dir();
    const fs::path file = dir / "two.jsonl";
    {
        std::ofstream out(file);
        out << R"({"day":0,"rater":1,"ratee":10,"good":0,"value":10.0,"rating":1.0})" << '\n';
        out << R"({"day":0,"rater":2,"ratee":11,"good":0,"value":10.0,"rating":0.5})" << '\n';
    }
    const std::string flags =
        " --default-rank 0.5 --conservatism 0.5 --decay-value 0 --linear-ratings";
    const CliResult result = run_cli("rank --transactions " + file.string() + flags);
    CHECK(result.exit_code == 0);
    CHECK(result.output == "agent_id,rank\n10,1.000000000\n11,0.666666667\n");
    // deterministic across invocations
    CHECK(run_cli("rank --transactions " + file.string() + flags).output == result.output);
}

TEST_CASE("cli rank: malformed record names the line") {
    const fs::path dir = temp_dir();
    const fs::path file = dir / "bad.jsonl";
    {
        std::ofstream out(file);
        out << R"({"day":0,"rater":1,"ratee":10,"good":0,"value":10.0,"rating":1.0})" << '\n';
        out << R"({"day":0,"oops":true})" << '\n';
    }
    const CliResult result = run_cli("rank --transactions " + file.string());
    CHECK(result.exit_code == 2);
    CHECK(result.output.find("line 2") != std::string::npos);
}

TEST_CASE("cli metrics/plot: offline recomputation is byte-identical") {
    const fs::path dir = temp_dir();
    const fs::path config = write_small_config(dir, "recompute", 9);
    REQUIRE(run_cli("simulate --config " + config.string()).exit_code == 0);
    const fs::path run_dir = dir / "recompute";
    const std::string metrics_before = slurp(run_dir / "metrics.csv");
    const std::string plot_before = slurp(run_dir / "plots" / "good_1.svg");

    const CliResult metrics_result = run_cli("metrics --run " + run_dir.string());
    CHECK(metrics_result.exit_code == 0);
    CHECK(slurp(run_dir / "metrics.csv") == metrics_before);

    const CliResult plot_result = run_cli("plot --run " + run_dir.string());
    CHECK(plot_result.exit_code == 0);
    CHECK(slurp(run_dir / "plots" / "good_1.svg") == plot_before);
}

TEST_CASE("cli metrics: missing run directory exits 2") {
    CHECK(run_cli("metrics --run /nonexistent/run").exit_code == 2);
    CHECK(run_cli("plot --run /nonexistent/run").exit_code == 2);
}

TEST_CASE("cli compare: identical sides are not significant") {
    const fs::path dir = temp_dir();
    const fs::path config = write_small_config(dir, "same", 1);
    const fs::path out = dir / "cmp";
    const CliResult result =
        run_cli("compare --config-a " + config.string() + " --config-b " + config.string() +
                " --runs 4 --seed-base 1 --out " + out.string());
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("not significant at 99%") != std::string::npos);
    CHECK(fs::exists(out / "comparison.csv"));
    CHECK(fs::exists(out / "summary.txt"));
    // one row per run per side plus the header
    std::istringstream csv(slurp(out / "comparison.csv"));
    std::string line;
    int lines = 0;
    while (std::getline(csv, line)) {
        ++lines;
    }
    CHECK(lines == 1 + 2 * 4);
    // per-run plot directories exist
    CHECK(fs::exists(out / "same-s1" / "plots" / "good_0.svg"));
}

TEST_CASE("cli compare: fewer than two runs exits 2") {
    const fs::path dir = temp_dir();
    const fs::path config = write_small_config(dir, "tiny", 1);
    const CliResult result = run_cli("compare --config-a " + config.string() +
                                     " --config-b " + config.string() + " --runs 1");
    CHECK(result.exit_code == 2);
}

TEST_CASE("cli compare: output is independent of worker scheduling") {
    const fs::path dir = temp_dir();
    const fs::path config_a = write_small_config(dir, "sched-a", 1);
    const fs::path config_b = write_small_config(dir, "sched-b", 1, "winner_take_all");
    const std::string base = "compare --config-a " + config_a.string() + " --config-b " +
                             config_b.string() + " --runs 3 --seed-base 1 --out ";
    REQUIRE(run_cli(base + (dir / "j1").string() + " --jobs 1").exit_code == 0);
    REQUIRE(run_cli(base + (dir / "j4").string() + " --jobs 4").exit_code == 0);
    CHECK(slurp(dir / "j1" / "comparison.csv") == slurp(dir / "j4" / "comparison.csv"));
    CHECK(slurp(dir / "j1" / "summary.txt") == slurp(dir / "j4" / "summary.txt"));
}

TEST_CASE("cli simulate: unwritable output directory exits 3") {
    const fs::path dir = temp_dir();
    const fs::path config = write_small_config(dir, "blocked", 1);
    std::ofstream(dir / "obstacle").close(); // a file where a directory must go
    const CliResult result = run_cli("simulate --config " + config.string() + " --out " +
                                     (dir / "obstacle" / "sub").string());
    CHECK(result.exit_code == 3);
}
