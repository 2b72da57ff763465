#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "liquidrank/experiment_io.hpp"
#include "liquidrank/metrics.hpp"
#include "liquidrank/presets.hpp"
#include "liquidrank/reputation.hpp"
#include "liquidrank/simulator.hpp"

namespace py = pybind11;
using namespace liquidrank;

namespace {

std::vector<RatedTransaction> to_transactions(
    const std::vector<std::tuple<int, ParticipantId, ParticipantId, int, double, double>>&
        rows) {
    std::vector<RatedTransaction> txns;
    txns.reserve(rows.size());
    for (const auto& [day, rater, ratee, good, value, rating] : rows) {
        txns.push_back({day, rater, ratee, good, value, rating});
    }
    return txns;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Market simulator and weighted liquid rank reputation library";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<RatedTransaction>(m, "RatedTransaction")
        .def(py::init<>())
        .def(py::init([](int day, ParticipantId rater, ParticipantId ratee, int good,
                         double value, double rating) {
                 return RatedTransaction{day, rater, ratee, good, value, rating};
             }),
             py::arg("day"), py::arg("rater"), py::arg("ratee"), py::arg("good"),
             py::arg("value"), py::arg("rating"))
        .def_readwrite("day", &RatedTransaction::day)
        .def_readwrite("rater", &RatedTransaction::rater)
        .def_readwrite("ratee", &RatedTransaction::ratee)
        .def_readwrite("good", &RatedTransaction::good)
        .def_readwrite("value", &RatedTransaction::value)
        .def_readwrite("rating", &RatedTransaction::rating)
        .def("__repr__", [](const RatedTransaction& t) {
            return "RatedTransaction(day=" + std::to_string(t.day) + ", rater=" +
                   std::to_string(t.rater) + ", ratee=" + std::to_string(t.ratee) +
                   ", good=" + std::to_string(t.good) + ", value=" +
                   std::to_string(t.value) + ", rating=" + std::to_string(t.rating) + ")";
        });

    py::class_<ReputationParams>(m, "ReputationParams")
        .def(py::init<>())
        .def_readwrite("default_rank", &ReputationParams::default_rank)
        .def_readwrite("conservatism", &ReputationParams::conservatism)
        .def_readwrite("logarithmic_ratings", &ReputationParams::logarithmic_ratings)
        .def_readwrite("decay_value", &ReputationParams::decay_value)
        .def("validate", &ReputationParams::validate);

    m.def("rating_weight", &rating_weight, py::arg("value"), py::arg("params"));
    m.def(
        "compute_differential_ranks",
        [](const std::vector<RatedTransaction>& txns, const RankMap& prev,
           const ReputationParams& params) {
            return compute_differential_ranks(txns, prev, params);
        },
        py::arg("transactions"), py::arg("prev_ranks"), py::arg("params"));
    m.def(
        "blend_ranks",
        [](const RankMap& prev, const RankMap& differential, const ReputationParams& params,
           const std::set<ParticipantId>& all_known) {
            return blend_ranks(prev, differential, params, all_known);
        },
        py::arg("prev_ranks"), py::arg("differential"), py::arg("params"),
        py::arg("all_known"));
    m.def(
        "update_ranks",
        [](const std::vector<RatedTransaction>& txns, const RankMap& prev,
           const ReputationParams& params) { return update_ranks(txns, prev, params); },
        py::arg("transactions"), py::arg("prev_ranks"), py::arg("params"));
    m.def(
        "update_ranks_rows",
        [](const std::vector<std::tuple<int, ParticipantId, ParticipantId, int, double,
                                        double>>& rows,
           const RankMap& prev, const ReputationParams& params) {
            return update_ranks(to_transactions(rows), prev, params);
        },
        py::arg("rows"), py::arg("prev_ranks"), py::arg("params"),
        "update_ranks over (day, rater, ratee, good, value, rating) tuples");

    m.def(
        "weighted_covariance",
        [](const std::vector<double>& a, const std::vector<double>& b,
           const std::vector<double>& w) { return weighted_covariance(a, b, w); },
        py::arg("a"), py::arg("b"), py::arg("w"));
    m.def(
        "weighted_pearson",
        [](const std::vector<double>& x, const std::vector<double>& y,
           const std::vector<double>& w) { return weighted_pearson({x, y, w}); },
        py::arg("x"), py::arg("y"), py::arg("w"));

    py::enum_<EquityDirection>(m, "EquityDirection")
        .value("low", EquityDirection::low)
        .value("high", EquityDirection::high);
    m.def(
        "equity_weights",
        [](const std::vector<double>& reputations, EquityDirection direction) {
            return equity_weights(reputations, direction);
        },
        py::arg("reputations"), py::arg("direction"));

    py::class_<AgentEconomics>(m, "AgentEconomics")
        .def(py::init<>())
        .def(py::init([](ParticipantId agent, double volume_received, double volume_spent,
                         double quality, double reputation) {
                 return AgentEconomics{agent, volume_received, volume_spent, quality,
                                       reputation};
             }),
             py::arg("agent"), py::arg("volume_received"), py::arg("volume_spent"),
             py::arg("quality"), py::arg("reputation") = 0.0)
        .def_readwrite("agent", &AgentEconomics::agent)
        .def_readwrite("volume_received", &AgentEconomics::volume_received)
        .def_readwrite("volume_spent", &AgentEconomics::volume_spent)
        .def_readwrite("quality", &AgentEconomics::quality)
        .def_readwrite("reputation", &AgentEconomics::reputation);

    m.def(
        "inequity",
        [](const std::vector<AgentEconomics>& agents) { return inequity(agents); },
        py::arg("agents"));
    m.def(
        "utility", [](const std::vector<double>& ratings) { return utility(ratings); },
        py::arg("ratings"));
    m.def(
        "loss_to_scam",
        [](const std::vector<RatedTransaction>& ledger,
           const std::set<ParticipantId>& scam_suppliers,
           const std::set<ParticipantId>& honest_consumers) {
            return loss_to_scam(ledger, scam_suppliers, honest_consumers);
        },
        py::arg("ledger"), py::arg("scam_suppliers"), py::arg("honest_consumers"));

    py::class_<SignificanceResult>(m, "SignificanceResult")
        .def_readonly("p_value", &SignificanceResult::p_value)
        .def_readonly("significant_at_99", &SignificanceResult::significant_at_99)
        .def_readonly("t_statistic", &SignificanceResult::t_statistic)
        .def_readonly("degrees_of_freedom", &SignificanceResult::degrees_of_freedom);
    m.def(
        "significance_test",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            return significance_test(a, b);
        },
        py::arg("sample_a"), py::arg("sample_b"));
    m.def("student_t_two_sided_p", &student_t_two_sided_p, py::arg("t"), py::arg("df"));

    py::enum_<Strategy>(m, "Strategy")
        .value("winner_take_all", Strategy::winner_take_all)
        .value("roulette", Strategy::roulette)
        .value("thresholded_random", Strategy::thresholded_random)
        .value("none", Strategy::none);

    py::class_<AgentSpec>(m, "AgentSpec")
        .def(py::init<>())
        .def_readwrite("id", &AgentSpec::id)
        .def_readwrite("is_consumer", &AgentSpec::is_consumer)
        .def_readwrite("is_supplier", &AgentSpec::is_supplier)
        .def_readwrite("honest", &AgentSpec::honest)
        .def_readwrite("quality", &AgentSpec::quality);

    py::class_<MarketConfig>(m, "MarketConfig")
        .def(py::init<>())
        .def_readwrite("n_agents", &MarketConfig::n_agents)
        .def_readwrite("n_goods", &MarketConfig::n_goods)
        .def_readwrite("n_days", &MarketConfig::n_days)
        .def_readwrite("overlap_fraction", &MarketConfig::overlap_fraction)
        .def_readwrite("pure_supplier_share", &MarketConfig::pure_supplier_share)
        .def_readwrite("scam_supplier_count", &MarketConfig::scam_supplier_count)
        .def_readwrite("scam_rater_count", &MarketConfig::scam_rater_count)
        .def_readwrite("scam_supplier_quality", &MarketConfig::scam_supplier_quality)
        .def_readwrite("target_volume_ratio", &MarketConfig::target_volume_ratio)
        .def_readwrite("strategy", &MarketConfig::strategy)
        .def_readwrite("threshold", &MarketConfig::threshold)
        .def_readwrite("satisfaction_threshold", &MarketConfig::satisfaction_threshold)
        .def_readwrite("shopping_probability", &MarketConfig::shopping_probability)
        .def_readwrite("prices", &MarketConfig::prices)
        .def_readwrite("rating_noise_sd", &MarketConfig::rating_noise_sd)
        .def_readwrite("quality_mean", &MarketConfig::quality_mean)
        .def_readwrite("quality_sd", &MarketConfig::quality_sd)
        .def_readwrite("reputation", &MarketConfig::reputation)
        .def_readwrite("seed", &MarketConfig::seed)
        .def("validate", &MarketConfig::validate)
        .def("price_of", &MarketConfig::price_of, py::arg("good"));

    py::class_<MetricsReport>(m, "MetricsReport")
        .def_readonly("utility", &MetricsReport::utility)
        .def_readonly("inequity", &MetricsReport::inequity)
        .def_readonly("pccw_overall", &MetricsReport::pccw_overall)
        .def_readonly("pccw_low_weighted", &MetricsReport::pccw_low_weighted)
        .def_readonly("pccw_high_weighted", &MetricsReport::pccw_high_weighted)
        .def_readonly("pearson_by_good", &MetricsReport::pearson_by_good)
        .def_readonly("pearson_by_good_avg", &MetricsReport::pearson_by_good_avg)
        .def_readonly("loss_to_scam", &MetricsReport::loss_to_scam);

    py::class_<SimulationResult>(m, "SimulationResult")
        .def_readonly("ledger", &SimulationResult::ledger)
        .def_readonly("rank_history", &SimulationResult::rank_history)
        .def_readonly("agents", &SimulationResult::agents)
        .def_readonly("metrics", &SimulationResult::metrics);

    m.def("run_simulation", &run_simulation, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("compute_metrics", &compute_metrics, py::arg("ledger"), py::arg("agents"),
          py::arg("final_ranks"));

    m.def("preset_market", &preset_market, py::arg("name"));
    m.def("preset_names", &preset_names);

    m.def(
        "plot_reputation_vs_quality",
        [](const RankMap& final_ranks, const std::vector<AgentSpec>& agents, int good) {
            return plot_reputation_vs_quality(final_ranks, agents, good);
        },
        py::arg("final_ranks"), py::arg("agents"), py::arg("good"));
}
