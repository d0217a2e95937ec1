#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <set>

#include "mindpalace/area_search.hpp"
#include "mindpalace/bench.hpp"
#include "mindpalace/error.hpp"
#include "mindpalace/metrics.hpp"

namespace py = pybind11;
using namespace mindpalace;
using nlohmann::json;

namespace {

// Documents cross the boundary as JSON text; the python package decodes them.
json parse_doc(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("invalid JSON: ") + e.what());
    }
}

RunConfig config_from(const std::string& text) {
    auto j = text.empty() ? json::object() : parse_doc(text);
    static const std::set<std::string> known{"agents", "oracle", "budget_images", "budget_viewpoints", "q", "depth",
                                             "seed", "miss_rate", "workers", "remote_endpoint", "remote_model"};
    for (auto& [key, value] : j.items()) {
        if (!known.count(key)) throw ValidationError("unknown config key: " + key);
    }
    RunConfig cfg;
    if (j.contains("agents")) {
        cfg.agents.clear();
        for (auto& a : j.at("agents")) cfg.agents.push_back(parse_agent(a.get<std::string>()));
    }
    cfg.oracle = parse_oracle(j.value("oracle", std::string("scripted")));
    cfg.budgets.max_retrieved_images = j.value("budget_images", cfg.budgets.max_retrieved_images);
    cfg.budgets.max_explored_viewpoints = j.value("budget_viewpoints", cfg.budgets.max_explored_viewpoints);
    cfg.q = j.value("q", cfg.q);
    cfg.depth = j.value("depth", cfg.depth);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.miss_rate = j.value("miss_rate", cfg.miss_rate);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.remote.endpoint = j.value("remote_endpoint", cfg.remote.endpoint);
    cfg.remote.model = j.value("remote_model", cfg.remote.model);
    return cfg;
}

std::string run_one(const std::string& scenario, const std::string& question_id, const std::string& agent,
                    const std::string& config) {
    auto cfg = config_from(config);
    auto scn = std::make_shared<const Scenario>(parse_scenario(parse_doc(scenario)));
    const Question& q = scn->question(question_id);
    auto kind = parse_agent(agent);
    auto oracle = make_oracle(cfg, scn);
    json out;
    if (kind == AgentKind::mindpalace || kind == AgentKind::mindpalace_stopping) {
        auto res = run_question(q, scn->world, build_palace(*scn), *oracle, run_options(cfg, kind), agent);
        out["record"] = to_json(res.record);
        out["trace"] = res.trace.records();
        out["strategy"] = res.strategy;
        out["stops"] = res.stops.size();
        out["instances"] = json::array();
        for (auto& r : res.instances) {
            out["instances"].push_back({{"target", r.target}, {"instance", r.instance}, {"found", r.found}});
        }
    } else {
        auto res = run_baseline(kind, q, *scn, *oracle, cfg.budgets);
        out["record"] = to_json(res.record);
        out["trace"] = res.trace.records();
    }
    return out.dump();
}

std::string suite(const std::vector<std::string>& scenarios, const std::string& config) {
    auto cfg = config_from(config);
    std::vector<std::shared_ptr<const Scenario>> loaded;
    for (auto& s : scenarios) loaded.push_back(std::make_shared<const Scenario>(parse_scenario(parse_doc(s))));
    SuiteReport rep;
    {
        py::gil_scoped_release release;
        rep = run_suite(cfg, loaded);
    }
    json out;
    out["records"] = json::array();
    for (auto& r : rep.runs) out["records"].push_back(to_json(r.record));
    out["report"] = render_report(rep);
    out["condition1_firings"] = rep.condition1_firings;
    out["condition2_firings"] = rep.condition2_firings;
    out["condition2_violations"] = rep.condition2_violations;
    return out.dump();
}

std::pair<std::vector<std::string>, double> plan(const std::vector<std::pair<std::string, double>>& probabilities,
                                                 const std::map<std::string, double>& entry,
                                                 const std::map<std::pair<std::string, std::string>, double>& between,
                                                 int depth, const std::string& mode, double retrieval_cost) {
    AreaCosts costs{entry, between};
    PlanMode m;
    if (mode == "present") {
        m = PlanMode::present;
    } else if (mode == "past") {
        m = PlanMode::past;
    } else {
        throw ValidationError("mode must be present or past");
    }
    auto p = plan_area_sequence(probabilities, costs, depth, m, retrieval_cost);
    return {p.sequence, p.expected_cost};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Mind palace question answering engine";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<OracleTransportError>(m, "OracleTransportError", base.ptr());
    py::register_exception<BudgetError>(m, "BudgetError", base.ptr());

    m.def(
        "generate_scenario",
        [](int areas, int episodes, int viewpoints_per_area, int floors, int questions_per_type, std::uint64_t seed) {
            return generate_scenario({areas, episodes, viewpoints_per_area, floors, questions_per_type, seed}).dump();
        },
        py::arg("areas") = 6, py::arg("episodes") = 5, py::arg("viewpoints_per_area") = 3, py::arg("floors") = 1,
        py::arg("questions_per_type") = 12, py::arg("seed") = 7);
    m.def(
        "validate_scenario", [](const std::string& doc) { return validate_scenario(parse_doc(doc)); },
        py::arg("scenario"));
    m.def("run_question", &run_one, py::arg("scenario"), py::arg("question_id"), py::arg("agent") = "mindpalace",
          py::arg("config") = "");
    m.def("run_suite", &suite, py::arg("scenarios"), py::arg("config") = "");
    m.def("plan_area_sequence", &plan, py::arg("probabilities"), py::arg("entry"), py::arg("between") = py::dict(),
          py::arg("depth") = 3, py::arg("mode") = "present", py::arg("retrieval_cost") = 1.0);
    m.def("correctness", &correctness, py::arg("sigma"));
    m.def("exploration_efficiency", &exploration_efficiency_fraction, py::arg("sigma"), py::arg("p"), py::arg("l"));
}
