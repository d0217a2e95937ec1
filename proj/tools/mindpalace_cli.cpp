#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mindpalace/bench.hpp"
#include "mindpalace/error.hpp"

using namespace mindpalace;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitTransport = 3;

struct Common {
    std::string oracle = "scripted";
    std::uint64_t seed = 7;
    int budget_images = 100;
    int budget_viewpoints = 25;
    double q = 0.2;
    int depth = 3;
    bool no_stopping = false;
    double miss_rate = 0.0;
    int workers = 1;
    std::string agents = "all";
    RemoteConfig remote;

    RunConfig config() const {
        RunConfig c;
        c.oracle = parse_oracle(oracle);
        c.seed = seed;
        c.budgets = {budget_images, budget_viewpoints};
        c.q = q;
        c.depth = depth;
        c.miss_rate = miss_rate;
        c.workers = workers;
        c.remote = remote;
        if (agents != "all") {
            c.agents.clear();
            std::string rest = agents;
            while (!rest.empty()) {
                auto comma = rest.find(',');
                c.agents.push_back(parse_agent(rest.substr(0, comma)));
                rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
            }
        }
        if (no_stopping) {
            std::erase(c.agents, AgentKind::mindpalace_stopping);
        }
        return c;
    }
};

json read_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open " + path);
    json doc = json::parse(f, nullptr, false);
    if (doc.is_discarded()) throw ValidationError(path + " is not valid JSON");
    return doc;
}

std::shared_ptr<const Scenario> scenario_from(const std::string& path, const GenSpec& spec, bool generate) {
    if (generate) return std::make_shared<const Scenario>(parse_scenario(generate_scenario(spec)));
    return std::make_shared<const Scenario>(load_scenario(path));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Long-horizon embodied question answering over a mind palace of past episodes"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key = value file with any of the shared options");

    Common opt;
    app.add_option("--oracle", opt.oracle, "scripted, heuristic or remote")->capture_default_str();
    app.add_option("--seed", opt.seed, "Seed for generation and noise")->capture_default_str();
    app.add_option("--budget-images", opt.budget_images, "Retrieved image budget per question")
        ->capture_default_str()->check(CLI::NonNegativeNumber);
    app.add_option("--budget-viewpoints", opt.budget_viewpoints, "Explored viewpoint budget per question")
        ->capture_default_str()->check(CLI::NonNegativeNumber);
    app.add_option("--q", opt.q, "Prediction set miscoverage level")->capture_default_str();
    app.add_option("--depth", opt.depth, "Area sequence planning depth")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_flag("--no-stopping", opt.no_stopping, "Drop the early-stopping agent");
    app.add_option("--miss-rate", opt.miss_rate, "Detection miss probability")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    app.add_option("--workers", opt.workers, "Parallel runs")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--agents", opt.agents, "Comma separated agents or \"all\"")->capture_default_str();
    app.add_option("--remote-endpoint", opt.remote.endpoint, "Chat completions URL (http only)")->capture_default_str();
    app.add_option("--remote-model", opt.remote.model)->capture_default_str();
    app.add_option("--remote-api-key-env", opt.remote.api_key_env, "Environment variable holding the API key")
        ->capture_default_str();
    app.add_option("--remote-timeout", opt.remote.timeout_s)->capture_default_str();
    app.add_option("--remote-retries", opt.remote.max_retries)->capture_default_str();

    GenSpec spec;
    auto add_gen = [&](CLI::App* sub) {
        sub->add_option("--areas", spec.areas)->capture_default_str();
        sub->add_option("--episodes", spec.episodes)->capture_default_str();
        sub->add_option("--viewpoints-per-area", spec.viewpoints_per_area)->capture_default_str();
        sub->add_option("--floors", spec.floors)->capture_default_str();
        sub->add_option("--questions-per-type", spec.questions_per_type)->capture_default_str();
    };

    std::string out_path;
    auto* gen = app.add_subcommand("generate", "Write a synthetic household scenario as JSON");
    add_gen(gen);
    gen->add_option("-o,--out", out_path, "Output file (stdout when omitted)");

    std::string scenario_path;
    std::string question_id;
    std::string agent_name = "mindpalace";
    std::string trace_path;
    auto* run = app.add_subcommand("run", "Answer one question and print its result record");
    run->add_option("scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
    run->add_option("question", question_id, "Question id")->required();
    run->add_option("--agent", agent_name)->capture_default_str();
    run->add_option("--trace", trace_path, "Write the JSONL trace here");

    std::vector<std::string> suite_scenarios;
    std::vector<std::uint64_t> gen_seeds;
    std::string out_dir = "results";
    auto* suite = app.add_subcommand("suite", "Run every agent on every question and write results");
    suite->add_option("scenarios", suite_scenarios, "Scenario JSON files")->check(CLI::ExistingFile);
    suite->add_option("--generate", gen_seeds, "Generate scenarios from these seeds instead");
    add_gen(suite);
    suite->add_option("--out", out_dir, "Output directory")->capture_default_str();

    std::string results_path;
    auto* report = app.add_subcommand("report", "Render summary tables from a results.jsonl file");
    report->add_option("results", results_path)->required()->check(CLI::ExistingFile);

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a scenario file and list every problem");
    validate->add_option("scenario", validate_path)->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*gen) {
            auto doc = generate_scenario(spec).dump(2);
            if (out_path.empty()) {
                std::cout << doc << "\n";
            } else {
                std::ofstream f(out_path);
                if (!f) throw Error("cannot write " + out_path);
                f << doc << "\n";
            }
        } else if (*run) {
            auto config = opt.config();
            auto scn = std::make_shared<const Scenario>(load_scenario(scenario_path));
            const Question& q = scn->question(question_id);
            auto kind = parse_agent(agent_name);
            auto oracle = make_oracle(config, scn);
            EvalRecord record;
            TraceLog trace;
            if (kind == AgentKind::mindpalace || kind == AgentKind::mindpalace_stopping) {
                auto options = run_options(config, kind);
                options.audit_stopping = false;
                auto res = run_question(q, scn->world, build_palace(*scn), *oracle, options, to_string(kind));
                record = res.record;
                trace = std::move(res.trace);
            } else {
                auto res = run_baseline(kind, q, *scn, *oracle, config.budgets);
                record = res.record;
                trace = std::move(res.trace);
            }
            if (!trace_path.empty()) {
                std::ofstream f(trace_path);
                if (!f) throw Error("cannot write " + trace_path);
                trace.write_jsonl(f);
            }
            std::cout << to_json(record).dump(2) << "\n";
            if (record.error.find("transport") != std::string::npos) return kExitTransport;
            if (!record.error.empty()) return kExitFailure;
        } else if (*suite) {
            auto config = opt.config();
            std::vector<std::shared_ptr<const Scenario>> scenarios;
            for (auto& p : suite_scenarios) scenarios.push_back(scenario_from(p, spec, false));
            for (auto s : gen_seeds) {
                GenSpec g = spec;
                g.seed = s;
                scenarios.push_back(scenario_from("", g, true));
            }
            if (scenarios.empty()) throw ValidationError("give scenario files or --generate seeds");
            auto rep = run_suite(config, scenarios);
            write_suite(rep, out_dir);
            std::cout << render_report(rep);
            for (auto& r : rep.runs) {
                if (r.record.error.find("transport") != std::string::npos) return kExitTransport;
            }
        } else if (*report) {
            std::ifstream f(results_path);
            SuiteReport rep;
            for (auto& r : read_results(f)) rep.runs.push_back({r, {}, {}});
            summarize(rep, {std::begin(kAgentKinds), std::end(kAgentKinds)});
            std::cout << render_report(rep);
        } else if (*validate) {
            auto problems = validate_scenario(read_json(validate_path));
            for (auto& p : problems) std::cout << p << "\n";
            if (!problems.empty()) return kExitValidation;
            std::cout << "ok\n";
        }
    } catch (const ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitValidation;
    } catch (const OracleTransportError& e) {
        std::cerr << "oracle unreachable: " << e.what() << "\n";
        return kExitTransport;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}
