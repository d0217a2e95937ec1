#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mindpalace/metrics.hpp"
#include "mindpalace/oracle.hpp"
#include "mindpalace/oracle_remote.hpp"
#include "mindpalace/planner.hpp"
#include "mindpalace/scenario.hpp"

namespace mindpalace {

struct GenSpec {
    int areas = 6;
    int episodes = 5;
    int viewpoints_per_area = 3;
    int floors = 1;
    int questions_per_type = 12;
    std::uint64_t seed = 7;
};

// Synthetic household: a connected world, per-episode object dynamics (moved, added, removed,
// consumed) and questions of all five types with ground truth and annotated solutions.
nlohmann::json generate_scenario(const GenSpec& spec);

enum class AgentKind { mindpalace, mindpalace_stopping, full_retrieval, socratic_captions, full_exploration };

inline constexpr AgentKind kAgentKinds[] = {AgentKind::mindpalace, AgentKind::mindpalace_stopping,
                                            AgentKind::full_retrieval, AgentKind::socratic_captions,
                                            AgentKind::full_exploration};

std::string to_string(AgentKind kind);
AgentKind parse_agent(const std::string& name);

enum class OracleKind { scripted, heuristic, remote };

std::string to_string(OracleKind kind);
OracleKind parse_oracle(const std::string& name);

struct RunConfig {
    std::vector<AgentKind> agents{std::begin(kAgentKinds), std::end(kAgentKinds)};
    OracleKind oracle = OracleKind::scripted;
    RemoteConfig remote;
    Budgets budgets;
    double q = 0.2;
    int depth = 3;
    std::uint64_t seed = 7;
    double miss_rate = 0.0;
    bool audit_stopping = true;
    int workers = 1;
};

// Fresh oracle for one run. Scripted and heuristic oracles are cheap to build.
std::unique_ptr<Oracle> make_oracle(const RunConfig& config, const std::shared_ptr<const Scenario>& scenario);

RunOptions run_options(const RunConfig& config, AgentKind kind);

struct BaselineResult {
    EvalRecord record;
    TraceLog trace;
    WorkingMemory wm;
};

// full_retrieval, socratic_captions and full_exploration analogs. Throws ValidationError for the
// mindpalace kinds or a negative budget.
BaselineResult run_baseline(AgentKind kind, const Question& q, const Scenario& scenario, Oracle& oracle,
                            const Budgets& budgets);

// One (agent, question) run with its trace and stopping audit.
struct SuiteRun {
    EvalRecord record;
    std::vector<nlohmann::json> trace;
    std::vector<StopEvent> stops;
};

struct PairedRow {
    std::string question_id;
    std::string qtype;
    int images_without = 0;
    int images_with = 0;
    int sigma_without = 1;
    int sigma_with = 1;
};

struct SuiteReport {
    std::vector<SuiteRun> runs;  // ordered by scenario, question, agent
    std::vector<SummaryRow> per_agent;
    std::map<std::string, std::vector<SummaryRow>> per_qtype;  // agent -> five rows
    std::vector<PairedRow> paired;                             // stopping vs no stopping
    int condition2_firings = 0;
    int condition2_violations = 0;
    int condition1_firings = 0;
};

SuiteReport run_suite(const RunConfig& config, const std::vector<std::shared_ptr<const Scenario>>& scenarios);

// Builds the summary tables from completed records (also used to re-render saved results).
void summarize(SuiteReport& report, const std::vector<AgentKind>& agents);

std::string render_report(const SuiteReport& report);

// Writes results.jsonl, traces/<agent>__<question>.jsonl, summary.txt and summary.csv.
void write_suite(const SuiteReport& report, const std::filesystem::path& out_dir);

}  // namespace mindpalace
