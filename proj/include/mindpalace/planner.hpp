#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mindpalace/area_search.hpp"
#include "mindpalace/metrics.hpp"
#include "mindpalace/oracle.hpp"
#include "mindpalace/scenario.hpp"
#include "mindpalace/stopping.hpp"
#include "mindpalace/trace.hpp"
#include "mindpalace/working_memory.hpp"

namespace mindpalace {

struct Budgets {
    int max_retrieved_images = 100;
    int max_explored_viewpoints = 25;
};

struct RunOptions {
    Budgets budgets;
    int depth = 3;
    double retrieval_cost = 1.0;
    int max_iterations = 8;
    StoppingConfig stopping{false};
    // Re-run the skipped retrievals after every invariant_next_area stop and compare first areas.
    bool audit_stopping = false;
};

// Present-environment area layout from the world map, ids ordered by smallest member viewpoint.
std::vector<AreaNode> present_layout(const World& world);

// Mind palace of a scenario: its episodes plus an empty present graph over the world's areas.
MindPalace build_palace(const Scenario& scenario);

enum class ExploreStatus { found, not_found, budget_exhausted };

struct ExploreOutcome {
    ExploreStatus status = ExploreStatus::not_found;
    std::optional<int> viewpoint;  // where the target was detected
    int interactions = 0;          // retrievals or navigations charged
};

struct StopEvent {
    std::string target;
    std::string instance;  // past instance about to be searched when the check ran
    VoiReport report;
    bool audited = false;
    std::string shadow_first_area;
    bool consistent = true;
};

struct InstanceResult {
    std::string target;
    std::string instance;
    bool found = false;
};

// Mutable state of one agent run. Copyable so shadow runs can branch from it.
struct RunState {
    const Question* question = nullptr;
    const World* world = nullptr;
    MindPalace palace;
    RunContext ctx;
    WorkingMemory wm;
    TraceLog trace;
    RunOptions options;
    std::map<std::pair<std::string, int>, Observation> seen;  // (instance, viewpoint) -> observation
    std::set<std::pair<std::string, std::string>> finished;   // (target, instance) searched to the end
    std::vector<StopEvent> stops;
    std::vector<InstanceResult> instances;
    std::string strategy;
};

RunState make_run_state(const Question& q, const World& world, MindPalace palace, const RunOptions& options);

// Looks for `target` in one area of one world instance, stopping at the first detection.
// Throws BudgetError when the relevant budget is already spent on entry.
ExploreOutcome explore_area(RunState& state, Oracle& oracle, const std::string& target, const std::string& instance,
                            const std::string& area);

struct RunResult {
    std::string answer;
    EvalRecord record;
    TraceLog trace;
    WorkingMemory wm;
    std::vector<StopEvent> stops;
    std::vector<InstanceResult> instances;
    std::string strategy;  // first world-instance strategy chosen
    int iterations = 0;
};

// The interleaved readiness / target / instance / area / viewpoint loop for one question.
// Oracle transport and parse failures end the run with sigma = 1 and the error recorded.
RunResult run_question(const Question& q, const World& world, MindPalace palace, Oracle& oracle,
                       const RunOptions& options, const std::string& agent = "mindpalace");

// Upper bound on world interactions of one run under `options`.
long long action_ceiling(const RunOptions& options, std::size_t instances, std::size_t areas);

}  // namespace mindpalace
