#include "mindpalace/planner.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <memory>

#include "mindpalace/error.hpp"

namespace mindpalace {

using nlohmann::json;

std::vector<AreaNode> present_layout(const World& world) {
    std::vector<AreaNode> areas;
    for (auto& name : world.area_names()) {
        auto members = world.area_members(name);
        AreaNode a;
        a.name = name;
        double x = 0.0;
        double y = 0.0;
        for (int id : members) {
            x += world.node(id).pose.x;
            y += world.node(id).pose.y;
        }
        auto n = static_cast<double>(members.size());
        a.centroid = make_pose(x / n, y / n, world.node(members.front()).pose.floor);
        a.viewpoint_ids = members;  // cleared by build_mind_palace; used here for ordering only
        areas.push_back(std::move(a));
    }
    std::sort(areas.begin(), areas.end(),
              [](const AreaNode& a, const AreaNode& b) { return a.viewpoint_ids.front() < b.viewpoint_ids.front(); });
    for (std::size_t i = 0; i < areas.size(); ++i) areas[i].id = static_cast<int>(i);
    return areas;
}

MindPalace build_palace(const Scenario& scenario) {
    return build_mind_palace(scenario.episodes, scenario.graph, present_layout(scenario.world));
}

RunState make_run_state(const Question& q, const World& world, MindPalace palace, const RunOptions& options) {
    if (options.budgets.max_retrieved_images < 0 || options.budgets.max_explored_viewpoints < 0) {
        throw ValidationError("budgets must be nonnegative");
    }
    if (options.depth < 1) throw ValidationError("planning depth must be at least 1");
    if (options.max_iterations < 1) throw ValidationError("max_iterations must be at least 1");
    if (!world.has_node(q.start_viewpoint)) {
        throw ValidationError("question " + q.id + " starts at unknown viewpoint " + std::to_string(q.start_viewpoint));
    }
    RunState st;
    st.question = &q;
    st.world = &world;
    st.palace = std::move(palace);
    st.ctx.position = q.start_viewpoint;
    st.options = options;
    return st;
}

long long action_ceiling(const RunOptions& options, std::size_t instances, std::size_t areas) {
    long long by_loop = static_cast<long long>(options.max_iterations) * static_cast<long long>(instances) *
                        static_cast<long long>(areas) * static_cast<long long>(kMaxViewpoints);
    long long by_budget = static_cast<long long>(options.budgets.max_retrieved_images) +
                          options.budgets.max_explored_viewpoints;
    return std::min(by_loop, by_budget);
}

namespace {

bool is_present(const std::string& instance) { return instance == kPresentLabel; }

const SceneGraph& graph_of(const RunState& st, const std::string& instance) {
    const SceneGraph* g = st.palace.find(instance);
    if (!g) throw ValidationError("unknown world instance '" + instance + "'");
    return *g;
}

Pose world_area_centroid(const World& world, const std::string& area) {
    double x = 0.0;
    double y = 0.0;
    auto members = world.area_members(area);
    for (int id : members) {
        x += world.node(id).pose.x;
        y += world.node(id).pose.y;
    }
    auto n = static_cast<double>(std::max<std::size_t>(members.size(), 1));
    return make_pose(x / n, y / n, members.empty() ? 0 : world.node(members.front()).pose.floor);
}

std::vector<AreaSummary> area_summaries(const RunState& st, const std::string& instance,
                                        const std::set<std::string>& skip) {
    const SceneGraph& g = graph_of(st, instance);
    std::vector<AreaSummary> out;
    for (auto& a : g.areas) {
        if (skip.count(a.name)) continue;
        AreaSummary s;
        s.name = a.name;
        s.objects = a.object_union;
        for (auto* v : g.viewpoints_in(a.id)) {
            if (v->observation.caption.empty()) continue;
            if (!s.description.empty()) s.description += " ";
            s.description += v->observation.caption;
        }
        s.viewpoints = is_present(instance) ? st.world->area_members(a.name) : a.viewpoint_ids;
        if (s.viewpoints.empty()) continue;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<ViewpointSummary> viewpoint_index(const RunState& st, const std::string& instance,
                                              const std::string& area) {
    const SceneGraph& g = graph_of(st, instance);
    std::vector<ViewpointSummary> out;
    if (is_present(instance)) {
        Pose centroid = world_area_centroid(*st.world, area);
        for (int id : st.world->area_members(area)) {
            ViewpointSummary v;
            v.id = id;
            if (auto* node = g.find_viewpoint(id)) {
                v.caption = node->observation.caption;
                v.objects = node->observation.objects;
            }
            v.centroid_distance = planar_distance(st.world->node(id).pose, centroid);
            out.push_back(std::move(v));
        }
        return out;
    }
    const AreaNode* a = g.find_area(area);
    if (!a) throw ValidationError("area '" + area + "' not in instance '" + instance + "'");
    for (auto* node : g.viewpoints_in(a->id)) {
        out.push_back({node->id, node->observation.caption, node->observation.objects,
                       planar_distance(node->pose, a->centroid)});
    }
    return out;
}

int interactions(const RunState& st) { return st.ctx.retrieved_images + st.ctx.explored_viewpoints; }

bool budget_left(const RunState& st, const std::string& instance) {
    return is_present(instance) ? st.ctx.explored_viewpoints < st.options.budgets.max_explored_viewpoints
                                : st.ctx.retrieved_images < st.options.budgets.max_retrieved_images;
}

std::string now_iso() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

enum class Flow { done, budget };

// One run plus the traced oracle that writes into its own log.
struct Agent {
    RunState st;
    Oracle& base;
    TracingOracle oracle;
    std::map<std::size_t, std::string> pending_stops;  // stop index -> waiting for the first present area

    Agent(RunState state, Oracle& o) : st(std::move(state)), base(o), oracle(o, st.trace) {}
    Agent(const Agent&) = delete;
    Agent& operator=(const Agent&) = delete;

    std::set<std::string>& searched(const std::string& target, const std::string& instance) {
        return searched_areas[{target, instance}];
    }

    std::map<std::pair<std::string, std::string>, std::set<std::string>> searched_areas;

    bool found_in(const std::string& target, const std::string& instance) const {
        for (auto* f : st.wm.findings_for(target))
            if (f->episode == instance) return true;
        return false;
    }

    AreaProbabilities present_probabilities(const std::string& target) {
        auto areas = area_summaries(st, kPresentLabel, {});
        if (areas.empty()) return {};
        return oracle.area_probabilities(target, *st.question, kPresentLabel, areas, st.wm).value;
    }

    std::string first_present_area(const std::string& target) {
        auto current = present_probabilities(target);
        if (current.empty()) return {};
        std::vector<std::string> names;
        for (auto& [n, p] : current) names.push_back(n);
        auto costs = present_costs(*st.world, st.ctx.position, names);
        return plan_area_sequence(current, costs, st.options.depth, PlanMode::present).sequence.front();
    }

    // Runs the VoI check before a past area search. Returns true when retrieval should stop.
    bool check_stop(const std::string& target, const std::string& instance,
                    const std::vector<std::string>& remaining_past) {
        auto current = present_probabilities(target);
        if (current.empty()) return false;
        const auto& cfg = st.options.stopping;
        auto pred = prediction_set(current, cfg.q);

        std::vector<std::string> candidates;
        for (auto& label : remaining_past) {
            auto skip = label == instance ? searched(target, label) : std::set<std::string>{};
            for (auto& a : area_summaries(st, label, skip)) candidates.push_back(a.name);
        }
        auto outcomes = enumerate_outcomes(current, candidates, cfg);
        std::vector<std::string> names;
        for (auto& [n, p] : current) names.push_back(n);
        CostModel model{present_costs(*st.world, st.ctx.position, names), st.options.depth};
        auto report = should_stop_retrieval(pred, current, model, outcomes, cfg);

        json set = json::array();
        for (auto& [n, p] : pred.areas) set.push_back({n, p});
        st.trace.record("stop_check", {{"target", target},
                                       {"instance", instance},
                                       {"prediction_set", set},
                                       {"stop", report.stop},
                                       {"condition", to_string(report.condition)},
                                       {"voi", report.voi_estimate},
                                       {"outcomes", report.outcomes},
                                       {"first_area", report.first_area},
                                       {"note", report.note}});
        if (!report.stop) return false;

        StopEvent ev{target, instance, report, false, {}, true};
        if (st.options.audit_stopping && report.condition == StopCondition::invariant_next_area) {
            ev.audited = true;
            ev.shadow_first_area = shadow_first_area(target, remaining_past);
        }
        st.stops.push_back(std::move(ev));
        pending_stops[st.stops.size() - 1] = target;
        st.wm.append({0, EntryKind::reason, instance, -1, "", target, std::nullopt,
                      "Stopped recalling memories: " + report.note + "."});
        return true;
    }

    // Completes the skipped retrievals on a copy of this run and replans the present search.
    std::string shadow_first_area(const std::string& target, const std::vector<std::string>& remaining_past) {
        RunState copy = st;
        copy.trace = TraceLog{};
        copy.options.stopping.enabled = false;
        copy.options.audit_stopping = false;
        Agent shadow(std::move(copy), base);
        shadow.searched_areas = searched_areas;
        for (auto& label : remaining_past) {
            if (shadow.search_instance(target, label, {}) == Flow::budget) break;
        }
        return shadow.first_present_area(target);
    }

    // Area-level search inside one instance, replanning after every explored area.
    Flow search_instance(const std::string& target, const std::string& instance,
                         const std::vector<std::string>& remaining_past, bool stop_checks = false,
                         bool* stopped = nullptr) {
        const PlanMode mode = is_present(instance) ? PlanMode::present : PlanMode::past;
        bool found = false;
        for (;;) {
            auto& done = searched(target, instance);
            auto areas = area_summaries(st, instance, done);
            if (areas.empty()) break;
            auto decision = oracle.area_probabilities(target, *st.question, instance, areas, st.wm);
            if (decision.value.empty()) break;
            AreaCosts costs;
            if (mode == PlanMode::present) {
                std::vector<std::string> names;
                for (auto& [n, p] : decision.value) names.push_back(n);
                costs = present_costs(*st.world, st.ctx.position, names);
            }
            auto plan = plan_area_sequence(decision.value, costs, st.options.depth, mode, st.options.retrieval_cost);
            const std::string area = plan.sequence.front();

            json probs = json::array();
            for (auto& [n, p] : decision.value) probs.push_back({n, p});
            st.trace.record("area_plan", {{"target", target},
                                          {"instance", instance},
                                          {"mode", to_string(mode)},
                                          {"probabilities", probs},
                                          {"sequence", plan.sequence},
                                          {"expected_cost", plan.expected_cost},
                                          {"reasoning", decision.reasoning}});

            if (stop_checks && check_stop(target, instance, remaining_past)) {
                if (stopped) *stopped = true;
                return Flow::done;
            }
            if (mode == PlanMode::present) {
                for (auto it = pending_stops.begin(); it != pending_stops.end();) {
                    if (it->second == target) {
                        actual_first[it->first] = area;
                        it = pending_stops.erase(it);
                    } else {
                        ++it;
                    }
                }
            }
            if (!budget_left(st, instance)) {
                st.trace.record("budget_exhausted", {{"instance", instance}, {"mode", to_string(mode)}});
                return Flow::budget;
            }
            auto out = explore_area(st, oracle, target, instance, area);
            done.insert(area);
            if (out.status == ExploreStatus::budget_exhausted) return Flow::budget;
            if (out.status == ExploreStatus::found) {
                found = true;
                break;
            }
        }
        st.finished.insert({target, instance});
        st.instances.push_back({target, instance, found});
        return Flow::done;
    }

    std::map<std::size_t, std::string> actual_first;

    Flow search_instances(const std::string& target, const InstancePlan& plan) {
        const bool ends_in_present = !plan.labels.empty() && is_present(plan.labels.back());
        bool skip_past = false;
        for (std::size_t i = 0; i < plan.labels.size(); ++i) {
            const auto& label = plan.labels[i];
            if (st.finished.count({target, label})) continue;
            if (is_present(label)) {
                if (found_in(target, kPresentLabel)) continue;
                if (search_instance(target, label, {}) == Flow::budget) return Flow::budget;
                continue;
            }
            if (skip_past) continue;
            // Stopping only matters while the present location of the target is still unknown.
            bool checks = st.options.stopping.enabled && ends_in_present && !found_in(target, kPresentLabel) &&
                          !st.finished.count({target, kPresentLabel});
            std::vector<std::string> remaining;
            for (std::size_t j = i; j < plan.labels.size(); ++j)
                if (!is_present(plan.labels[j])) remaining.push_back(plan.labels[j]);
            bool stopped = false;
            if (search_instance(target, label, remaining, checks, &stopped) == Flow::budget) return Flow::budget;
            if (stopped) skip_past = true;
        }
        return Flow::done;
    }
};

}  // namespace

ExploreOutcome explore_area(RunState& st, Oracle& oracle, const std::string& target, const std::string& instance,
                            const std::string& area) {
    if (!budget_left(st, instance)) {
        throw BudgetError(is_present(instance) ? "exploration budget exhausted" : "retrieval budget exhausted");
    }
    const Question& q = *st.question;
    auto index = viewpoint_index(st, instance, area);
    ExploreOutcome out;
    if (index.empty()) return out;

    auto decision = oracle.select_viewpoints(target, q, instance, index);
    std::vector<int> ids = decision.value;
    if (ids.empty()) {
        auto sorted = index;
        std::stable_sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) {
            return a.centroid_distance < b.centroid_distance || (a.centroid_distance == b.centroid_distance && a.id < b.id);
        });
        for (std::size_t i = 0; i < sorted.size() && i < kMaxViewpoints; ++i) ids.push_back(sorted[i].id);
    }
    st.wm.append({0, EntryKind::reason, instance, -1, area, target, std::nullopt,
                  "Viewpoints to check in " + area + ": " + decision.reasoning});

    const bool present = is_present(instance);
    for (int id : ids) {
        Observation obs;
        auto key = std::make_pair(instance, id);
        bool cached = st.seen.count(key) > 0;
        if (cached) {
            obs = st.seen.at(key);
        } else {
            if (!budget_left(st, instance)) {
                out.status = ExploreStatus::budget_exhausted;
                return out;
            }
            if (present) {
                auto nav = st.ctx.navigate_to(*st.world, id);
                obs = nav.observation;
                const AreaNode* node = st.palace.present.find_area(area);
                if (!st.palace.present.find_viewpoint(id) && node) {
                    st.palace = update_present(std::move(st.palace),
                                               ViewpointNode{id, st.world->node(id).pose, obs, node->id});
                }
                st.trace.record("explore", {{"viewpoint", id},
                                            {"area", area},
                                            {"meters", nav.length},
                                            {"path", nav.path},
                                            {"image_ref", obs.image_ref}});
            } else {
                obs = st.ctx.retrieve_image(*st.world, instance, id);
                st.trace.record("retrieve", {{"instance", instance},
                                             {"viewpoint", id},
                                             {"area", area},
                                             {"image_ref", obs.image_ref.empty() ? instance + "/" + std::to_string(id)
                                                                                 : obs.image_ref}});
            }
            st.seen[key] = obs;
            ++out.interactions;
        }
        bool found = oracle.detect(target, obs, {instance, id});
        st.trace.record("detect", {{"target", target}, {"instance", instance}, {"viewpoint", id}, {"found", found}});
        MemoryEntry e{0, present ? EntryKind::explore : EntryKind::retrieve, instance, id, area, target,
                      found ? std::optional<Observation>(obs) : std::nullopt,
                      found ? "Object found!" : "Object NOT found!"};
        st.wm.append(std::move(e));
        if (found) {
            out.status = ExploreStatus::found;
            out.viewpoint = id;
            return out;
        }
    }
    return out;
}

RunResult run_question(const Question& q, const World& world, MindPalace palace, Oracle& base,
                       const RunOptions& options, const std::string& agent_name) {
    auto started = std::chrono::steady_clock::now();
    Agent agent(make_run_state(q, world, std::move(palace), options), base);
    RunState& st = agent.st;
    RunResult result;
    std::string answer;
    std::string error;

    try {
        bool answered = false;
        for (int iter = 0; iter < options.max_iterations && !answered; ++iter) {
            result.iterations = iter + 1;
            auto ready = agent.oracle.is_ready_to_answer(q, st.wm);
            st.wm.append({0, EntryKind::reason, "", -1, "", "", std::nullopt,
                          std::string("Ready to answer: ") + (ready.value ? "Yes. " : "No. ") + ready.reasoning});
            st.trace.record("readiness", {{"iteration", iter}, {"ready", ready.value}, {"reasoning", ready.reasoning}});
            if (ready.value) {
                answered = true;
                break;
            }
            auto target = agent.oracle.identify_target(q, st.wm);
            st.wm.append({0, EntryKind::reason, "", -1, "", target.value, std::nullopt,
                          "Object to search: " + target.value + ". " + target.reasoning});
            st.trace.record("target", {{"iteration", iter}, {"target", target.value}, {"reasoning", target.reasoning}});

            auto plan = agent.oracle.select_world_instances(target.value, q, st.palace.labels(), st.wm);
            if (st.strategy.empty()) st.strategy = to_string(plan.value.strategy);
            st.wm.append({0, EntryKind::reason, "", -1, "", target.value, std::nullopt,
                          "Search strategy: " + to_string(plan.value.strategy) + ". " + plan.reasoning});
            st.trace.record("strategy", {{"iteration", iter},
                                         {"strategy", to_string(plan.value.strategy)},
                                         {"instances", plan.value.labels},
                                         {"reasoning", plan.reasoning}});

            int before = interactions(st);
            std::size_t findings_before = st.wm.findings().size();
            std::size_t finished_before = st.finished.size();
            if (agent.search_instances(target.value, plan.value) == Flow::budget) break;
            if (interactions(st) == before && st.wm.findings().size() == findings_before &&
                st.finished.size() == finished_before) {
                st.trace.record("stalled", {{"iteration", iter}});
                break;
            }
        }
        auto reply = agent.oracle.answer(q, st.wm);
        answer = text::trim(reply.value).empty() ? kHonestFailure : reply.value;
        st.trace.record("answer", {{"answer", answer}, {"reasoning", reply.reasoning}, {"ready", answered}});
        result.record.sigma = agent.oracle.score(q, q.ground_truth, answer);
    } catch (const OracleTransportError& e) {
        error = std::string("oracle transport failure: ") + e.what();
    } catch (const OracleParseError& e) {
        error = std::string("oracle reply could not be parsed: ") + e.what();
    }
    if (!error.empty()) {
        st.trace.record("error", {{"error", error}});
        result.record.sigma = 1;
    }

    for (auto& [idx, area] : agent.actual_first) {
        auto& ev = st.stops[idx];
        if (ev.audited) ev.consistent = ev.shadow_first_area == area;
    }
    for (auto& ev : st.stops) {
        // A stop whose present search never started is compared against the planned first area.
        if (ev.audited && !agent.actual_first.count(&ev - st.stops.data())) {
            ev.consistent = ev.shadow_first_area == ev.report.first_area;
        }
    }

    auto& r = result.record;
    r.question_id = q.id;
    r.agent = agent_name;
    r.qtype = to_string(q.qtype);
    r.p = st.ctx.traveled;
    r.l = q.annotated_solution.empty() ? 0.0 : chained_path_length(world, q.start_viewpoint, q.annotated_solution);
    r.retrieved_images = st.ctx.retrieved_images;
    r.explored_viewpoints = st.ctx.explored_viewpoints;
    r.answer = answer;
    r.error = error;
    r.stops = static_cast<int>(st.stops.size());
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    r.finished_at = now_iso();

    result.answer = answer;
    result.trace = std::move(st.trace);
    result.wm = std::move(st.wm);
    result.stops = std::move(st.stops);
    result.instances = std::move(st.instances);
    result.strategy = st.strategy;
    return result;
}

}  // namespace mindpalace
