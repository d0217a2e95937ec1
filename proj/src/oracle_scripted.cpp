#include <algorithm>
#include <map>
#include <set>

#include "mindpalace/oracle.hpp"
#include "mindpalace/text.hpp"

namespace mindpalace {

namespace {

std::string fill_template(std::string tmpl, const MemoryEntry* finding) {
    auto replace = [&](const std::string& key, const std::string& value) {
        for (auto pos = tmpl.find(key); pos != std::string::npos; pos = tmpl.find(key, pos + value.size())) {
            tmpl.replace(pos, key.size(), value);
        }
    };
    if (finding) {
        replace("{area}", finding->area);
        replace("{episode}", finding->episode);
        replace("{object}", finding->target);
    }
    return tmpl;
}

}  // namespace

ScriptedOracle::ScriptedOracle(std::shared_ptr<const Scenario> scenario, NoiseModel noise)
    : scenario_(std::move(scenario)), noise_(noise) {}

const Question* ScriptedOracle::lookup(const Question& q) const {
    for (auto& candidate : scenario_->questions)
        if (candidate.id == q.id) return &candidate;
    return &q;
}

bool ScriptedOracle::truly_present(const std::string& target, const Question* q, const std::string& instance,
                                   int viewpoint) const {
    if (q) {
        for (auto& ev : q->evidence) {
            if (ev.episode == instance && ev.viewpoint == viewpoint) return ev.present;
        }
    }
    const Placements* placements = nullptr;
    if (instance == kPresentLabel) {
        placements = &scenario_->world.present_placements();
    } else {
        auto it = scenario_->world.episode_placements().find(instance);
        if (it != scenario_->world.episode_placements().end()) placements = &it->second;
    }
    if (!placements) return false;
    auto it = placements->find(viewpoint);
    if (it == placements->end()) return false;
    return std::any_of(it->second.objects.begin(), it->second.objects.end(),
                       [&](const std::string& label) { return scenario_->lexicon.matches(target, label); });
}

Decision<bool> ScriptedOracle::is_ready_to_answer(const Question& question, const WorkingMemory& wm) {
    const Question& q = *lookup(question);
    if (q.evidence.empty()) {
        for (auto& t : q.targets) {
            if (wm.findings_for(t).empty()) return {false, "No finding yet for '" + t + "'."};
        }
        bool ready = !q.targets.empty() || !wm.findings().empty();
        return {ready, ready ? "Every target has been observed." : "Nothing observed yet."};
    }
    std::vector<std::string> missing;
    std::vector<std::string> absent;
    for (auto& ev : q.evidence) {
        auto where = ev.episode + " viewpoint " + std::to_string(ev.viewpoint);
        if (!wm.visited(ev.episode, ev.viewpoint)) {
            missing.push_back(where);
        } else if (!ev.present) {
            absent.push_back(ev.episode);
        }
    }
    if (!missing.empty()) {
        std::string why = "Still need to check:";
        for (auto& m : missing) why += " " + m + ";";
        return {false, why};
    }
    std::string why = "All annotated evidence has been gathered.";
    for (auto& a : absent) why += " The object was absent on " + a + ".";
    return {true, why};
}

Decision<std::string> ScriptedOracle::identify_target(const Question& question, const WorkingMemory& wm) {
    const Question& q = *lookup(question);
    if (q.targets.empty()) return {enforce_target("", q), "No annotated target; using question nouns."};
    for (auto& t : q.targets) {
        if (wm.findings_for(t).empty()) return {enforce_target(t, q), "Annotated target not yet observed."};
    }
    return {enforce_target(q.targets.back(), q), "All targets observed; re-checking the last one."};
}

Decision<InstancePlan> ScriptedOracle::select_world_instances(const std::string&, const Question& question,
                                                             const std::vector<std::string>& labels,
                                                             const WorkingMemory&) {
    const Question& q = *lookup(question);
    InstancePlan plan;
    std::vector<std::string> past;
    for (auto& l : labels)
        if (l != kPresentLabel) past.push_back(l);

    if (q.strategy && !q.instances.empty()) {
        plan.strategy = *q.strategy;
        plan.labels = q.instances;
        return {enforce_instances(plan, labels), "Annotated strategy."};
    }

    // Past instances from the most recent down to the oldest one holding evidence.
    std::size_t oldest = 0;
    bool any_past_evidence = false;
    for (auto& ev : q.evidence) {
        auto it = std::find(past.begin(), past.end(), ev.episode);
        if (it != past.end()) {
            oldest = std::max(oldest, static_cast<std::size_t>(it - past.begin()));
            any_past_evidence = true;
        }
    }
    std::vector<std::string> span(past.begin(), past.begin() + std::min(past.size(), oldest + 1));
    if (!any_past_evidence && !past.empty()) span = {past.front()};

    switch (q.qtype) {
        case QuestionType::present:
            plan = {SearchStrategy::present_only, {kPresentLabel}};
            break;
        case QuestionType::past: {
            // A single past event: only the instances that hold its evidence.
            std::vector<std::string> named;
            for (auto& l : past) {
                bool has = std::any_of(q.evidence.begin(), q.evidence.end(), [&](auto& ev) { return ev.episode == l; });
                if (has) named.push_back(l);
            }
            plan = {SearchStrategy::past_only, named.empty() ? span : named};
            break;
        }
        case QuestionType::multi_past:
            plan = {SearchStrategy::past_only, span};
            break;
        case QuestionType::past_present:
            plan = {SearchStrategy::past_then_present, {}};
            if (!past.empty()) plan.labels.push_back(past.front());
            plan.labels.push_back(kPresentLabel);
            break;
        case QuestionType::past_present_future:
            plan = {SearchStrategy::multi_past_and_present, span};
            plan.labels.push_back(kPresentLabel);
            break;
    }
    if (q.strategy) plan.strategy = *q.strategy;
    return {enforce_instances(plan, labels), "Strategy chosen from the question type " + to_string(q.qtype) + "."};
}

Decision<AreaProbabilities> ScriptedOracle::area_probabilities(const std::string& target, const Question& question,
                                                               const std::string& instance,
                                                               const std::vector<AreaSummary>& areas,
                                                               const WorkingMemory&) {
    const Question* q = lookup(question);
    AreaProbabilities raw;
    std::vector<std::string> holding;
    for (auto& a : areas) {
        bool here = std::any_of(a.viewpoints.begin(), a.viewpoints.end(),
                                [&](int vp) { return truly_present(target, q, instance, vp); });
        bool annotated = std::any_of(q->evidence.begin(), q->evidence.end(), [&](const Evidence& ev) {
            return ev.episode == instance &&
                   std::find(a.viewpoints.begin(), a.viewpoints.end(), ev.viewpoint) != a.viewpoints.end();
        });
        // Annotated places where the object turned out absent still deserve a look first.
        raw.emplace_back(a.name, here ? 0.9 : annotated ? 0.5 : 0.05);
        if (here) holding.push_back(a.name);
    }
    std::string reasoning = "Not present anywhere in " + instance + ".";
    if (!holding.empty()) {
        reasoning = "Present in " + instance + " at:";
        for (auto& name : holding) reasoning += " " + name + ";";
    }
    return {enforce_probabilities(std::move(raw), areas), reasoning};
}

Decision<std::vector<int>> ScriptedOracle::select_viewpoints(const std::string& target, const Question& question,
                                                             const std::string& instance,
                                                             const std::vector<ViewpointSummary>& index) {
    const Question* q = lookup(question);
    std::vector<int> evidence;
    std::vector<int> holding;
    std::vector<int> rest;
    for (auto& v : index) {
        bool is_evidence = std::any_of(q->evidence.begin(), q->evidence.end(), [&](const Evidence& ev) {
            return ev.episode == instance && ev.viewpoint == v.id;
        });
        if (is_evidence) {
            evidence.push_back(v.id);
        } else if (truly_present(target, q, instance, v.id)) {
            holding.push_back(v.id);
        } else {
            rest.push_back(v.id);
        }
    }
    std::sort(evidence.begin(), evidence.end());
    std::sort(holding.begin(), holding.end());
    std::sort(rest.begin(), rest.end());
    evidence.insert(evidence.end(), holding.begin(), holding.end());
    evidence.insert(evidence.end(), rest.begin(), rest.end());
    return {enforce_viewpoints(std::move(evidence), index), "Evidence and true-location viewpoints first."};
}

bool ScriptedOracle::detect(const std::string& target, const Observation& obs, const DetectionContext& where) {
    bool found = std::any_of(obs.objects.begin(), obs.objects.end(),
                             [&](const std::string& label) { return scenario_->lexicon.matches(target, label); });
    for (auto& q : scenario_->questions) {
        for (auto& ev : q.evidence) {
            if (ev.present && ev.episode == where.episode && ev.viewpoint == where.viewpoint &&
                std::find(q.targets.begin(), q.targets.end(), target) != q.targets.end()) {
                found = true;
            }
        }
    }
    return found && !seeded_miss(noise_, target, where);
}

Decision<std::string> ScriptedOracle::answer(const Question& question, const WorkingMemory& wm) {
    const Question& q = *lookup(question);
    auto ready = is_ready_to_answer(q, wm);
    if (ready.value) {
        auto findings = wm.findings();
        const MemoryEntry* latest = findings.empty() ? nullptr : findings.back();
        auto tmpl = q.answer_template.empty() ? q.ground_truth : q.answer_template;
        return {fill_template(tmpl, latest), ready.reasoning};
    }
    return {compose_findings_answer(q, wm, scenario_->past_labels_recent_first()),
            "Answering from partial findings. " + ready.reasoning};
}

int ScriptedOracle::score(const Question& q, const std::string& ground_truth, const std::string& answer) {
    return key_phrase_score(*lookup(q), ground_truth, answer);
}

}  // namespace mindpalace
