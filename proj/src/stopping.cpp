#include "mindpalace/stopping.hpp"

#include <algorithm>
#include <set>

#include "mindpalace/error.hpp"

namespace mindpalace {

std::string to_string(StopCondition c) {
    switch (c) {
        case StopCondition::singleton: return "singleton";
        case StopCondition::invariant_next_area: return "invariant_next_area";
        case StopCondition::none: break;
    }
    return "none";
}

PredictionSet prediction_set(const AreaProbabilities& probabilities, double q) {
    if (!(q > 0.0 && q < 1.0)) throw ValidationError("prediction-set threshold q must lie in (0, 1)");
    PredictionSet set;
    set.q = q;
    for (auto& [name, p] : probabilities) {
        // Compare with a small slack so that p = 0.8 qualifies at q = 0.2.
        if (p >= 1.0 - q - 1e-12) set.areas.emplace_back(name, p);
    }
    std::sort(set.areas.begin(), set.areas.end(), [](auto& a, auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return set;
}

std::vector<RetrievalOutcome> enumerate_outcomes(const AreaProbabilities& current,
                                                 const std::vector<std::string>& candidate_areas,
                                                 const StoppingConfig& config) {
    std::map<std::string, double> p;
    for (auto& [name, v] : current) p[name] = std::clamp(v, 0.0, kMaxAreaProbability);

    // Most probable candidates first, so the cap drops the least informative areas.
    std::vector<std::string> vars;
    for (auto& a : candidate_areas) {
        if (p.count(a) && std::find(vars.begin(), vars.end(), a) == vars.end()) vars.push_back(a);
    }
    std::stable_sort(vars.begin(), vars.end(), [&](auto& a, auto& b) { return p[a] > p[b]; });
    if (vars.size() > config.max_outcome_areas) vars.resize(config.max_outcome_areas);

    std::vector<RetrievalOutcome> out;
    const std::size_t combos = std::size_t{1} << vars.size();
    for (std::size_t mask = 0; mask < combos; ++mask) {
        RetrievalOutcome o;
        o.probability = 1.0;
        std::map<std::string, double> post = p;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            bool seen = (mask >> i) & 1u;
            const auto& a = vars[i];
            o.seen[a] = seen;
            o.probability *= seen ? p[a] : 1.0 - p[a];
            double odds = p[a] / (1.0 - p[a]);
            odds = seen ? odds * config.sighting_odds : odds / config.sighting_odds;
            post[a] = std::min(kMaxAreaProbability, odds / (1.0 + odds));
        }
        for (auto& [name, v] : current) o.posterior.emplace_back(name, post[name]);
        out.push_back(std::move(o));
    }
    double total = 0.0;
    for (auto& o : out) total += o.probability;
    if (total > 0.0) {
        for (auto& o : out) o.probability /= total;
    } else {
        for (auto& o : out) o.probability = 1.0 / static_cast<double>(out.size());
    }
    return out;
}

double voi_of_retrieval(const AreaProbabilities& current, const std::vector<RetrievalOutcome>& outcomes,
                        const CostModel& model) {
    if (outcomes.empty()) throw Error("VoI needs at least one outcome");
    double now = plan_area_sequence(current, model.costs, model.depth, PlanMode::present).expected_cost;
    double after = 0.0;
    for (auto& o : outcomes) {
        after += o.probability * plan_area_sequence(o.posterior, model.costs, model.depth, PlanMode::present).expected_cost;
    }
    return std::max(0.0, now - after);
}

VoiReport should_stop_retrieval(const PredictionSet& pred, const AreaProbabilities& current,
                                const CostModel& model, const std::vector<RetrievalOutcome>& outcomes,
                                const StoppingConfig& config) {
    VoiReport report;
    report.outcomes = outcomes.size();
    if (current.empty()) {
        report.note = "no present areas to plan over";
        return report;
    }
    report.first_area = plan_area_sequence(current, model.costs, model.depth, PlanMode::present).sequence.front();
    if (pred.empty()) {
        report.note = "empty prediction set; stopping bypassed";
        return report;
    }
    if (!outcomes.empty()) report.voi_estimate = voi_of_retrieval(current, outcomes, model);

    if (pred.size() == 1 && config.assume_object_present) {
        report.stop = true;
        report.condition = StopCondition::singleton;
        report.note = "prediction set holds only '" + pred.areas.front().first + "'";
        return report;
    }
    if (outcomes.empty()) {
        report.note = "no remaining retrievals to reason about";
        return report;
    }
    std::set<std::string> firsts{report.first_area};
    for (auto& o : outcomes) {
        firsts.insert(plan_area_sequence(o.posterior, model.costs, model.depth, PlanMode::present).sequence.front());
        if (firsts.size() > 1) break;
    }
    if (firsts.size() == 1) {
        report.stop = true;
        report.condition = StopCondition::invariant_next_area;
        report.note = "every outcome keeps '" + report.first_area + "' as the next area";
        return report;
    }
    report.note = "some outcome changes the next area";
    return report;
}

}  // namespace mindpalace
