#pragma once

#include <map>
#include <string>
#include <vector>

#include "mindpalace/area_search.hpp"

namespace mindpalace {

struct StoppingConfig {
    bool enabled = true;
    double q = 0.2;  // prediction sets keep areas with p >= 1 - q
    // Condition 1 trusts a singleton set only when the object is assumed to be in the present.
    bool assume_object_present = true;
    std::size_t max_outcome_areas = 8;  // 2^8 outcome combinations at most
    double sighting_odds = 4.0;         // odds multiplier a past sighting applies to an area
};

struct PredictionSet {
    AreaProbabilities areas;  // descending p, then ascending name
    double q = 0.2;

    bool empty() const { return areas.empty(); }
    std::size_t size() const { return areas.size(); }
};

enum class StopCondition { none, singleton, invariant_next_area };

std::string to_string(StopCondition c);

struct VoiReport {
    bool stop = false;
    StopCondition condition = StopCondition::none;
    double voi_estimate = 0.0;
    std::string first_area;  // next area the present search would explore now
    std::size_t outcomes = 0;
    std::string note;
};

// Hypothetical result of the skipped past retrievals: which candidate areas showed the object.
struct RetrievalOutcome {
    std::map<std::string, bool> seen;
    double probability = 0.0;
    AreaProbabilities posterior;  // present-area probabilities after the outcome
};

// Present-area planning inputs for VoI: the current evidence o and how costs are measured.
struct CostModel {
    AreaCosts costs;
    int depth = 3;
};

PredictionSet prediction_set(const AreaProbabilities& probabilities, double q);

// One outcome per presence/absence pattern over `candidate_areas` (the areas the remaining past
// retrievals would look at), grouped per area. P(seen in a) = p(a); outcomes are independent.
// A sighting multiplies the odds of that area by `sighting_odds`, an absence divides them.
std::vector<RetrievalOutcome> enumerate_outcomes(const AreaProbabilities& current,
                                                 const std::vector<std::string>& candidate_areas,
                                                 const StoppingConfig& config);

// J*(o) - sum P(o'|o) J*(o, o'), floored at 0. Throws Error on an empty outcome set.
double voi_of_retrieval(const AreaProbabilities& current, const std::vector<RetrievalOutcome>& outcomes,
                        const CostModel& model);

VoiReport should_stop_retrieval(const PredictionSet& pred, const AreaProbabilities& current,
                                const CostModel& model, const std::vector<RetrievalOutcome>& outcomes,
                                const StoppingConfig& config);

}  // namespace mindpalace
