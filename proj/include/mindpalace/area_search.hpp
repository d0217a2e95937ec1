#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mindpalace/oracle.hpp"
#include "mindpalace/worldsim.hpp"

namespace mindpalace {

enum class PlanMode { present, past };

std::string to_string(PlanMode mode);

// Travel costs for the area MDP: from the robot into each area, and between area anchors.
struct AreaCosts {
    std::map<std::string, double> entry;
    std::map<std::pair<std::string, std::string>, double> between;  // either key order

    // Cost of moving into `to`, from the robot when `from` is null.
    double step(const std::string* from, const std::string& to) const;
};

// Entry and pairwise costs measured on the world graph from `position`.
AreaCosts present_costs(const World& world, int position, const std::vector<std::string>& areas);

// Probabilities as a search prior: entries clamped to [0, 0.99], the whole set rescaled
// proportionally when it sums above 1. The remainder is the mass of "not in any candidate".
std::map<std::string, double> search_prior(const AreaProbabilities& probabilities);

// J = sum_i c(v_{i-1} -> v_i) * (1 - sum_{j<i} p(v_j)). In past mode every step costs `retrieval_cost`.
double expected_cost(const std::vector<std::string>& sequence, const std::map<std::string, double>& prior,
                     const AreaCosts& costs, PlanMode mode, double retrieval_cost);

struct AreaPlan {
    std::vector<std::string> sequence;
    double expected_cost = 0.0;
};

// Relative tolerance under which two expected costs count as tied.
inline constexpr double kCostTieTolerance = 1e-9;

// Depth-limited forward search over orderings of distinct candidate areas. Every plan has
// min(depth, candidates) areas; among minimal plans ties go to the lower first-step cost and
// then to the lexicographically smaller sequence. Throws Error("nowhere to search") when empty.
AreaPlan plan_area_sequence(const AreaProbabilities& probabilities, const AreaCosts& costs, int depth,
                            PlanMode mode, double retrieval_cost = 1.0);

}  // namespace mindpalace
