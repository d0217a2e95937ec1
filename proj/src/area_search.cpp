#include "mindpalace/area_search.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "mindpalace/error.hpp"

namespace mindpalace {

std::string to_string(PlanMode mode) { return mode == PlanMode::present ? "present" : "past"; }

double AreaCosts::step(const std::string* from, const std::string& to) const {
    if (!from) {
        auto it = entry.find(to);
        if (it == entry.end()) throw Error("no entry cost for area '" + to + "'");
        return it->second;
    }
    if (*from == to) return 0.0;
    auto it = between.find({*from, to});
    if (it == between.end()) it = between.find({to, *from});
    if (it == between.end()) throw Error("no cost between '" + *from + "' and '" + to + "'");
    return it->second;
}

AreaCosts present_costs(const World& world, int position, const std::vector<std::string>& areas) {
    AreaCosts costs;
    std::map<std::string, int> anchors;
    for (auto& a : areas) {
        anchors[a] = area_anchor(world, a);
        costs.entry[a] = area_centroid_distance(world, position, a);
    }
    for (std::size_t i = 0; i < areas.size(); ++i) {
        for (std::size_t j = i + 1; j < areas.size(); ++j) {
            costs.between[{areas[i], areas[j]}] = shortest_path(world, anchors[areas[i]], anchors[areas[j]]).meters;
        }
    }
    return costs;
}

std::map<std::string, double> search_prior(const AreaProbabilities& probabilities) {
    std::map<std::string, double> prior;
    double total = 0.0;
    for (auto& [name, p] : probabilities) {
        double v = std::isnan(p) ? 0.0 : std::clamp(p, 0.0, kMaxAreaProbability);
        prior[name] = v;
        total += v;
    }
    if (total > 1.0) {
        for (auto& [name, p] : prior) p /= total;
    }
    return prior;
}

double expected_cost(const std::vector<std::string>& sequence, const std::map<std::string, double>& prior,
                     const AreaCosts& costs, PlanMode mode, double retrieval_cost) {
    double j = 0.0;
    double survive = 1.0;
    const std::string* prev = nullptr;
    for (auto& area : sequence) {
        double c = mode == PlanMode::past ? retrieval_cost : costs.step(prev, area);
        j += c * survive;
        survive -= prior.at(area);
        prev = &area;
    }
    return j;
}

namespace {

bool tied(double a, double b) {
    return std::abs(a - b) <= kCostTieTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

AreaPlan plan_area_sequence(const AreaProbabilities& probabilities, const AreaCosts& costs, int depth,
                            PlanMode mode, double retrieval_cost) {
    if (probabilities.empty()) throw Error("nowhere to search");
    if (depth < 1) throw ValidationError("planning depth must be at least 1");

    auto prior = search_prior(probabilities);
    std::vector<std::string> areas;
    for (auto& [name, p] : prior) areas.push_back(name);
    const std::size_t length = std::min<std::size_t>(static_cast<std::size_t>(depth), areas.size());

    auto step_cost = [&](const std::string* from, const std::string& to) {
        return mode == PlanMode::past ? retrieval_cost : costs.step(from, to);
    };

    struct Leaf {
        std::vector<std::string> sequence;
        double cost;
    };
    std::vector<Leaf> leaves;
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::string> path;
    path.reserve(length);  // `prev` below points into path across push_back
    std::vector<bool> used(areas.size(), false);

    // Costs are nonnegative, so a partial plan already above the best complete one cannot win.
    std::function<void(double, double)> expand = [&](double cost, double survive) {
        if (cost > best && !tied(cost, best)) return;
        if (path.size() == length) {
            best = std::min(best, cost);
            leaves.push_back({path, cost});
            return;
        }
        const std::string* prev = path.empty() ? nullptr : &path.back();
        for (std::size_t i = 0; i < areas.size(); ++i) {
            if (used[i]) continue;
            double c = step_cost(prev, areas[i]);
            used[i] = true;
            path.push_back(areas[i]);
            expand(cost + c * survive, survive - prior[areas[i]]);
            path.pop_back();
            used[i] = false;
        }
    };
    expand(0.0, 1.0);

    const Leaf* pick = nullptr;
    double pick_first = 0.0;
    for (auto& leaf : leaves) {
        if (!tied(leaf.cost, best)) continue;
        double first = step_cost(nullptr, leaf.sequence.front());
        if (!pick || (first < pick_first && !tied(first, pick_first)) ||
            (tied(first, pick_first) && leaf.sequence < pick->sequence)) {
            pick = &leaf;
            pick_first = first;
        }
    }
    return {pick->sequence, pick->cost};
}

}  // namespace mindpalace
