#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "brute_force.hpp"
#include "mindpalace/area_search.hpp"

namespace fixtures {

// Random planner instance. Half of them use coarse grids so that exact ties are common.
inline bf::Instance random_instance(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n_areas(1, 6);
    std::uniform_int_distribution<int> depth(1, 3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    bool coarse = unit(rng) < 0.5;
    bf::Instance in;
    int n = n_areas(rng);
    in.depth = depth(rng);
    in.past = unit(rng) < 0.25;
    in.retrieval_cost = coarse ? 1.0 : 0.5 + unit(rng);
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("area" + std::to_string(i));
    for (auto& name : names) {
        double p = coarse ? std::floor(unit(rng) * 6) / 10.0 : unit(rng) * 1.1 - 0.05;
        in.probs.push_back({name, p});
        in.entry[name] = coarse ? std::floor(unit(rng) * 4) : unit(rng) * 30.0;
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            in.between[{names[static_cast<std::size_t>(i)], names[static_cast<std::size_t>(j)]}] =
                coarse ? std::floor(unit(rng) * 4) : unit(rng) * 30.0;
        }
    }
    return in;
}

inline mindpalace::AreaCosts to_costs(const bf::Instance& in) {
    mindpalace::AreaCosts c;
    c.entry = in.entry;
    c.between = in.between;
    return c;
}

inline mindpalace::AreaPlan plan(const bf::Instance& in) {
    return mindpalace::plan_area_sequence(in.probs, to_costs(in), in.depth,
                                          in.past ? mindpalace::PlanMode::past : mindpalace::PlanMode::present,
                                          in.retrieval_cost);
}

struct MetricCase {
    int sigma;
    double p;
    double l;
    double correctness;  // percent
    double efficiency;   // percent
};

// Hand-computed values; every ratio below is exact in binary floating point.
inline const std::vector<MetricCase> kMetricTable = {
    {1, 0.0, 0.0, 0.0, 0.0},     {2, 0.0, 0.0, 25.0, 25.0},     {3, 0.0, 0.0, 50.0, 50.0},
    {4, 0.0, 0.0, 75.0, 75.0},   {5, 0.0, 0.0, 100.0, 100.0},   {5, 8.0, 0.0, 100.0, 0.0},
    {5, 4.0, 8.0, 100.0, 100.0}, {5, 16.0, 8.0, 100.0, 50.0},   {3, 32.0, 8.0, 50.0, 12.5},
    {4, 8.0, 8.0, 75.0, 75.0},   {1, 16.0, 8.0, 0.0, 0.0},      {2, 0.0, 4.0, 25.0, 25.0},
};

}  // namespace fixtures
