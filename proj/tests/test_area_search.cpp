#include <doctest.h>

#include <random>

#include "mindpalace/area_search.hpp"
#include "mindpalace/error.hpp"
#include "support/brute_force.hpp"
#include "support/fixtures.hpp"

using namespace mindpalace;

TEST_CASE("planner matches the exhaustive enumerator on random instances") {
    std::mt19937_64 rng(20240611);
    int mismatches = 0;
    for (int i = 0; i < 500; ++i) {
        auto in = fixtures::random_instance(rng);
        auto want = bf::solve(in);
        auto got = fixtures::plan(in);
        bool same = got.sequence == want.sequence && bf::close(got.expected_cost, want.cost);
        if (!same) {
            ++mismatches;
            MESSAGE("instance " << i << " differs");
        }
    }
    CHECK(mismatches == 0);
}

TEST_CASE("plans are exactly min(depth, candidates) long") {
    AreaCosts costs{{{"a", 1.0}, {"b", 2.0}}, {{{"a", "b"}, 1.0}}};
    AreaProbabilities probs{{"a", 0.5}, {"b", 0.3}};
    CHECK(plan_area_sequence(probs, costs, 1, PlanMode::present).sequence.size() == 1);
    CHECK(plan_area_sequence(probs, costs, 2, PlanMode::present).sequence.size() == 2);
    CHECK(plan_area_sequence(probs, costs, 3, PlanMode::present).sequence.size() == 2);
}

TEST_CASE("later steps are discounted by the chance the search already ended") {
    // J(near, far) = 1 + 9 * 0.95 = 9.55 and J(far, near) = 10 + 9 * 0.1 = 10.9
    AreaCosts costs{{{"near", 1.0}, {"far", 10.0}}, {{{"far", "near"}, 9.0}}};
    AreaProbabilities probs{{"far", 0.9}, {"near", 0.05}};
    auto two = plan_area_sequence(probs, costs, 2, PlanMode::present);
    CHECK(two.sequence == std::vector<std::string>{"near", "far"});
    CHECK(two.expected_cost == doctest::Approx(9.55));
    auto one = plan_area_sequence(probs, costs, 1, PlanMode::present);
    CHECK(one.sequence == std::vector<std::string>{"near"});
}

TEST_CASE("past mode charges one retrieval per step and sorts by probability") {
    AreaCosts none;
    AreaProbabilities probs{{"a", 0.2}, {"b", 0.7}, {"c", 0.1}};
    auto plan = plan_area_sequence(probs, none, 3, PlanMode::past, 1.0);
    CHECK(plan.sequence == std::vector<std::string>{"b", "a", "c"});
    CHECK(plan.expected_cost == doctest::Approx(1.0 + 0.3 + 0.1));
}

TEST_CASE("ties prefer the cheaper first step, then the lexicographic sequence") {
    AreaCosts costs{{{"a", 2.0}, {"b", 2.0}}, {{{"a", "b"}, 2.0}}};
    AreaProbabilities probs{{"b", 0.0}, {"a", 0.0}};
    CHECK(plan_area_sequence(probs, costs, 2, PlanMode::present).sequence == std::vector<std::string>{"a", "b"});
}

TEST_CASE("search prior clamps and rescales only above one") {
    auto low = search_prior({{"a", 0.3}, {"b", -1.0}});
    CHECK(low.at("a") == doctest::Approx(0.3));
    CHECK(low.at("b") == 0.0);
    auto high = search_prior({{"a", 1.5}, {"b", 0.99}});
    CHECK(high.at("a") == doctest::Approx(0.5));
    CHECK(high.at("b") == doctest::Approx(0.5));
}

TEST_CASE("planner input errors") {
    AreaCosts costs;
    CHECK_THROWS_WITH_AS(plan_area_sequence({}, costs, 3, PlanMode::present), "nowhere to search", Error);
    CHECK_THROWS_AS(plan_area_sequence({{"a", 0.5}}, costs, 0, PlanMode::past), ValidationError);
    CHECK_THROWS_AS(plan_area_sequence({{"a", 0.5}}, costs, 1, PlanMode::present), Error);
}
