#include <doctest.h>

#include <random>

#include "mindpalace/bench.hpp"
#include "mindpalace/error.hpp"
#include "mindpalace/planner.hpp"

using namespace mindpalace;
using nlohmann::json;

namespace {

std::vector<json> events(const TraceLog& log, const std::string& name) {
    std::vector<json> out;
    for (auto& r : log.records()) {
        if (r.at("event") == name) out.push_back(r);
    }
    return out;
}

std::shared_ptr<const Scenario> generated(std::uint64_t seed, int questions = 4) {
    GenSpec spec;
    spec.seed = seed;
    spec.questions_per_type = questions;
    return std::make_shared<const Scenario>(parse_scenario(generate_scenario(spec)));
}

}  // namespace

TEST_CASE("package delivery walkthrough") {
    auto s = std::make_shared<const Scenario>(load_scenario(MP_TEST_DATA "/example2.json"));
    ScriptedOracle oracle(s);
    const Question& q = s->questions.front();
    auto res = run_question(q, s->world, build_palace(*s), oracle, RunOptions{});

    CHECK(res.strategy == "PAST_ONLY");
    auto strategy = events(res.trace, "strategy");
    REQUIRE_FALSE(strategy.empty());
    CHECK(strategy[0]["instances"] ==
          json::array({"friday afternoon", "thursday afternoon", "wednesday afternoon"}));

    std::vector<std::pair<std::string, bool>> per_instance;
    for (auto& r : res.instances) per_instance.push_back({r.instance, r.found});
    CHECK(per_instance == std::vector<std::pair<std::string, bool>>{
                              {"friday afternoon", true}, {"thursday afternoon", true}, {"wednesday afternoon", false}});

    CHECK(res.answer == "Before Thursday afternoon");
    CHECK(res.record.sigma == 5);
    CHECK(res.record.p == 0.0);
    CHECK(res.record.explored_viewpoints == 0);
    CHECK(res.record.retrieved_images == retrieval_count(res.trace.records()));
    CHECK(events(res.trace, "readiness").back()["ready"] == true);
    // Every oracle call is traced alongside the actions.
    CHECK_FALSE(events(res.trace, "oracle").empty());
}

TEST_CASE("budgets hold and runs terminate for random configurations") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> images(0, 12);
    std::uniform_int_distribution<int> views(0, 8);
    std::uniform_int_distribution<int> depth(1, 3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int runs = 0;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        auto s = generated(seed, 3);
        auto palace = build_palace(*s);
        for (int trial = 0; trial < 6; ++trial) {
            RunConfig cfg;
            cfg.oracle = unit(rng) < 0.5 ? OracleKind::scripted : OracleKind::heuristic;
            cfg.budgets = {images(rng), views(rng)};
            cfg.depth = depth(rng);
            cfg.miss_rate = unit(rng) < 0.3 ? 0.3 : 0.0;
            cfg.seed = seed;
            for (auto kind : kAgentKinds) {
                for (auto& q : s->questions) {
                    auto oracle = make_oracle(cfg, s);
                    auto opts = run_options(cfg, kind);
                    EvalRecord rec;
                    if (kind == AgentKind::mindpalace || kind == AgentKind::mindpalace_stopping) {
                        auto res = run_question(q, s->world, palace, *oracle, opts);
                        rec = res.record;
                        CHECK(res.iterations <= opts.max_iterations);
                        long long acts = rec.retrieved_images + rec.explored_viewpoints;
                        CHECK(acts <= action_ceiling(opts, palace.labels().size(), s->world.area_names().size()));
                    } else {
                        rec = run_baseline(kind, q, *s, *oracle, cfg.budgets).record;
                    }
                    CHECK(rec.error.empty());
                    CHECK(rec.retrieved_images <= cfg.budgets.max_retrieved_images);
                    CHECK(rec.explored_viewpoints <= cfg.budgets.max_explored_viewpoints);
                    ++runs;
                }
            }
        }
    }
    CHECK(runs == 4 * 6 * 5 * 15);
}

TEST_CASE("exhausted budgets are reported in the trace") {
    auto s = generated(3, 2);
    ScriptedOracle oracle(s);
    RunOptions opts;
    opts.budgets = {0, 0};
    for (auto& q : s->questions) {
        auto res = run_question(q, s->world, build_palace(*s), oracle, opts);
        CHECK(res.record.retrieved_images == 0);
        CHECK(res.record.explored_viewpoints == 0);
        CHECK_FALSE(res.answer.empty());
    }
}

TEST_CASE("explore_area refuses to start with a spent budget") {
    auto s = generated(4, 1);
    const Question& q = s->questions.front();
    RunOptions opts;
    opts.budgets = {0, 0};
    auto st = make_run_state(q, s->world, build_palace(*s), opts);
    ScriptedOracle oracle(s);
    auto area = s->world.area_names().front();
    CHECK_THROWS_AS(explore_area(st, oracle, "thing", kPresentLabel, area), BudgetError);
    CHECK_THROWS_AS(explore_area(st, oracle, "thing", s->past_labels_recent_first().front(), area), BudgetError);
}

TEST_CASE("run options are validated") {
    auto s = generated(5, 1);
    const Question& q = s->questions.front();
    RunOptions bad;
    bad.depth = 0;
    CHECK_THROWS_AS(make_run_state(q, s->world, build_palace(*s), bad), ValidationError);
    bad = RunOptions{};
    bad.budgets.max_retrieved_images = -1;
    CHECK_THROWS_AS(make_run_state(q, s->world, build_palace(*s), bad), ValidationError);
    Question lost = q;
    lost.start_viewpoint = 10000;
    CHECK_THROWS_AS(make_run_state(lost, s->world, build_palace(*s), RunOptions{}), ValidationError);
}

TEST_CASE("early stopping never costs images and keeps scripted answers") {
    auto s = generated(7, 12);
    RunConfig cfg;
    auto palace = build_palace(*s);
    int fewer = 0;
    for (auto& q : s->questions) {
        auto o1 = make_oracle(cfg, s);
        auto o2 = make_oracle(cfg, s);
        auto base = run_question(q, s->world, palace, *o1, run_options(cfg, AgentKind::mindpalace));
        auto stop = run_question(q, s->world, palace, *o2, run_options(cfg, AgentKind::mindpalace_stopping));
        CHECK(stop.record.retrieved_images <= base.record.retrieved_images);
        CHECK(stop.record.sigma == base.record.sigma);
        for (auto& ev : stop.stops) CHECK(ev.consistent);
        fewer += stop.record.retrieved_images < base.record.retrieved_images ? 1 : 0;
    }
    CHECK(fewer > 0);
}

TEST_CASE("identical runs give identical traces") {
    auto s = generated(11, 2);
    for (auto& q : s->questions) {
        HeuristicOracle a(s->lexicon, s->past_labels_recent_first());
        HeuristicOracle b(s->lexicon, s->past_labels_recent_first());
        auto r1 = run_question(q, s->world, build_palace(*s), a, RunOptions{});
        auto r2 = run_question(q, s->world, build_palace(*s), b, RunOptions{});
        CHECK(r1.trace.records() == r2.trace.records());
        CHECK(r1.answer == r2.answer);
    }
}
