#include <doctest.h>

#include <memory>
#include <set>

#include "mindpalace/error.hpp"
#include "mindpalace/oracle.hpp"
#include "mindpalace/oracle_remote.hpp"
#include "mindpalace/planner.hpp"
#include "support/fake_chat.hpp"

using namespace mindpalace;

namespace {

std::shared_ptr<const Scenario> package_scenario() {
    static auto s = std::make_shared<const Scenario>(load_scenario(MP_TEST_DATA "/example2.json"));
    return s;
}

std::vector<AreaSummary> summaries(const World& world) {
    std::vector<AreaSummary> out;
    for (auto& name : world.area_names()) out.push_back({name, {}, "", world.area_members(name)});
    return out;
}

// Output-shape guarantees every adapter must give, whatever it decides.
void check_contract(Oracle& oracle, const Scenario& s) {
    const Question& q = s.questions.front();
    WorkingMemory wm;
    auto target = oracle.identify_target(q, wm).value;
    CHECK_FALSE(target.empty());
    CHECK(text::word_count(target) <= kMaxTargetWords);

    auto labels = build_palace(s).labels();
    auto plan = oracle.select_world_instances(target, q, labels, wm).value;
    REQUIRE_FALSE(plan.labels.empty());
    std::size_t past = 0;
    for (std::size_t i = 0; i < plan.labels.size(); ++i) {
        CHECK(std::find(labels.begin(), labels.end(), plan.labels[i]) != labels.end());
        if (plan.labels[i] == kPresentLabel) {
            CHECK(i + 1 == plan.labels.size());
        } else {
            ++past;
        }
    }
    CHECK(past <= kMaxPastInstances);

    auto areas = summaries(s.world);
    for (auto& label : labels) {
        auto probs = oracle.area_probabilities(target, q, label, areas, wm).value;
        CHECK(probs.size() <= kMaxAreaCandidates);
        std::set<std::string> names;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            CHECK(probs[i].second >= 0.0);
            CHECK(probs[i].second <= kMaxAreaProbability);
            CHECK(names.insert(probs[i].first).second);
            CHECK(std::any_of(areas.begin(), areas.end(), [&](auto& a) { return a.name == probs[i].first; }));
            if (i) CHECK(probs[i - 1].second >= probs[i].second);
        }
    }

    std::vector<ViewpointSummary> index;
    for (auto& n : s.world.nodes()) index.push_back({n.id, "", {}, 0.0});
    auto vps = oracle.select_viewpoints(target, q, "friday afternoon", index).value;
    CHECK(vps.size() <= kMaxViewpoints);
    CHECK(std::set<int>(vps.begin(), vps.end()).size() == vps.size());

    int sigma = oracle.score(q, q.ground_truth, "Before Thursday afternoon");
    CHECK(sigma >= 1);
    CHECK(sigma <= 5);
    CHECK(oracle.score(q, q.ground_truth, "Before Thursday afternoon") == sigma);
}

}  // namespace

TEST_CASE("scripted oracle honours the contract") {
    auto s = package_scenario();
    ScriptedOracle oracle(s);
    check_contract(oracle, *s);
}

TEST_CASE("heuristic oracle honours the contract") {
    auto s = package_scenario();
    HeuristicOracle oracle(s->lexicon, s->past_labels_recent_first());
    check_contract(oracle, *s);
}

TEST_CASE("remote oracle honours the contract against a local endpoint") {
    auto s = package_scenario();
    int readiness = 0;
    fake_chat::Server server([&](const std::string& p) { return fake_chat::package_agent(p, readiness); });
    RemoteConfig cfg;
    cfg.endpoint = server.endpoint();
    RemoteOracle oracle(cfg, s->past_labels_recent_first());
    check_contract(oracle, *s);
    // The made-up "attic" area was dropped and noted.
    CHECK_FALSE(oracle.warnings().empty());
}

TEST_CASE("a full run over the remote oracle reproduces the package answer") {
    auto s = package_scenario();
    int readiness = 0;
    fake_chat::Server server([&](const std::string& p) { return fake_chat::package_agent(p, readiness); });
    RemoteConfig cfg;
    cfg.endpoint = server.endpoint();
    RemoteOracle oracle(cfg, s->past_labels_recent_first());
    auto res = run_question(s->questions.front(), s->world, build_palace(*s), oracle, RunOptions{});
    CHECK(res.record.error.empty());
    CHECK(res.record.sigma == 5);
    CHECK(res.strategy == "PAST_ONLY");
    CHECK(res.record.p == 0.0);
}

TEST_CASE("remote failures surface as transport and parse errors") {
    auto s = package_scenario();
    const Question& q = s->questions.front();
    WorkingMemory wm;

    SUBCASE("unreachable endpoint") {
        RemoteConfig cfg;
        cfg.endpoint = "http://127.0.0.1:1/v1/chat/completions";
        cfg.timeout_s = 1;
        cfg.max_retries = 0;
        RemoteOracle oracle(cfg);
        CHECK_THROWS_AS(oracle.is_ready_to_answer(q, wm), OracleTransportError);
        auto res = run_question(q, s->world, build_palace(*s), oracle, RunOptions{});
        CHECK(res.record.sigma == 1);
        CHECK(res.record.error.find("transport") != std::string::npos);
    }
    SUBCASE("unparseable replies are retried, then reported") {
        fake_chat::Server server([](const std::string&) { return "no labels here"; });
        RemoteConfig cfg;
        cfg.endpoint = server.endpoint();
        cfg.max_retries = 2;
        RemoteOracle oracle(cfg);
        CHECK_THROWS_AS(oracle.is_ready_to_answer(q, wm), OracleParseError);
        CHECK(server.requests() == 3);
    }
    SUBCASE("https is refused in this build") {
        RemoteConfig cfg;
        cfg.endpoint = "https://example.com/v1/chat/completions";
        CHECK_THROWS_AS(RemoteOracle{cfg}, ValidationError);
    }
}

TEST_CASE("remote config and labeled fields") {
    auto cfg = remote_config_from({{"endpoint", "http://localhost:9/x"}, {"max_retries", "4"}});
    CHECK(cfg.endpoint == "http://localhost:9/x");
    CHECK(cfg.max_retries == 4);
    CHECK_THROWS_AS(remote_config_from({{"colour", "blue"}}), ValidationError);
    CHECK_THROWS_AS(remote_config_from({{"timeout_s", "-1"}}), ValidationError);

    CHECK(labeled_field("Reasoning: x\nReady: Yes", "ready") == std::optional<std::string>("Yes"));
    CHECK(labeled_field("**Answer:** Before noon", "Answer") == std::optional<std::string>("Before noon"));
    CHECK_FALSE(labeled_field("nothing", "Answer").has_value());
}

TEST_CASE("enforcement trims and filters adapter output") {
    Question q;
    q.text = "Where is the red umbrella?";
    CHECK(enforce_target("  one two three four five six seven eight nine ten eleven ", q) ==
          "one two three four five six seven eight nine ten");
    CHECK_FALSE(enforce_target("", q).empty());

    std::vector<std::string> labels{"c", "b", "a", "z", "y", "x", kPresentLabel};
    auto plan = enforce_instances({SearchStrategy::past_then_present, {"now", "a", "a", "zz", "b", "c", "z", "y", "x"}}, labels);
    CHECK(plan.labels == std::vector<std::string>{"a", "b", "c", "z", "y", kPresentLabel});
    auto only_past = enforce_instances({SearchStrategy::past_only, {"now", "a"}}, labels);
    CHECK(only_past.labels == std::vector<std::string>{"a"});
    auto empty = enforce_instances({SearchStrategy::past_only, {"nope"}}, labels);
    CHECK(empty.labels == std::vector<std::string>{"c"});

    std::vector<AreaSummary> areas{{"kitchen", {}, "", {}}, {"hall", {}, "", {}}};
    std::vector<std::string> notes;
    auto probs = enforce_probabilities({{"hall", 2.0}, {"attic", 0.5}, {"kitchen", 0.3}, {"hall", 0.1}}, areas, &notes);
    REQUIRE(probs.size() == 2);
    CHECK(probs[0] == std::make_pair(std::string("hall"), kMaxAreaProbability));
    CHECK(notes.size() == 2);

    std::vector<ViewpointSummary> index{{1, "", {}, 0}, {2, "", {}, 0}};
    CHECK(enforce_viewpoints({2, 2, 7, 1}, index) == std::vector<int>{2, 1});
}

TEST_CASE("key phrase rubric") {
    Question q;
    q.key_phrases = {"kitchen", "hallway"};
    CHECK(key_phrase_score(q, "", "in the kitchen and the hallway") == 5);
    CHECK(key_phrase_score(q, "", "in the kitchen") == 3);
    CHECK(key_phrase_score(q, "", "no idea") == 1);
    CHECK(key_phrase_score(q, "", "") == 1);
}

TEST_CASE("detection noise is a seeded coin") {
    NoiseModel never{0.0, 1};
    NoiseModel always{1.0, 1};
    DetectionContext at{"monday morning", 4};
    CHECK_FALSE(seeded_miss(never, "mug", at));
    CHECK(seeded_miss(always, "mug", at));
    NoiseModel half{0.5, 9};
    CHECK(seeded_miss(half, "mug", at) == seeded_miss(half, "mug", at));
    int misses = 0;
    for (int v = 0; v < 400; ++v) misses += seeded_miss(half, "mug", {"monday morning", v}) ? 1 : 0;
    CHECK(misses > 140);
    CHECK(misses < 260);
}
