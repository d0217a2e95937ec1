#include <doctest.h>

#include "mindpalace/error.hpp"
#include "mindpalace/memory.hpp"
#include "mindpalace/planner.hpp"
#include "mindpalace/scenario.hpp"
#include "mindpalace/worldsim.hpp"

using namespace mindpalace;
using nlohmann::json;

namespace {

TrajectorySample sample(double x, std::string area, std::optional<int> vp, std::vector<std::string> objects = {}) {
    return {make_pose(x, 0.0, 0), make_observation("", objects), std::move(area), vp};
}

EpisodeMemory corridor(const std::string& label) {
    EpisodeMemory ep{label, {}};
    int id = 0;
    for (const char* area : {"hall", "hall", "den", "den"}) {
        double x = id * 3.0;
        ep.samples.push_back(sample(x, area, id, {std::string(area) + " lamp"}));
        ep.samples.push_back(sample(x + 0.5, area, std::nullopt));
        ep.samples.push_back(sample(x + 1.0, area, std::nullopt));
        ++id;
    }
    return ep;
}

World square() {
    // 0 - 1 - 3 and 0 - 2 - 3 with equal weights: ties must resolve to the smaller id sequence.
    std::vector<WorldNode> nodes{{0, make_pose(0, 0, 0), "a"}, {1, make_pose(1, 0, 0), "a"},
                                 {2, make_pose(0, 1, 0), "b"}, {3, make_pose(1, 1, 0), "b"}};
    std::vector<WorldEdge> edges{{0, 1, 1.0}, {1, 3, 1.0}, {0, 2, 1.0}, {2, 3, 1.0}};
    Placements now{{3, make_observation("mug on table", {"mug"})}};
    std::map<std::string, Placements> past{{"monday morning", {{1, make_observation("mug", {"Mug "})}}}};
    return World(nodes, edges, past, now);
}

}  // namespace

TEST_CASE("poses wrap headings and reject bad floors") {
    CHECK(make_pose(0, 0, 0, -std::numbers::pi / 2).heading == doctest::Approx(1.5 * std::numbers::pi));
    CHECK_THROWS_AS(make_pose(0, 0, -1), ValidationError);
    CHECK_THROWS_AS(make_pose(std::nan(""), 0, 0), ValidationError);
    CHECK(make_observation("", {" Cup", "cup"}).objects == std::set<std::string>{"cup"});
    CHECK_THROWS_AS(make_observation("", {" "}), ValidationError);
}

TEST_CASE("stride sampling keeps every third sample and drops stationary repeats") {
    auto ep = corridor("monday morning");
    auto kept = sample_viewpoints(ep, 3, 0.25);
    REQUIRE(kept.size() == 4);
    for (std::size_t i = 0; i < kept.size(); ++i) CHECK(kept[i].viewpoint == static_cast<int>(i));

    EpisodeMemory still{"x", {sample(0, "a", 0), sample(0.1, "a", 1), sample(5, "a", 2)}};
    CHECK(sample_viewpoints(still, 1, 0.25).size() == 2);
    CHECK(sample_viewpoints(still, 1, 0.0).size() == 3);
    CHECK_THROWS_AS(sample_viewpoints(still, 0, 0.25), ValidationError);
}

TEST_CASE("scene graphs group viewpoints into areas with object unions") {
    GraphConfig cfg;
    cfg.adjacency_radius = 6.5;  // centroids sit 6 m apart
    auto g = build_scene_graph(corridor("monday morning"), cfg);
    REQUIRE(g.areas.size() == 2);
    const AreaNode* hall = g.find_area("hall");
    REQUIRE(hall);
    CHECK(hall->viewpoint_ids == std::vector<int>{0, 1});
    CHECK(hall->object_union.count("hall lamp") == 1);
    CHECK(g.adjacent(g.find_area("hall")->id, g.find_area("den")->id));
    CHECK_NOTHROW(g.validate());
    cfg.adjacency_radius = 5.0;
    auto apart = build_scene_graph(corridor("monday morning"), cfg);
    CHECK_FALSE(apart.adjacent(apart.find_area("hall")->id, apart.find_area("den")->id));
}

TEST_CASE("the palace stores past graphs most recent first and an empty present") {
    GraphConfig cfg;
    auto palace = build_mind_palace({corridor("monday morning"), corridor("tuesday morning")}, cfg);
    CHECK(palace.labels() == std::vector<std::string>{"tuesday morning", "monday morning", kPresentLabel});
    CHECK(palace.present.viewpoints.empty());
    CHECK(palace.present.areas.size() == 2);
    CHECK(palace.find("monday morning") == &palace.past[1]);
    CHECK(palace.find("someday") == nullptr);

    auto area = palace.present.find_area("den")->id;
    auto grown = update_present(palace, ViewpointNode{7, make_pose(9, 0, 0), make_observation("", {"cat"}), area});
    CHECK(grown.present.find_area("den")->object_union.count("cat") == 1);
    CHECK_THROWS_AS(update_present(grown, ViewpointNode{7, make_pose(9, 0, 0), {}, area}), ValidationError);

    CHECK_THROWS_AS(build_mind_palace({corridor("now")}, cfg), ValidationError);
    CHECK_THROWS_AS(build_mind_palace({corridor("a"), corridor("a")}, cfg), ValidationError);
}

TEST_CASE("palace serialization round-trips") {
    auto palace = build_mind_palace({corridor("monday morning")}, GraphConfig{});
    auto doc = serialize_palace(palace);
    CHECK(deserialize_palace(doc) == palace);
    doc["schema"] = 99;
    CHECK_THROWS_AS(deserialize_palace(doc), ValidationError);
}

TEST_CASE("shortest paths break ties by smallest id sequence") {
    auto w = square();
    auto p = shortest_path(w, 0, 3);
    CHECK(p.path == std::vector<int>{0, 1, 3});
    CHECK(p.meters == 2.0);
    CHECK(chained_path_length(w, 0, {3, 0}) == 4.0);
    CHECK(area_centroid_distance(w, 0, "a") == 0.0);
    CHECK(area_centroid_distance(w, 0, "b") == 1.0);
}

TEST_CASE("navigation and retrieval charge the run context") {
    auto w = square();
    RunContext ctx;
    auto nav = ctx.navigate_to(w, 3);
    CHECK(nav.observation.objects.count("mug") == 1);
    CHECK(ctx.traveled == 2.0);
    CHECK(ctx.explored_viewpoints == 1);
    auto img = ctx.retrieve_image(w, "monday morning", 1);
    CHECK(img.objects.count("mug") == 1);
    CHECK(ctx.retrieved_images == 1);
    CHECK_THROWS_AS(ctx.retrieve_image(w, "friday", 1), ValidationError);
    CHECK_THROWS_AS(ctx.retrieve_image(w, "monday morning", 2), ValidationError);
    CHECK_THROWS_AS(navigate(w, 0, 42), ValidationError);
}

TEST_CASE("worlds reject broken maps") {
    std::vector<WorldNode> nodes{{0, make_pose(0, 0, 0), "a"}, {1, make_pose(5, 0, 0), "a"}};
    CHECK_THROWS_AS(World(nodes, {}, {}, {}), ValidationError);  // floor not connected
    CHECK_THROWS_AS(World(nodes, {{0, 1, 0.0}}, {}, {}), ValidationError);
    CHECK_THROWS_AS(World(nodes, {{0, 9, 1.0}}, {}, {}), ValidationError);
    CHECK_NOTHROW(World(nodes, {{0, 1, 5.0}}, {}, {}));
}

TEST_CASE("scenarios load, validate and round-trip") {
    auto s = load_scenario(MP_TEST_DATA "/example2.json");
    CHECK(s.past_labels_recent_first() ==
          std::vector<std::string>{"friday afternoon", "thursday afternoon", "wednesday afternoon"});
    CHECK(s.question("package-delivery").strategy == SearchStrategy::past_only);
    CHECK_THROWS_AS(s.question("nope"), ValidationError);
    auto again = parse_scenario(scenario_to_json(s));
    CHECK(again.questions.size() == 1);
    CHECK(again.world.nodes().size() == s.world.nodes().size());

    auto doc = scenario_to_json(s);
    doc["episodes"][0]["label"] = "now";
    CHECK_FALSE(validate_scenario(doc).empty());
    CHECK(validate_scenario(json::array()).size() == 1);
    CHECK(validate_scenario(json::object()).size() == 2);
    CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ValidationError);

    CHECK(parse_strategy("PAST ONLY") == SearchStrategy::past_only);
    CHECK(parse_strategy("multi_past_and_present") == SearchStrategy::multi_past_and_present);
    CHECK_THROWS_AS(parse_strategy("sometimes"), ValidationError);
}

TEST_CASE("present layout follows the world areas") {
    auto s = load_scenario(MP_TEST_DATA "/example2.json");
    auto areas = present_layout(s.world);
    REQUIRE(areas.size() == 5);
    CHECK(areas[0].name == "main entrance");
    CHECK(areas[0].id == 0);
    auto palace = build_palace(s);
    CHECK(palace.present.areas.size() == 5);
    CHECK(palace.past.front().label == "friday afternoon");
}
