#include <doctest.h>

#include <sstream>

#include "mindpalace/error.hpp"
#include "mindpalace/metrics.hpp"
#include "support/fixtures.hpp"

using namespace mindpalace;

TEST_CASE("correctness and efficiency on the hand-computed table") {
    for (auto& c : fixtures::kMetricTable) {
        CAPTURE(c.sigma);
        CAPTURE(c.p);
        CAPTURE(c.l);
        CHECK(correctness(c.sigma) == c.correctness);
        CHECK(exploration_efficiency(c.sigma, c.p, c.l) == c.efficiency);
    }
}

TEST_CASE("no annotated path but the agent moved scores zero efficiency") {
    CHECK(exploration_efficiency(5, 0.0, 0.0) == 100.0);
    CHECK(exploration_efficiency(5, 3.0, 0.0) == 0.0);
}

TEST_CASE("metric inputs are validated") {
    CHECK_THROWS_AS(correctness(0), ValidationError);
    CHECK_THROWS_AS(correctness(6), ValidationError);
    CHECK_THROWS_AS(exploration_efficiency(3, -1.0, 1.0), ValidationError);
    CHECK_THROWS_AS(aggregate({}), ValidationError);
}

TEST_CASE("summary rows render like the results table") {
    SummaryRow row{"x", 3, 65.0, 0.45, 22.857};
    CHECK(render_row(row) == "65.0% | 0.45 | 22.86");
}

TEST_CASE("aggregate averages per record") {
    std::vector<EvalRecord> rs(2);
    rs[0].sigma = 5;
    rs[0].retrieved_images = 10;
    rs[1].sigma = 3;
    rs[1].p = 8.0;
    rs[1].l = 4.0;
    auto row = aggregate(rs, "agent");
    CHECK(row.correctness == 75.0);
    CHECK(row.efficiency == doctest::Approx((1.0 + 0.25) / 2));
    CHECK(row.retrievals == 5.0);
}

TEST_CASE("retrieval count reads retrieve events only") {
    std::vector<nlohmann::json> trace = {{{"event", "retrieve"}}, {{"event", "explore"}}, {{"event", "retrieve"}}, 42};
    CHECK(retrieval_count(trace) == 2);
}

TEST_CASE("results round-trip with nondeterministic fields under timestamp") {
    EvalRecord r;
    r.question_id = "q1";
    r.agent = "mindpalace";
    r.qtype = "past";
    r.sigma = 4;
    r.p = 1.5;
    r.l = 2.0;
    r.retrieved_images = 3;
    r.wall_time = 0.25;
    r.finished_at = "2024-01-01T00:00:00Z";
    auto j = to_json(r);
    CHECK(j.at("timestamp").at("wall_time_s") == 0.25);
    CHECK_FALSE(j.contains("wall_time"));
    std::stringstream ss;
    write_results(ss, {r, r});
    auto back = read_results(ss);
    REQUIRE(back.size() == 2);
    CHECK(back[0].sigma == 4);
    CHECK(back[1].finished_at == r.finished_at);

    std::stringstream bad("{\"agent\": 1}\n");
    CHECK_THROWS_AS(read_results(bad), ValidationError);
    std::stringstream junk("not json\n");
    CHECK_THROWS_AS(read_results(junk), ValidationError);
}
