// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: acceptance [path-to-mindpalace-cli]

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "mindpalace/bench.hpp"
#include "mindpalace/error.hpp"
#include "support/brute_force.hpp"
#include "support/fixtures.hpp"

using namespace mindpalace;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::shared_ptr<const Scenario> suite_scenario(std::uint64_t seed) {
    GenSpec spec;
    spec.seed = seed;
    return std::make_shared<const Scenario>(parse_scenario(generate_scenario(spec)));
}

std::string fmt(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

Outcome planner_equivalence() {
    auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(500);
    int mismatches = 0;
    for (int i = 0; i < 500; ++i) {
        auto in = fixtures::random_instance(rng);
        auto want = bf::solve(in);
        auto got = fixtures::plan(in);
        if (got.sequence != want.sequence || !bf::close(got.expected_cost, want.cost)) ++mismatches;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {mismatches == 0 && secs < 10.0,
            std::to_string(mismatches) + " mismatches over 500 instances in " + fmt(secs, 3) + " s"};
}

Outcome metric_exactness() {
    int wrong = 0;
    for (auto& c : fixtures::kMetricTable) {
        if (correctness(c.sigma) != c.correctness || exploration_efficiency(c.sigma, c.p, c.l) != c.efficiency) ++wrong;
    }
    bool edges = exploration_efficiency(5, 0.0, 0.0) == 100.0 && exploration_efficiency(5, 1.0, 0.0) == 0.0;
    return {wrong == 0 && edges && fixtures::kMetricTable.size() == 12,
            std::to_string(fixtures::kMetricTable.size() - static_cast<std::size_t>(wrong)) + "/12 table rows exact"};
}

Outcome package_walkthrough() {
    auto s = std::make_shared<const Scenario>(load_scenario(MP_TEST_DATA "/example2.json"));
    ScriptedOracle oracle(s);
    auto res = run_question(s->questions.front(), s->world, build_palace(*s), oracle, RunOptions{});
    std::vector<std::string> order;
    std::vector<bool> found;
    for (auto& r : res.instances) {
        order.push_back(r.instance);
        found.push_back(r.found);
    }
    bool ok = res.strategy == "PAST_ONLY" &&
              order == std::vector<std::string>{"friday afternoon", "thursday afternoon", "wednesday afternoon"} &&
              found == std::vector<bool>{true, true, false} && res.record.sigma == 5 && res.record.p == 0.0;
    std::string detections;
    for (bool f : found) detections += f ? "T" : "F";
    return {ok, "strategy " + res.strategy + ", detections " + detections + ", sigma " +
                    std::to_string(res.record.sigma) + ", p " + fmt(res.record.p) + " m"};
}

Outcome stopping_dominance(const SuiteReport& scripted) {
    std::size_t worse = 0;
    double img0 = 0;
    double img1 = 0;
    double c0 = 0;
    double c1 = 0;
    for (auto& p : scripted.paired) {
        worse += p.images_with > p.images_without ? 1 : 0;
        img0 += p.images_without;
        img1 += p.images_with;
        c0 += correctness(p.sigma_without);
        c1 += correctness(p.sigma_with);
    }
    double n = static_cast<double>(scripted.paired.size());
    double drop = n > 0 ? (c0 - c1) / n : 0.0;
    bool ok = scripted.paired.size() >= 50 && worse == 0 && drop <= 5.0;
    return {ok, std::to_string(scripted.paired.size()) + " questions, images " + fmt(img0 / n) + " -> " +
                    fmt(img1 / n) + ", " + std::to_string(worse) + " with more images, correctness drop " +
                    fmt(drop, 1) + " pp"};
}

Outcome condition2_soundness(const SuiteReport& scripted) {
    bool ok = scripted.condition2_violations == 0 && scripted.condition2_firings > 0;
    return {ok, std::to_string(scripted.condition2_firings) + " invariant-next-area stops, " +
                    std::to_string(scripted.condition2_violations) + " shadow mismatches"};
}

Outcome heuristic_ordering() {
    int held = 0;
    std::string detail;
    for (std::uint64_t seed : {7, 8, 9}) {
        RunConfig cfg;
        cfg.oracle = OracleKind::heuristic;
        cfg.seed = seed;
        cfg.workers = 4;
        auto rep = run_suite(cfg, {suite_scenario(seed)});
        std::map<std::string, SummaryRow> rows;
        for (auto& r : rep.per_agent) rows[r.label] = r;
        const auto& mp = rows.at("mindpalace");
        bool a = mp.correctness >= rows.at("full_retrieval").correctness &&
                 mp.correctness >= rows.at("socratic_captions").correctness &&
                 mp.correctness >= rows.at("full_exploration").correctness;
        bool b = mp.efficiency >= rows.at("full_exploration").efficiency;
        bool c = mp.retrievals <= 0.25 * cfg.budgets.max_retrieved_images;
        held += (a && b && c) ? 1 : 0;
        detail += (detail.empty() ? "" : "; ") + std::string("seed ") + std::to_string(seed) + " C " +
                  fmt(mp.correctness, 1) + "% E " + fmt(mp.efficiency) + " images " + fmt(mp.retrievals);
    }
    return {held == 3, std::to_string(held) + "/3 replications ordered (" + detail + ")"};
}

Outcome budget_enforcement() {
    std::mt19937_64 rng(685);
    std::uniform_int_distribution<int> images(0, 100);
    std::uniform_int_distribution<int> views(0, 25);
    std::uniform_int_distribution<int> depth(1, 3);
    int runs = 0;
    int violations = 0;
    for (std::uint64_t seed = 20; seed < 24; ++seed) {
        GenSpec spec;
        spec.seed = seed;
        spec.questions_per_type = 4;
        auto s = std::make_shared<const Scenario>(parse_scenario(generate_scenario(spec)));
        auto palace = build_palace(*s);
        for (int trial = 0; trial < 5; ++trial) {
            RunConfig cfg;
            cfg.oracle = trial % 2 ? OracleKind::heuristic : OracleKind::scripted;
            cfg.budgets = {trial == 0 ? 100 : images(rng) / 8, trial == 0 ? 25 : views(rng) / 4};
            cfg.depth = depth(rng);
            cfg.miss_rate = trial == 3 ? 0.3 : 0.0;
            for (auto kind : kAgentKinds) {
                for (auto& q : s->questions) {
                    auto oracle = make_oracle(cfg, s);
                    EvalRecord rec;
                    bool bounded = true;
                    if (kind == AgentKind::mindpalace || kind == AgentKind::mindpalace_stopping) {
                        auto opts = run_options(cfg, kind);
                        auto res = run_question(q, s->world, palace, *oracle, opts);
                        rec = res.record;
                        long long acts = rec.retrieved_images + rec.explored_viewpoints;
                        bounded = res.iterations <= opts.max_iterations &&
                                  acts <= action_ceiling(opts, palace.labels().size(), s->world.area_names().size());
                    } else {
                        rec = run_baseline(kind, q, *s, *oracle, cfg.budgets).record;
                    }
                    if (!bounded || rec.retrieved_images > cfg.budgets.max_retrieved_images ||
                        rec.explored_viewpoints > cfg.budgets.max_explored_viewpoints) {
                        ++violations;
                    }
                    ++runs;
                }
            }
        }
    }
    return {violations == 0, std::to_string(violations) + " violations over " + std::to_string(runs) + " runs"};
}

std::string strip_timestamps(const std::filesystem::path& results) {
    std::ifstream in(results);
    std::string line;
    std::string out;
    while (std::getline(in, line)) {
        auto j = json::parse(line);
        j.erase("timestamp");
        out += j.dump() + "\n";
    }
    return out;
}

Outcome determinism(const std::string& cli) {
    namespace fs = std::filesystem;
    auto root = fs::temp_directory_path() / ("mindpalace_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    std::string a;
    std::string b;
    if (!cli.empty()) {
        for (const char* run : {"a", "b"}) {
            std::string cmd = "\"" + cli + "\" suite --generate 7 --seed 7 --oracle scripted --workers 4 --out \"" +
                              (root / run).string() + "\" > /dev/null";
            if (std::system(cmd.c_str()) != 0) return {false, "suite command failed: " + cmd};
        }
        a = strip_timestamps(root / "a" / "results.jsonl");
        b = strip_timestamps(root / "b" / "results.jsonl");
    } else {
        RunConfig cfg;
        auto s = suite_scenario(7);
        write_suite(run_suite(cfg, {s}), root / "a");
        cfg.workers = 4;
        write_suite(run_suite(cfg, {s}), root / "b");
        a = strip_timestamps(root / "a" / "results.jsonl");
        b = strip_timestamps(root / "b" / "results.jsonl");
    }
    fs::remove_all(root);
    std::size_t lines = static_cast<std::size_t>(std::count(a.begin(), a.end(), '\n'));
    return {!a.empty() && a == b, std::to_string(lines) + " result lines, " + (a == b ? "identical" : "different") +
                                      (cli.empty() ? " (in-process)" : " (cli)")};
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli = argc > 1 ? argv[1] : "";

    RunConfig scripted_cfg;
    scripted_cfg.workers = 4;
    SuiteReport scripted;
    bool suite_ok = true;
    std::string suite_error;
    try {
        scripted = run_suite(scripted_cfg, {suite_scenario(7)});
    } catch (const std::exception& e) {
        suite_ok = false;
        suite_error = e.what();
    }

    std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
        {"planner_oracle_equivalence", planner_equivalence},
        {"metric_exactness", metric_exactness},
        {"package_walkthrough", package_walkthrough},
        {"voi_stopping_dominance", [&] { return stopping_dominance(scripted); }},
        {"condition2_soundness", [&] { return condition2_soundness(scripted); }},
        {"heuristic_ordering", heuristic_ordering},
        {"budget_enforcement", budget_enforcement},
        {"determinism", [&] { return determinism(cli); }},
    };

    int failed = 0;
    for (auto& [name, check] : checks) {
        Outcome o;
        bool needs_suite = name == "voi_stopping_dominance" || name == "condition2_soundness";
        if (needs_suite && !suite_ok) {
            o = {false, "scripted suite failed: " + suite_error};
        } else {
            try {
                o = check();
            } catch (const std::exception& e) {
                o = {false, std::string("exception: ") + e.what()};
            }
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
