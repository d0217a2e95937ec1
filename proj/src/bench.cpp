#include "mindpalace/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "mindpalace/error.hpp"

namespace mindpalace {

using nlohmann::json;

namespace {

std::string now_iso() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

struct Baseline {
    const Question& q;
    const Scenario& scenario;
    Oracle& oracle;
    RunContext ctx;
    TraceLog trace;
    WorkingMemory wm;
    std::string target;

    Baseline(const Question& question, const Scenario& s, Oracle& o) : q(question), scenario(s), oracle(o) {
        ctx.position = q.start_viewpoint;
    }

    void look(const std::string& instance, int viewpoint, const Observation& obs, EntryKind kind) {
        bool found = oracle.detect(target, obs, {instance, viewpoint});
        trace.record("detect", {{"target", target}, {"instance", instance}, {"viewpoint", viewpoint}, {"found", found}});
        const auto& area = scenario.world.node(viewpoint).area;
        wm.append({0, kind, instance, viewpoint, area, target, found ? std::optional<Observation>(obs) : std::nullopt,
                   found ? "Object found!" : "Object NOT found!"});
    }

    // Every recorded past frame, oldest episode first, viewpoints ascending.
    std::vector<std::pair<std::string, int>> past_frames() const {
        std::vector<std::pair<std::string, int>> frames;
        const auto& placements = scenario.world.episode_placements();
        for (auto& ep : scenario.episodes) {
            auto it = placements.find(ep.label);
            if (it == placements.end()) continue;
            for (auto& [vp, obs] : it->second) frames.push_back({ep.label, vp});
        }
        return frames;
    }

    void full_retrieval(int budget) {
        auto frames = past_frames();
        std::size_t n = std::min(frames.size(), static_cast<std::size_t>(budget));
        for (std::size_t i = 0; i < n; ++i) {
            // Evenly spaced over the whole memory when it does not fit the budget.
            auto& [label, vp] = frames[i * frames.size() / n];
            auto obs = ctx.retrieve_image(scenario.world, label, vp);
            trace.record("retrieve", {{"instance", label}, {"viewpoint", vp}, {"image_ref", obs.image_ref}});
            look(label, vp, obs, EntryKind::retrieve);
        }
    }

    void socratic_captions() {
        for (auto& [label, vp] : past_frames()) {
            auto obs = retrieve(scenario.world, label, vp);
            Observation text_only = make_observation(obs.caption, {}, "");
            trace.record("caption", {{"instance", label}, {"viewpoint", vp}, {"caption", obs.caption}});
            look(label, vp, text_only, EntryKind::caption);
        }
    }

    void full_exploration(int budget) {
        std::set<int> left;
        for (auto& n : scenario.world.nodes()) left.insert(n.id);
        while (!left.empty() && ctx.explored_viewpoints < budget) {
            int best = -1;
            double best_m = std::numeric_limits<double>::infinity();
            for (int id : left) {
                double m = shortest_path(scenario.world, ctx.position, id).meters;
                if (m < best_m) {
                    best_m = m;
                    best = id;
                }
            }
            left.erase(best);
            auto nav = ctx.navigate_to(scenario.world, best);
            trace.record("explore", {{"viewpoint", best}, {"meters", nav.length}, {"path", nav.path}});
            look(kPresentLabel, best, nav.observation, EntryKind::explore);
        }
    }
};

bool is_planner(AgentKind kind) {
    return kind == AgentKind::mindpalace || kind == AgentKind::mindpalace_stopping;
}

}  // namespace

std::string to_string(AgentKind kind) {
    switch (kind) {
        case AgentKind::mindpalace: return "mindpalace";
        case AgentKind::mindpalace_stopping: return "mindpalace_stopping";
        case AgentKind::full_retrieval: return "full_retrieval";
        case AgentKind::socratic_captions: return "socratic_captions";
        case AgentKind::full_exploration: return "full_exploration";
    }
    return "mindpalace";
}

AgentKind parse_agent(const std::string& name) {
    for (auto k : kAgentKinds) {
        if (to_string(k) == name) return k;
    }
    throw ValidationError("unknown agent \"" + name + "\"");
}

std::string to_string(OracleKind kind) {
    switch (kind) {
        case OracleKind::scripted: return "scripted";
        case OracleKind::heuristic: return "heuristic";
        case OracleKind::remote: return "remote";
    }
    return "scripted";
}

OracleKind parse_oracle(const std::string& name) {
    for (auto k : {OracleKind::scripted, OracleKind::heuristic, OracleKind::remote}) {
        if (to_string(k) == name) return k;
    }
    throw ValidationError("unknown oracle \"" + name + "\" (expected scripted, heuristic or remote)");
}

std::unique_ptr<Oracle> make_oracle(const RunConfig& config, const std::shared_ptr<const Scenario>& scenario) {
    NoiseModel noise{config.miss_rate, config.seed};
    switch (config.oracle) {
        case OracleKind::scripted: return std::make_unique<ScriptedOracle>(scenario, noise);
        case OracleKind::heuristic:
            return std::make_unique<HeuristicOracle>(scenario->lexicon, scenario->past_labels_recent_first(), noise);
        case OracleKind::remote:
            return std::make_unique<RemoteOracle>(config.remote, scenario->past_labels_recent_first());
    }
    throw ValidationError("unknown oracle kind");
}

RunOptions run_options(const RunConfig& config, AgentKind kind) {
    if (config.q <= 0.0 || config.q >= 1.0) throw ValidationError("q must lie strictly between 0 and 1");
    RunOptions o;
    o.budgets = config.budgets;
    o.depth = config.depth;
    o.stopping.enabled = kind == AgentKind::mindpalace_stopping;
    o.stopping.q = config.q;
    o.audit_stopping = o.stopping.enabled && config.audit_stopping;
    return o;
}

BaselineResult run_baseline(AgentKind kind, const Question& q, const Scenario& scenario, Oracle& oracle,
                            const Budgets& budgets) {
    if (is_planner(kind)) throw ValidationError(to_string(kind) + " is not a baseline");
    if (budgets.max_retrieved_images < 0 || budgets.max_explored_viewpoints < 0) {
        throw ValidationError("budgets must be nonnegative");
    }
    if (!scenario.world.has_node(q.start_viewpoint)) {
        throw ValidationError("question " + q.id + " starts at unknown viewpoint " + std::to_string(q.start_viewpoint));
    }
    auto started = std::chrono::steady_clock::now();
    Baseline b(q, scenario, oracle);
    BaselineResult out;
    std::string answer;
    try {
        b.target = oracle.identify_target(q, b.wm).value;
        b.trace.record("target", {{"target", b.target}});
        switch (kind) {
            case AgentKind::full_retrieval: b.full_retrieval(budgets.max_retrieved_images); break;
            case AgentKind::socratic_captions: b.socratic_captions(); break;
            default: b.full_exploration(budgets.max_explored_viewpoints); break;
        }
        auto reply = oracle.answer(q, b.wm);
        answer = text::trim(reply.value).empty() ? kHonestFailure : reply.value;
        b.trace.record("answer", {{"answer", answer}, {"reasoning", reply.reasoning}});
        out.record.sigma = oracle.score(q, q.ground_truth, answer);
    } catch (const OracleTransportError& e) {
        out.record.error = std::string("oracle transport failure: ") + e.what();
    } catch (const OracleParseError& e) {
        out.record.error = std::string("oracle reply could not be parsed: ") + e.what();
    }
    if (!out.record.error.empty()) {
        b.trace.record("error", {{"error", out.record.error}});
        out.record.sigma = 1;
    }
    auto& r = out.record;
    r.question_id = q.id;
    r.agent = to_string(kind);
    r.qtype = to_string(q.qtype);
    r.p = b.ctx.traveled;
    r.l = q.annotated_solution.empty() ? 0.0 : chained_path_length(scenario.world, q.start_viewpoint, q.annotated_solution);
    r.retrieved_images = b.ctx.retrieved_images;
    r.explored_viewpoints = b.ctx.explored_viewpoints;
    r.answer = answer;
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    r.finished_at = now_iso();
    out.trace = std::move(b.trace);
    out.wm = std::move(b.wm);
    return out;
}

SuiteReport run_suite(const RunConfig& config, const std::vector<std::shared_ptr<const Scenario>>& scenarios) {
    if (config.workers < 1) throw ValidationError("workers must be at least 1");
    if (config.agents.empty()) throw ValidationError("no agents selected");
    for (auto kind : config.agents) (void)run_options(config, kind);  // validates q and friends early

    struct Job {
        std::size_t scenario;
        const Question* question;
        AgentKind agent;
    };
    std::vector<Job> jobs;
    std::vector<MindPalace> palaces;
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        palaces.push_back(build_palace(*scenarios[s]));
        for (auto& q : scenarios[s]->questions) {
            for (auto kind : config.agents) jobs.push_back({s, &q, kind});
        }
    }

    SuiteReport report;
    report.runs.resize(jobs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const Job& job = jobs[i];
            const auto& scn = scenarios[job.scenario];
            SuiteRun run;
            try {
                auto oracle = make_oracle(config, scn);
                if (is_planner(job.agent)) {
                    auto res = run_question(*job.question, scn->world, palaces[job.scenario], *oracle,
                                            run_options(config, job.agent), to_string(job.agent));
                    run.record = std::move(res.record);
                    run.trace = res.trace.records();
                    run.stops = std::move(res.stops);
                } else {
                    auto res = run_baseline(job.agent, *job.question, *scn, *oracle, config.budgets);
                    run.record = std::move(res.record);
                    run.trace = res.trace.records();
                }
            } catch (const std::exception& e) {
                // One broken run must not take the suite down.
                run.record.question_id = job.question->id;
                run.record.agent = to_string(job.agent);
                run.record.qtype = to_string(job.question->qtype);
                run.record.sigma = 1;
                run.record.error = e.what();
                run.record.finished_at = now_iso();
                run.trace = {json{{"step", 0}, {"event", "error"}, {"error", e.what()}}};
            }
            report.runs[i] = std::move(run);
        }
    };
    std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(config.workers), std::max<std::size_t>(jobs.size(), 1));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    summarize(report, config.agents);
    return report;
}

void summarize(SuiteReport& report, const std::vector<AgentKind>& agents) {
    report.per_agent.clear();
    report.per_qtype.clear();
    report.paired.clear();
    report.condition1_firings = report.condition2_firings = report.condition2_violations = 0;

    for (auto kind : agents) {
        auto name = to_string(kind);
        std::vector<EvalRecord> mine;
        for (auto& r : report.runs) {
            if (r.record.agent == name) mine.push_back(r.record);
        }
        if (mine.empty()) continue;
        report.per_agent.push_back(aggregate(mine, name));
        auto& rows = report.per_qtype[name];
        for (auto t : kQuestionTypes) {
            std::vector<EvalRecord> sub;
            for (auto& r : mine) {
                if (r.qtype == to_string(t)) sub.push_back(r);
            }
            if (!sub.empty()) rows.push_back(aggregate(sub, to_string(t)));
        }
    }

    std::map<std::string, const EvalRecord*> without;
    for (auto& r : report.runs) {
        if (r.record.agent == to_string(AgentKind::mindpalace)) without[r.record.question_id] = &r.record;
    }
    for (auto& r : report.runs) {
        if (r.record.agent != to_string(AgentKind::mindpalace_stopping)) continue;
        for (auto& ev : r.stops) {
            if (ev.report.condition == StopCondition::singleton) ++report.condition1_firings;
            if (ev.report.condition == StopCondition::invariant_next_area) {
                ++report.condition2_firings;
                if (ev.audited && !ev.consistent) ++report.condition2_violations;
            }
        }
        auto it = without.find(r.record.question_id);
        if (it == without.end()) continue;
        report.paired.push_back({r.record.question_id, r.record.qtype, it->second->retrieved_images,
                                 r.record.retrieved_images, it->second->sigma, r.record.sigma});
    }
}

std::string render_report(const SuiteReport& report) {
    std::ostringstream os;
    os << render_table(report.per_agent, "Agents (correctness | efficiency | retrieved images)") << "\n";
    for (auto& [agent, rows] : report.per_qtype) {
        os << render_table(rows, "By question type: " + agent) << "\n";
    }
    if (!report.paired.empty()) {
        double img0 = 0;
        double img1 = 0;
        double c0 = 0;
        double c1 = 0;
        for (auto& p : report.paired) {
            img0 += p.images_without;
            img1 += p.images_with;
            c0 += correctness(p.sigma_without);
            c1 += correctness(p.sigma_with);
        }
        double n = static_cast<double>(report.paired.size());
        double reduction = img0 > 0 ? 100.0 * (img0 - img1) / img0 : 0.0;
        os << "Early stopping over " << report.paired.size() << " paired questions\n";
        os << "  retrieved images: " << fixed(img0 / n, 2) << " -> " << fixed(img1 / n, 2) << " ("
           << fixed(reduction, 1) << "% fewer)\n";
        os << "  correctness:      " << fixed(c0 / n, 1) << "% -> " << fixed(c1 / n, 1) << "%\n";
    }
    os << "Stops: singleton " << report.condition1_firings << ", invariant next area " << report.condition2_firings
       << " (" << report.condition2_violations << " audit mismatches)\n";
    std::size_t errors = 0;
    for (auto& r : report.runs) errors += r.record.error.empty() ? 0 : 1;
    if (errors) os << "Runs with errors: " << errors << "\n";
    return os.str();
}

void write_suite(const SuiteReport& report, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir / "traces");
    auto open = [](const fs::path& p) {
        std::ofstream f(p);
        if (!f) throw Error("cannot write " + p.string());
        return f;
    };
    {
        auto f = open(out_dir / "results.jsonl");
        for (auto& r : report.runs) f << to_json(r.record).dump() << "\n";
    }
    for (auto& r : report.runs) {
        auto f = open(out_dir / "traces" / (r.record.agent + "__" + r.record.question_id + ".jsonl"));
        for (auto& rec : r.trace) f << rec.dump() << "\n";
    }
    open(out_dir / "summary.txt") << render_report(report);
    auto csv = open(out_dir / "summary.csv");
    std::vector<SummaryRow> rows = report.per_agent;
    for (auto& [agent, sub] : report.per_qtype) {
        for (auto row : sub) {
            row.label = agent + "/" + row.label;
            rows.push_back(row);
        }
    }
    csv << render_csv(rows);
}

}  // namespace mindpalace
