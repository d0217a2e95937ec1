#include "mindpalace/scenario.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mindpalace/error.hpp"

namespace mindpalace {

using nlohmann::json;

std::string to_string(SearchStrategy s) {
    switch (s) {
        case SearchStrategy::past_only: return "PAST_ONLY";
        case SearchStrategy::present_only: return "PRESENT_ONLY";
        case SearchStrategy::past_then_present: return "PAST_THEN_PRESENT";
        case SearchStrategy::multi_past_and_present: return "MULTI_PAST_AND_PRESENT";
    }
    return "PAST_ONLY";
}

SearchStrategy parse_strategy(std::string_view s) {
    std::string key = text::normalize(s);
    if (key == "past only") return SearchStrategy::past_only;
    if (key == "present only") return SearchStrategy::present_only;
    if (key == "past then present") return SearchStrategy::past_then_present;
    if (key == "multi past and present") return SearchStrategy::multi_past_and_present;
    throw ValidationError("unknown search strategy '" + std::string(s) + "'");
}

std::string to_string(QuestionType t) {
    switch (t) {
        case QuestionType::past: return "past";
        case QuestionType::present: return "present";
        case QuestionType::multi_past: return "multi_past";
        case QuestionType::past_present: return "past_present";
        case QuestionType::past_present_future: return "past_present_future";
    }
    return "past";
}

QuestionType parse_question_type(std::string_view s) {
    for (auto t : kQuestionTypes)
        if (to_string(t) == s) return t;
    throw ValidationError("unknown question type '" + std::string(s) + "'");
}

const Question& Scenario::question(const std::string& id) const {
    for (auto& q : questions)
        if (q.id == id) return q;
    throw ValidationError("unknown question '" + id + "'");
}

std::vector<std::string> Scenario::past_labels_recent_first() const {
    std::vector<std::string> out;
    for (auto it = episodes.rbegin(); it != episodes.rend(); ++it) out.push_back(it->label);
    return out;
}

void to_json(json& j, const Question& q) {
    json evidence = json::array();
    for (auto& e : q.evidence) {
        evidence.push_back({{"episode", e.episode}, {"viewpoint", e.viewpoint}, {"present", e.present}});
    }
    j = {{"id", q.id},
         {"text", q.text},
         {"type", to_string(q.qtype)},
         {"ground_truth", q.ground_truth},
         {"key_phrases", q.key_phrases},
         {"targets", q.targets},
         {"evidence", evidence},
         {"annotated_solution", q.annotated_solution},
         {"start_viewpoint", q.start_viewpoint}};
    if (q.strategy) j["strategy"] = to_string(*q.strategy);
    if (!q.instances.empty()) j["instances"] = q.instances;
    if (!q.answer_template.empty()) j["answer_template"] = q.answer_template;
}

void from_json(const json& j, Question& q) {
    q.id = j.at("id").get<std::string>();
    q.text = j.at("text").get<std::string>();
    q.qtype = parse_question_type(j.at("type").get<std::string>());
    q.ground_truth = j.at("ground_truth").get<std::string>();
    q.key_phrases = j.value("key_phrases", std::vector<std::string>{});
    q.targets = j.value("targets", std::vector<std::string>{});
    q.evidence.clear();
    for (auto& e : j.value("evidence", json::array())) {
        q.evidence.push_back(Evidence{e.at("episode").get<std::string>(), e.at("viewpoint").get<int>(),
                                      e.value("present", true)});
    }
    q.annotated_solution = j.value("annotated_solution", std::vector<int>{});
    q.start_viewpoint = j.at("start_viewpoint").get<int>();
    q.strategy.reset();
    if (j.contains("strategy")) q.strategy = parse_strategy(j.at("strategy").get<std::string>());
    q.instances = j.value("instances", std::vector<std::string>{});
    q.answer_template = j.value("answer_template", std::string{});
}

namespace {

GraphConfig parse_graph_config(const json& j) {
    GraphConfig c;
    if (j.is_null()) return c;
    c.stride = j.value("stride", c.stride);
    c.dedup_radius = j.value("dedup_radius", c.dedup_radius);
    std::string mode = j.value("mode", std::string("labeled"));
    if (mode == "labeled") {
        c.mode = ClusterMode::labeled;
    } else if (mode == "spatial") {
        c.mode = ClusterMode::spatial;
    } else {
        throw ValidationError("memory.mode must be 'labeled' or 'spatial'");
    }
    c.cluster_radius = j.value("cluster_radius", c.cluster_radius);
    c.adjacency_radius = j.value("adjacency_radius", c.adjacency_radius);
    for (auto& link : j.value("links", json::array())) {
        c.links.emplace_back(link.at(0).get<std::string>(), link.at(1).get<std::string>());
    }
    return c;
}

json graph_config_to_json(const GraphConfig& c) {
    json links = json::array();
    for (auto& [a, b] : c.links) links.push_back({a, b});
    return {{"stride", c.stride},
            {"dedup_radius", c.dedup_radius},
            {"mode", c.mode == ClusterMode::labeled ? "labeled" : "spatial"},
            {"cluster_radius", c.cluster_radius},
            {"adjacency_radius", c.adjacency_radius},
            {"links", links}};
}

Observation observation_of(const json& j) {
    return make_observation(j.value("caption", std::string{}), j.value("objects", std::vector<std::string>{}),
                            j.value("image_ref", std::string{}));
}

// Builds everything, throwing on the first structural problem.
Scenario build(const json& doc) {
    Scenario s;
    s.name = doc.value("name", std::string("scenario"));
    s.seed = doc.value("seed", std::uint64_t{0});
    s.graph = parse_graph_config(doc.value("memory", json()));

    std::map<std::string, std::vector<std::string>> synonyms;
    const json synonym_doc = doc.value("synonyms", json::object());
    for (auto& [key, value] : synonym_doc.items()) {
        synonyms[key] = value.get<std::vector<std::string>>();
    }
    s.lexicon = text::Lexicon(std::move(synonyms));

    const json& w = doc.at("world");
    std::vector<WorldNode> nodes;
    for (auto& n : w.at("viewpoints")) {
        nodes.push_back(WorldNode{n.at("id").get<int>(), n.at("pose").get<Pose>(), n.at("area").get<std::string>()});
    }
    std::vector<WorldEdge> edges;
    for (auto& e : w.at("edges")) {
        edges.push_back(WorldEdge{e.at("from").get<int>(), e.at("to").get<int>(), e.at("meters").get<double>()});
    }
    Placements present;
    for (auto& p : w.value("present", json::array())) present[p.at("viewpoint").get<int>()] = observation_of(p);

    std::map<std::string, Placements> episode_placements;
    std::set<std::string> labels;
    for (auto& e : doc.at("episodes")) {
        EpisodeMemory ep;
        ep.label = e.at("label").get<std::string>();
        if (ep.label.empty() || ep.label == kPresentLabel || !labels.insert(ep.label).second) {
            throw ValidationError("episode label '" + ep.label + "' is empty, reserved or duplicated");
        }
        auto& placements = episode_placements[ep.label];
        for (auto& smp : e.at("samples")) {
            TrajectorySample sample;
            sample.pose = smp.at("pose").get<Pose>();
            sample.observation = observation_of(smp);
            sample.area = smp.value("area", std::string{});
            if (smp.contains("viewpoint")) {
                sample.viewpoint = smp.at("viewpoint").get<int>();
                placements[*sample.viewpoint] = sample.observation;
            }
            ep.samples.push_back(std::move(sample));
        }
        if (ep.samples.empty()) throw ValidationError("episode '" + ep.label + "' has no samples");
        s.episodes.push_back(std::move(ep));
    }
    if (s.episodes.empty()) throw ValidationError("scenario needs at least one episode");

    std::map<std::string, GroundTruth> truth;
    std::set<std::string> qids;
    for (auto& qj : doc.value("questions", json::array())) {
        auto q = qj.get<Question>();
        if (!qids.insert(q.id).second) throw ValidationError("duplicate question id '" + q.id + "'");
        truth[q.id] = GroundTruth{q.ground_truth, q.annotated_solution};
        s.questions.push_back(std::move(q));
    }

    s.world = World(std::move(nodes), std::move(edges), std::move(episode_placements), std::move(present),
                    std::move(truth));

    for (auto& q : s.questions) {
        if (!s.world.has_node(q.start_viewpoint)) {
            throw ValidationError("question " + q.id + ": unknown start_viewpoint");
        }
        for (auto& ev : q.evidence) {
            bool ok = ev.episode == kPresentLabel
                          ? s.world.has_node(ev.viewpoint)
                          : (labels.count(ev.episode) &&
                             s.world.episode_placements().at(ev.episode).count(ev.viewpoint));
            if (!ok) {
                throw ValidationError("question " + q.id + ": evidence (" + ev.episode + ", " +
                                      std::to_string(ev.viewpoint) + ") does not exist");
            }
        }
        for (auto& inst : q.instances) {
            if (inst != kPresentLabel && !labels.count(inst)) {
                throw ValidationError("question " + q.id + ": unknown instance '" + inst + "'");
            }
        }
    }
    return s;
}

}  // namespace

std::vector<std::string> validate_scenario(const json& doc) {
    std::vector<std::string> problems;
    if (!doc.is_object()) return {"scenario must be a JSON object"};
    for (const char* key : {"world", "episodes"}) {
        if (!doc.contains(key)) problems.push_back(std::string("missing \"") + key + "\"");
    }
    if (!problems.empty()) return problems;
    try {
        build(doc);
    } catch (const ValidationError& e) {
        problems.push_back(e.what());
    } catch (const json::exception& e) {
        problems.push_back(std::string("schema: ") + e.what());
    }
    return problems;
}

Scenario parse_scenario(const json& doc) {
    auto problems = validate_scenario(doc);
    if (!problems.empty()) {
        std::string msg = "invalid scenario:";
        for (auto& p : problems) msg += "\n  " + p;
        throw ValidationError(msg);
    }
    return build(doc);
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("scenario " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_scenario(doc);
}

json scenario_to_json(const Scenario& s) {
    json viewpoints = json::array();
    for (auto& n : s.world.nodes()) viewpoints.push_back({{"id", n.id}, {"pose", n.pose}, {"area", n.area}});
    json edges = json::array();
    for (auto& e : s.world.edges()) edges.push_back({{"from", e.from}, {"to", e.to}, {"meters", e.meters}});
    json present = json::array();
    for (auto& [id, obs] : s.world.present_placements()) {
        json p = obs;
        p["viewpoint"] = id;
        present.push_back(std::move(p));
    }
    json episodes = json::array();
    for (auto& ep : s.episodes) {
        json samples = json::array();
        for (auto& smp : ep.samples) {
            json j = smp.observation;
            j["pose"] = smp.pose;
            j["area"] = smp.area;
            if (smp.viewpoint) j["viewpoint"] = *smp.viewpoint;
            samples.push_back(std::move(j));
        }
        episodes.push_back({{"label", ep.label}, {"samples", std::move(samples)}});
    }
    return {{"name", s.name},
            {"seed", s.seed},
            {"memory", graph_config_to_json(s.graph)},
            {"synonyms", s.lexicon.entries()},
            {"world", {{"viewpoints", viewpoints}, {"edges", edges}, {"present", present}}},
            {"episodes", episodes},
            {"questions", s.questions}};
}

}  // namespace mindpalace
