#include "mindpalace/memory.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "mindpalace/error.hpp"
#include "mindpalace/text.hpp"

namespace mindpalace {

Pose make_pose(double x, double y, int floor, double heading) {
    if (floor < 0) throw ValidationError("pose floor must be >= 0");
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(heading)) {
        throw ValidationError("pose coordinates must be finite");
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double h = std::fmod(heading, two_pi);
    if (h < 0.0) h += two_pi;
    if (h >= two_pi) h = 0.0;
    return Pose{x, y, floor, h};
}

double planar_distance(const Pose& a, const Pose& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

Observation make_observation(std::string caption, const std::vector<std::string>& objects,
                             std::string image_ref) {
    Observation obs;
    obs.caption = std::move(caption);
    obs.image_ref = std::move(image_ref);
    for (auto& label : objects) {
        auto clean = text::to_lower(text::trim(label));
        if (clean.empty()) throw ValidationError("object labels must be nonempty");
        obs.objects.insert(std::move(clean));
    }
    return obs;
}

// ---------------------------------------------------------------------------

const AreaNode* SceneGraph::find_area(int id) const {
    for (auto& a : areas)
        if (a.id == id) return &a;
    return nullptr;
}

const AreaNode* SceneGraph::find_area(const std::string& name) const {
    for (auto& a : areas)
        if (a.name == name) return &a;
    return nullptr;
}

const ViewpointNode* SceneGraph::find_viewpoint(int id) const {
    for (auto& v : viewpoints)
        if (v.id == id) return &v;
    return nullptr;
}

std::vector<const ViewpointNode*> SceneGraph::viewpoints_in(int area_id) const {
    std::vector<const ViewpointNode*> out;
    for (auto& v : viewpoints)
        if (v.area_id == area_id) out.push_back(&v);
    return out;
}

std::vector<int> SceneGraph::neighbors(int area_id) const {
    std::vector<int> out;
    for (auto [a, b] : area_edges) {
        if (a == area_id) out.push_back(b);
        if (b == area_id) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool SceneGraph::adjacent(int a, int b) const {
    auto key = std::minmax(a, b);
    return std::find(area_edges.begin(), area_edges.end(), std::pair<int, int>(key.first, key.second)) !=
           area_edges.end();
}

void SceneGraph::validate() const {
    if (areas.empty()) throw ValidationError("scene graph '" + label + "' has no areas");
    if (!is_present && viewpoints.empty()) {
        throw ValidationError("past scene graph '" + label + "' has no viewpoints");
    }
    std::set<int> area_ids;
    for (auto& a : areas) {
        if (!area_ids.insert(a.id).second) throw ValidationError("duplicate area id in '" + label + "'");
    }
    std::set<int> vp_ids;
    std::map<int, std::set<std::string>> objects;
    for (auto& v : viewpoints) {
        if (!vp_ids.insert(v.id).second) throw ValidationError("duplicate viewpoint id in '" + label + "'");
        if (!area_ids.count(v.area_id)) {
            throw ValidationError("viewpoint " + std::to_string(v.id) + " references unknown area");
        }
        objects[v.area_id].insert(v.observation.objects.begin(), v.observation.objects.end());
    }
    for (auto& a : areas) {
        for (int id : a.viewpoint_ids) {
            auto* v = find_viewpoint(id);
            if (!v || v->area_id != a.id) {
                throw ValidationError("area '" + a.name + "' lists viewpoint " + std::to_string(id) +
                                      " it does not own");
            }
        }
        if (a.object_union != objects[a.id]) {
            throw ValidationError("area '" + a.name + "' object union is stale");
        }
    }
    for (auto [a, b] : area_edges) {
        if (a >= b || !area_ids.count(a) || !area_ids.count(b)) {
            throw ValidationError("malformed area edge in '" + label + "'");
        }
    }
}

const SceneGraph* MindPalace::find(const std::string& label) const {
    if (label == kPresentLabel) return &present;
    for (auto& g : past)
        if (g.label == label) return &g;
    return nullptr;
}

std::vector<std::string> MindPalace::labels() const {
    std::vector<std::string> out;
    for (auto& g : past) out.push_back(g.label);
    out.push_back(kPresentLabel);
    return out;
}

void MindPalace::validate() const {
    if (!present.is_present) throw ValidationError("present graph must be flagged is_present");
    present.validate();
    std::set<std::string> seen;
    for (auto& g : past) {
        if (g.is_present) throw ValidationError("past graph '" + g.label + "' flagged as present");
        if (g.label == kPresentLabel || !seen.insert(g.label).second) {
            throw ValidationError("duplicate world instance label '" + g.label + "'");
        }
        g.validate();
    }
}

// ---------------------------------------------------------------------------

std::vector<TrajectorySample> sample_viewpoints(const EpisodeMemory& episode, int stride,
                                                double dedup_radius) {
    if (episode.samples.empty()) throw ValidationError("empty episode");
    if (stride < 1) throw ValidationError("stride must be >= 1");
    if (dedup_radius < 0.0) throw ValidationError("dedup radius must be >= 0");

    std::vector<TrajectorySample> out;
    for (std::size_t i = 0; i < episode.samples.size(); i += static_cast<std::size_t>(stride)) {
        const auto& s = episode.samples[i];
        // A zero radius disables the stationary-pose filter.
        if (!out.empty() && dedup_radius > 0.0) {
            const auto& last = out.back().pose;
            if (last.floor == s.pose.floor && planar_distance(last, s.pose) <= dedup_radius) continue;
        }
        out.push_back(s);
    }
    return out;
}

namespace {

struct DisjointSets {
    std::vector<std::size_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

Clustering cluster_areas(const std::vector<TrajectorySample>& samples, ClusterMode mode,
                         double radius) {
    if (samples.empty()) throw ValidationError("cannot cluster zero samples");
    if (mode == ClusterMode::spatial && !(radius > 0.0)) {
        throw ValidationError("spatial clustering needs radius > 0");
    }

    const std::size_t n = samples.size();
    std::vector<int> ids(n);
    std::set<int> used;
    for (std::size_t i = 0; i < n; ++i) {
        ids[i] = samples[i].viewpoint.value_or(static_cast<int>(i));
        if (!used.insert(ids[i]).second) {
            throw ValidationError("duplicate viewpoint id " + std::to_string(ids[i]));
        }
    }

    // Group samples; each group becomes one area.
    DisjointSets groups(n);
    if (mode == ClusterMode::labeled) {
        std::map<std::string, std::size_t> first;
        for (std::size_t i = 0; i < n; ++i) {
            if (samples[i].area.empty()) throw ValidationError("labeled clustering needs an area name per sample");
            auto [it, fresh] = first.emplace(samples[i].area, i);
            if (!fresh) {
                if (samples[it->second].pose.floor != samples[i].pose.floor) {
                    throw ValidationError("area '" + samples[i].area + "' spans multiple floors");
                }
                groups.unite(it->second, i);
            }
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const auto& a = samples[i].pose;
                const auto& b = samples[j].pose;
                if (a.floor == b.floor && planar_distance(a, b) <= radius) groups.unite(i, j);
            }
        }
    }

    std::map<std::size_t, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < n; ++i) members[groups.find(i)].push_back(i);

    std::vector<std::vector<std::size_t>> clusters;
    for (auto& [root, idx] : members) {
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
        clusters.push_back(std::move(idx));
    }
    std::sort(clusters.begin(), clusters.end(),
              [&](const auto& a, const auto& b) { return ids[a.front()] < ids[b.front()]; });

    Clustering out;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        AreaNode area;
        area.id = static_cast<int>(c);
        const auto& lead = samples[clusters[c].front()];
        area.name = mode == ClusterMode::labeled ? lead.area : "area_" + std::to_string(c);
        double sx = 0.0;
        double sy = 0.0;
        for (auto i : clusters[c]) {
            sx += samples[i].pose.x;
            sy += samples[i].pose.y;
            area.viewpoint_ids.push_back(ids[i]);
            area.object_union.insert(samples[i].observation.objects.begin(),
                                     samples[i].observation.objects.end());
            out.viewpoints.push_back(ViewpointNode{ids[i], samples[i].pose, samples[i].observation, area.id});
        }
        const double k = static_cast<double>(clusters[c].size());
        area.centroid = Pose{sx / k, sy / k, lead.pose.floor, 0.0};
        out.areas.push_back(std::move(area));
    }
    std::sort(out.viewpoints.begin(), out.viewpoints.end(),
              [](const ViewpointNode& a, const ViewpointNode& b) { return a.id < b.id; });
    return out;
}

namespace {

void connect_areas(SceneGraph& graph, const GraphConfig& config) {
    std::set<std::pair<int, int>> edges;
    for (std::size_t i = 0; i < graph.areas.size(); ++i) {
        for (std::size_t j = i + 1; j < graph.areas.size(); ++j) {
            const auto& a = graph.areas[i];
            const auto& b = graph.areas[j];
            if (a.centroid.floor == b.centroid.floor &&
                planar_distance(a.centroid, b.centroid) <= config.adjacency_radius) {
                edges.insert(std::minmax(a.id, b.id));
            }
        }
    }
    for (auto& [from, to] : config.links) {
        auto* a = graph.find_area(from);
        auto* b = graph.find_area(to);
        // Links name areas of the whole world; an episode may not have visited both ends.
        if (a && b && a->id != b->id) edges.insert(std::minmax(a->id, b->id));
    }
    graph.area_edges.assign(edges.begin(), edges.end());
}

}  // namespace

SceneGraph build_scene_graph(const EpisodeMemory& episode, const GraphConfig& config) {
    auto samples = sample_viewpoints(episode, config.stride, config.dedup_radius);
    auto clusters = cluster_areas(samples, config.mode, config.cluster_radius);
    SceneGraph graph;
    graph.label = episode.label;
    graph.areas = std::move(clusters.areas);
    graph.viewpoints = std::move(clusters.viewpoints);
    connect_areas(graph, config);
    return graph;
}

MindPalace build_mind_palace(const std::vector<EpisodeMemory>& memories, const GraphConfig& config,
                             std::optional<std::vector<AreaNode>> present_areas) {
    if (memories.empty()) throw ValidationError("mind palace needs at least one episode");
    std::set<std::string> labels;
    for (auto& m : memories) {
        if (m.label.empty() || m.label == kPresentLabel || !labels.insert(m.label).second) {
            throw ValidationError("duplicate or reserved episode label '" + m.label + "'");
        }
    }

    MindPalace palace;
    for (auto it = memories.rbegin(); it != memories.rend(); ++it) {
        palace.past.push_back(build_scene_graph(*it, config));
    }

    SceneGraph& present = palace.present;
    present.label = kPresentLabel;
    present.is_present = true;
    if (present_areas) {
        present.areas = std::move(*present_areas);
    } else {
        present.areas = palace.past.front().areas;
    }
    for (auto& a : present.areas) {
        a.viewpoint_ids.clear();
        a.object_union.clear();
    }
    connect_areas(present, config);
    return palace;
}

MindPalace update_present(MindPalace palace, ViewpointNode viewpoint) {
    auto& g0 = palace.present;
    auto area = std::find_if(g0.areas.begin(), g0.areas.end(),
                             [&](const AreaNode& a) { return a.id == viewpoint.area_id; });
    if (area == g0.areas.end()) {
        throw ValidationError("unknown area " + std::to_string(viewpoint.area_id) + " in present graph");
    }
    if (g0.find_viewpoint(viewpoint.id)) {
        throw ValidationError("duplicate viewpoint " + std::to_string(viewpoint.id));
    }
    area->viewpoint_ids.push_back(viewpoint.id);
    area->object_union.insert(viewpoint.observation.objects.begin(), viewpoint.observation.objects.end());
    g0.viewpoints.push_back(std::move(viewpoint));
    return palace;
}

// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const Pose& p) {
    j = {{"x", p.x}, {"y", p.y}, {"floor", p.floor}, {"heading", p.heading}};
}

void from_json(const nlohmann::json& j, Pose& p) {
    p = make_pose(j.at("x").get<double>(), j.at("y").get<double>(), j.value("floor", 0),
                  j.value("heading", 0.0));
}

void to_json(nlohmann::json& j, const Observation& o) {
    j = {{"caption", o.caption}, {"objects", o.objects}, {"image_ref", o.image_ref}};
}

void from_json(const nlohmann::json& j, Observation& o) {
    o = make_observation(j.value("caption", std::string{}),
                         j.value("objects", std::vector<std::string>{}),
                         j.value("image_ref", std::string{}));
}

void to_json(nlohmann::json& j, const ViewpointNode& v) {
    j = {{"id", v.id}, {"pose", v.pose}, {"observation", v.observation}, {"area_id", v.area_id}};
}

void from_json(const nlohmann::json& j, ViewpointNode& v) {
    v.id = j.at("id").get<int>();
    v.pose = j.at("pose").get<Pose>();
    v.observation = j.at("observation").get<Observation>();
    v.area_id = j.at("area_id").get<int>();
}

void to_json(nlohmann::json& j, const AreaNode& a) {
    j = {{"id", a.id},
         {"name", a.name},
         {"centroid", a.centroid},
         {"object_union", a.object_union},
         {"viewpoint_ids", a.viewpoint_ids}};
}

void from_json(const nlohmann::json& j, AreaNode& a) {
    a.id = j.at("id").get<int>();
    a.name = j.at("name").get<std::string>();
    a.centroid = j.at("centroid").get<Pose>();
    a.object_union = j.value("object_union", std::set<std::string>{});
    a.viewpoint_ids = j.value("viewpoint_ids", std::vector<int>{});
}

void to_json(nlohmann::json& j, const SceneGraph& g) {
    j = {{"label", g.label},
         {"is_present", g.is_present},
         {"areas", g.areas},
         {"viewpoints", g.viewpoints},
         {"area_edges", g.area_edges}};
}

void from_json(const nlohmann::json& j, SceneGraph& g) {
    g.label = j.at("label").get<std::string>();
    g.is_present = j.value("is_present", false);
    g.areas = j.at("areas").get<std::vector<AreaNode>>();
    g.viewpoints = j.value("viewpoints", std::vector<ViewpointNode>{});
    g.area_edges = j.value("area_edges", std::vector<std::pair<int, int>>{});
}

nlohmann::json serialize_palace(const MindPalace& palace) {
    return {{"schema", kPalaceSchemaVersion}, {"present", palace.present}, {"past", palace.past}};
}

MindPalace deserialize_palace(const nlohmann::json& doc) {
    if (!doc.is_object() || doc.value("schema", 0) != kPalaceSchemaVersion) {
        throw ValidationError("mind palace document must carry \"schema\": 1");
    }
    MindPalace palace;
    try {
        palace.present = doc.at("present").get<SceneGraph>();
        palace.past = doc.at("past").get<std::vector<SceneGraph>>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed mind palace: ") + e.what());
    }
    palace.validate();
    return palace;
}

}  // namespace mindpalace
