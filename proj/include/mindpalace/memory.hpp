#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace mindpalace {

// Temporal label of the present world instance G0.
inline const std::string kPresentLabel = "now";

inline constexpr int kPalaceSchemaVersion = 1;

struct Pose {
    double x = 0.0;
    double y = 0.0;
    int floor = 0;
    double heading = 0.0;  // radians in [0, 2pi)

    bool operator==(const Pose&) const = default;
};

// Validates the floor and wraps the heading into [0, 2pi).
Pose make_pose(double x, double y, int floor, double heading = 0.0);

double planar_distance(const Pose& a, const Pose& b);

struct Observation {
    std::string caption;
    std::set<std::string> objects;  // lowercase labels
    std::string image_ref;

    bool empty() const { return caption.empty() && objects.empty(); }
    bool operator==(const Observation&) const = default;
};

// Lowercases and trims labels; rejects empty labels. Duplicates collapse.
Observation make_observation(std::string caption, const std::vector<std::string>& objects,
                             std::string image_ref = {});

// One tuple m_ij of an episodic trajectory. `area` is the scenario-provided room name used by
// labeled clustering; `viewpoint` ties the sample to a world viewpoint when known.
struct TrajectorySample {
    Pose pose;
    Observation observation;
    std::string area;
    std::optional<int> viewpoint;

    bool operator==(const TrajectorySample&) const = default;
};

struct EpisodeMemory {
    std::string label;  // macro-temporal label, e.g. "thursday afternoon"
    std::vector<TrajectorySample> samples;
};

struct ViewpointNode {
    int id = 0;
    Pose pose;
    Observation observation;
    int area_id = 0;

    bool operator==(const ViewpointNode&) const = default;
};

struct AreaNode {
    int id = 0;
    std::string name;
    Pose centroid;  // heading unused
    std::set<std::string> object_union;
    std::vector<int> viewpoint_ids;

    bool operator==(const AreaNode&) const = default;
};

struct SceneGraph {
    std::string label;
    std::vector<AreaNode> areas;
    std::vector<ViewpointNode> viewpoints;
    std::vector<std::pair<int, int>> area_edges;  // undirected, stored with first < second
    bool is_present = false;

    const AreaNode* find_area(int id) const;
    const AreaNode* find_area(const std::string& name) const;
    const ViewpointNode* find_viewpoint(int id) const;
    std::vector<const ViewpointNode*> viewpoints_in(int area_id) const;
    std::vector<int> neighbors(int area_id) const;
    bool adjacent(int a, int b) const;

    // Throws ValidationError if a structural invariant does not hold.
    void validate() const;

    bool operator==(const SceneGraph&) const = default;
};

struct MindPalace {
    SceneGraph present;
    std::vector<SceneGraph> past;  // most recent first

    // Present graph for kPresentLabel, otherwise the past graph with that label.
    const SceneGraph* find(const std::string& label) const;

    // Past labels most recent first, then kPresentLabel.
    std::vector<std::string> labels() const;

    void validate() const;

    bool operator==(const MindPalace&) const = default;
};

enum class ClusterMode { labeled, spatial };

struct Clustering {
    std::vector<AreaNode> areas;
    std::vector<ViewpointNode> viewpoints;
};

struct GraphConfig {
    int stride = 3;
    double dedup_radius = 0.25;
    ClusterMode mode = ClusterMode::labeled;
    double cluster_radius = 2.0;    // spatial mode linkage distance
    double adjacency_radius = 5.0;  // centroid distance for area edges
    std::vector<std::pair<std::string, std::string>> links;  // explicit stair/door links by area name
};

std::vector<TrajectorySample> sample_viewpoints(const EpisodeMemory& episode, int stride,
                                                double dedup_radius);

// Areas are numbered by their smallest member viewpoint id, so the partition and numbering do
// not depend on sample order. Samples without a viewpoint id are numbered by position.
Clustering cluster_areas(const std::vector<TrajectorySample>& samples, ClusterMode mode,
                         double radius);

SceneGraph build_scene_graph(const EpisodeMemory& episode, const GraphConfig& config);

// `memories` is chronological (oldest first); the palace stores past graphs most recent first.
MindPalace build_mind_palace(const std::vector<EpisodeMemory>& memories, const GraphConfig& config,
                             std::optional<std::vector<AreaNode>> present_areas = std::nullopt);

MindPalace update_present(MindPalace palace, ViewpointNode viewpoint);

nlohmann::json serialize_palace(const MindPalace& palace);
MindPalace deserialize_palace(const nlohmann::json& doc);

void to_json(nlohmann::json& j, const Pose& p);
void from_json(const nlohmann::json& j, Pose& p);
void to_json(nlohmann::json& j, const Observation& o);
void from_json(const nlohmann::json& j, Observation& o);
void to_json(nlohmann::json& j, const ViewpointNode& v);
void from_json(const nlohmann::json& j, ViewpointNode& v);
void to_json(nlohmann::json& j, const AreaNode& a);
void from_json(const nlohmann::json& j, AreaNode& a);
void to_json(nlohmann::json& j, const SceneGraph& g);
void from_json(const nlohmann::json& j, SceneGraph& g);

}  // namespace mindpalace
