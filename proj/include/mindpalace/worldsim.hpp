#pragma once

#include <map>
#include <string>
#include <vector>

#include "mindpalace/memory.hpp"

namespace mindpalace {

struct WorldNode {
    int id = 0;
    Pose pose;
    std::string area;
};

struct WorldEdge {
    int from = 0;
    int to = 0;
    double meters = 0.0;
};

struct GroundTruth {
    std::string answer;
    std::vector<int> solution;  // annotated viewpoints w*, visited in order from the start
};

using Placements = std::map<int, Observation>;

// Simulator ground truth. Immutable once constructed; per-run state lives in RunContext.
class World {
public:
    World() = default;
    World(std::vector<WorldNode> nodes, std::vector<WorldEdge> edges,
          std::map<std::string, Placements> episode_placements, Placements present_placements,
          std::map<std::string, GroundTruth> ground_truth = {});

    const std::vector<WorldNode>& nodes() const { return nodes_; }
    const std::vector<WorldEdge>& edges() const { return edges_; }
    bool has_node(int id) const { return index_.count(id) > 0; }
    const WorldNode& node(int id) const;

    // (neighbor id, meters), sorted by neighbor id.
    const std::vector<std::pair<int, double>>& neighbors(int id) const;

    std::vector<std::string> area_names() const;
    std::vector<int> area_members(const std::string& area) const;  // ascending ids

    const std::map<std::string, Placements>& episode_placements() const { return episode_placements_; }
    const Placements& present_placements() const { return present_placements_; }
    const std::map<std::string, GroundTruth>& ground_truth() const { return ground_truth_; }

private:
    std::vector<WorldNode> nodes_;
    std::vector<WorldEdge> edges_;
    std::map<int, std::size_t> index_;
    std::vector<std::vector<std::pair<int, double>>> adjacency_;
    std::map<std::string, Placements> episode_placements_;
    Placements present_placements_;
    std::map<std::string, GroundTruth> ground_truth_;
};

struct PathResult {
    std::vector<int> path;
    double meters = 0.0;
};

struct NavResult {
    std::vector<int> path;
    double length = 0.0;
    Observation observation;
};

// Minimum-weight path; among equal-weight paths the lexicographically smallest id sequence.
PathResult shortest_path(const World& world, int from, int to);

NavResult navigate(const World& world, int current, int target);

Observation retrieve(const World& world, const std::string& episode_label, int viewpoint);

// Member viewpoint closest to the area's centroid (ties by id).
int area_anchor(const World& world, const std::string& area);

// 0 if `current` already lies in the area, otherwise the path length to the area anchor.
double area_centroid_distance(const World& world, int current, const std::string& area);

// Path length of the chain start -> solution[0] -> solution[1] -> ...
double chained_path_length(const World& world, int start, const std::vector<int>& solution);

// Accumulators of one agent run.
struct RunContext {
    int position = 0;
    double traveled = 0.0;
    int retrieved_images = 0;
    int explored_viewpoints = 0;

    NavResult navigate_to(const World& world, int target);
    Observation retrieve_image(const World& world, const std::string& episode_label, int viewpoint);
};

}  // namespace mindpalace
