#include "mindpalace/worldsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mindpalace/error.hpp"

namespace mindpalace {

namespace {

bool nearly_equal(double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

World::World(std::vector<WorldNode> nodes, std::vector<WorldEdge> edges,
             std::map<std::string, Placements> episode_placements, Placements present_placements,
             std::map<std::string, GroundTruth> ground_truth)
    : nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      episode_placements_(std::move(episode_placements)),
      present_placements_(std::move(present_placements)),
      ground_truth_(std::move(ground_truth)) {
    std::sort(nodes_.begin(), nodes_.end(), [](auto& a, auto& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!index_.emplace(nodes_[i].id, i).second) {
            throw ValidationError("duplicate world viewpoint " + std::to_string(nodes_[i].id));
        }
        if (nodes_[i].area.empty()) {
            throw ValidationError("world viewpoint " + std::to_string(nodes_[i].id) + " has no area");
        }
    }
    adjacency_.resize(nodes_.size());
    for (auto& e : edges_) {
        if (!has_node(e.from) || !has_node(e.to)) throw ValidationError("edge references unknown viewpoint");
        if (!(e.meters > 0.0)) throw ValidationError("edge weights must be > 0");
        adjacency_[index_.at(e.from)].emplace_back(e.to, e.meters);
        adjacency_[index_.at(e.to)].emplace_back(e.from, e.meters);
    }
    for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());

    auto check = [&](const Placements& p, const std::string& where) {
        for (auto& [id, obs] : p) {
            if (!has_node(id)) {
                throw ValidationError("placement in '" + where + "' references unknown viewpoint " +
                                      std::to_string(id));
            }
        }
    };
    for (auto& [label, p] : episode_placements_) check(p, label);
    check(present_placements_, kPresentLabel);
    for (auto& [qid, gt] : ground_truth_) {
        for (int id : gt.solution) {
            if (!has_node(id)) throw ValidationError("question " + qid + " annotates unknown viewpoint");
        }
    }

    // Each floor component must be connected (stairs join floors explicitly).
    std::map<int, std::vector<int>> floors;
    for (auto& n : nodes_) floors[n.pose.floor].push_back(n.id);
    for (auto& [floor, ids] : floors) {
        std::set<int> seen{ids.front()};
        std::vector<int> stack{ids.front()};
        while (!stack.empty()) {
            int cur = stack.back();
            stack.pop_back();
            for (auto [next, w] : neighbors(cur)) {
                if (node(next).pose.floor == floor && seen.insert(next).second) stack.push_back(next);
            }
        }
        if (seen.size() != ids.size()) {
            throw ValidationError("floor " + std::to_string(floor) + " is not connected");
        }
    }
}

const WorldNode& World::node(int id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw ValidationError("unknown viewpoint " + std::to_string(id));
    return nodes_[it->second];
}

const std::vector<std::pair<int, double>>& World::neighbors(int id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw ValidationError("unknown viewpoint " + std::to_string(id));
    return adjacency_[it->second];
}

std::vector<std::string> World::area_names() const {
    std::set<std::string> names;
    for (auto& n : nodes_) names.insert(n.area);
    return {names.begin(), names.end()};
}

std::vector<int> World::area_members(const std::string& area) const {
    std::vector<int> out;
    for (auto& n : nodes_)
        if (n.area == area) out.push_back(n.id);
    return out;
}

PathResult shortest_path(const World& world, int from, int to) {
    if (!world.has_node(from) || !world.has_node(to)) throw ValidationError("shortest_path: unknown viewpoint");

    // Label-setting Dijkstra over (distance, path) with lexicographic path tie-break. Graphs here
    // have tens of nodes, so the quadratic selection is fine.
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::map<int, double> dist;
    std::map<int, std::vector<int>> best;
    std::set<int> settled;
    for (auto& n : world.nodes()) dist[n.id] = inf;
    dist[from] = 0.0;
    best[from] = {from};

    while (true) {
        int pick = -1;
        for (auto& [id, d] : dist) {
            if (settled.count(id) || d == inf) continue;
            if (pick < 0 || (d < dist[pick] && !nearly_equal(d, dist[pick])) ||
                (nearly_equal(d, dist[pick]) && best[id] < best[pick])) {
                pick = id;
            }
        }
        if (pick < 0) break;
        if (pick == to) return {best[pick], dist[pick]};
        settled.insert(pick);
        for (auto [next, w] : world.neighbors(pick)) {
            if (settled.count(next)) continue;
            double cand = dist[pick] + w;
            auto path = best[pick];
            path.push_back(next);
            if (dist[next] == inf || (cand < dist[next] && !nearly_equal(cand, dist[next])) ||
                (nearly_equal(cand, dist[next]) && path < best[next])) {
                dist[next] = cand;
                best[next] = std::move(path);
            }
        }
    }
    throw NoPathError("no path from " + std::to_string(from) + " to " + std::to_string(to));
}

NavResult navigate(const World& world, int current, int target) {
    if (!world.has_node(target)) throw ValidationError("navigate: unknown target " + std::to_string(target));
    auto route = shortest_path(world, current, target);
    NavResult out;
    out.path = std::move(route.path);
    out.length = route.meters;
    auto it = world.present_placements().find(target);
    if (it != world.present_placements().end()) out.observation = it->second;
    return out;
}

Observation retrieve(const World& world, const std::string& episode_label, int viewpoint) {
    auto ep = world.episode_placements().find(episode_label);
    if (ep == world.episode_placements().end()) {
        throw ValidationError("retrieve: unknown episode '" + episode_label + "'");
    }
    auto it = ep->second.find(viewpoint);
    if (it == ep->second.end()) {
        throw ValidationError("retrieve: viewpoint " + std::to_string(viewpoint) + " not recorded in '" +
                              episode_label + "'");
    }
    return it->second;
}

int area_anchor(const World& world, const std::string& area) {
    auto members = world.area_members(area);
    if (members.empty()) throw ValidationError("area '" + area + "' has no viewpoints");
    double cx = 0.0;
    double cy = 0.0;
    for (int id : members) {
        cx += world.node(id).pose.x;
        cy += world.node(id).pose.y;
    }
    cx /= static_cast<double>(members.size());
    cy /= static_cast<double>(members.size());
    int best = members.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (int id : members) {
        const auto& p = world.node(id).pose;
        double d = std::hypot(p.x - cx, p.y - cy);
        if (d < best_d - 1e-12) {
            best = id;
            best_d = d;
        }
    }
    return best;
}

double area_centroid_distance(const World& world, int current, const std::string& area) {
    int anchor = area_anchor(world, area);
    if (world.node(current).area == area) return 0.0;
    return shortest_path(world, current, anchor).meters;
}

double chained_path_length(const World& world, int start, const std::vector<int>& solution) {
    double total = 0.0;
    int at = start;
    for (int next : solution) {
        total += shortest_path(world, at, next).meters;
        at = next;
    }
    return total;
}

NavResult RunContext::navigate_to(const World& world, int target) {
    auto nav = navigate(world, position, target);
    traveled += nav.length;
    position = target;
    ++explored_viewpoints;
    return nav;
}

Observation RunContext::retrieve_image(const World& world, const std::string& episode_label, int viewpoint) {
    auto obs = retrieve(world, episode_label, viewpoint);
    ++retrieved_images;
    return obs;
}

}  // namespace mindpalace
