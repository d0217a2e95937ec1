#pragma once

// Exhaustive reference for the area planner. Shares no code with src/area_search.cpp: it
// recomputes the prior, the expected cost and the tie rules from scratch over every ordering.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bf {

struct Instance {
    std::vector<std::pair<std::string, double>> probs;
    std::map<std::string, double> entry;
    std::map<std::pair<std::string, std::string>, double> between;  // stored with first < second
    int depth = 3;
    bool past = false;
    double retrieval_cost = 1.0;
};

struct Answer {
    std::vector<std::string> sequence;
    double cost = 0.0;
};

inline bool close(double a, double b) {
    double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) <= 1e-9 * scale;
}

inline double move_cost(const Instance& in, const std::optional<std::string>& from, const std::string& to) {
    if (in.past) return in.retrieval_cost;
    if (!from) return in.entry.at(to);
    if (*from == to) return 0.0;
    auto key = *from < to ? std::make_pair(*from, to) : std::make_pair(to, *from);
    return in.between.at(key);
}

inline std::map<std::string, double> prior_of(const Instance& in) {
    std::map<std::string, double> p;
    double sum = 0.0;
    for (auto& [name, v] : in.probs) {
        double c = v < 0.0 ? 0.0 : (v > 0.99 ? 0.99 : v);
        p[name] = c;
        sum += c;
    }
    if (sum > 1.0) {
        for (auto& kv : p) kv.second = kv.second / sum;
    }
    return p;
}

inline double cost_of(const Instance& in, const std::vector<std::string>& seq) {
    auto p = prior_of(in);
    double total = 0.0;
    double found_before = 0.0;
    std::optional<std::string> at;
    for (auto& a : seq) {
        total += move_cost(in, at, a) * (1.0 - found_before);
        found_before += p.at(a);
        at = a;
    }
    return total;
}

inline Answer solve(const Instance& in) {
    std::vector<std::string> names;
    for (auto& [name, v] : in.probs) names.push_back(name);
    std::sort(names.begin(), names.end());
    std::size_t len = std::min<std::size_t>(static_cast<std::size_t>(in.depth), names.size());

    // Every ordered selection of `len` distinct names: permute the full list and keep the
    // prefixes, deduplicated.
    std::vector<std::vector<std::string>> all;
    std::vector<std::string> perm = names;
    do {
        std::vector<std::string> prefix(perm.begin(), perm.begin() + static_cast<long>(len));
        all.push_back(prefix);
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());

    double best = 0.0;
    bool have = false;
    for (auto& s : all) {
        double c = cost_of(in, s);
        if (!have || c < best) {
            best = c;
            have = true;
        }
    }
    std::optional<Answer> pick;
    for (auto& s : all) {  // `all` is sorted, so the first survivor of each rule is lexicographically smallest
        double c = cost_of(in, s);
        if (!close(c, best)) continue;
        if (!pick) {
            pick = Answer{s, c};
            continue;
        }
        double mine = move_cost(in, std::nullopt, s.front());
        double theirs = move_cost(in, std::nullopt, pick->sequence.front());
        if (mine < theirs && !close(mine, theirs)) pick = Answer{s, c};
    }
    return *pick;
}

}  // namespace bf
