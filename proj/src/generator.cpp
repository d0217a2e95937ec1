#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>

#include "mindpalace/bench.hpp"
#include "mindpalace/error.hpp"

namespace mindpalace {

using nlohmann::json;

namespace {

const std::vector<std::string> kAreaNames = {
    "kitchen",     "living room", "bedroom",     "bathroom",  "office",   "hallway", "dining room",
    "garage",      "laundry room", "guest room", "study",     "pantry",   "main entrance", "balcony",
};

const std::vector<std::string> kFurniture = {
    "sofa",  "armchair", "bookshelf", "television", "fridge", "stove",    "sink",  "bed",
    "wardrobe", "desk", "dresser",   "bathtub",    "shoe rack", "washing machine", "potted plant",
    "rug",   "cabinet",  "mirror",    "coat hook",  "radiator",
};

const std::vector<std::string> kTracked = {
    "red backpack", "laptop",       "car keys",   "umbrella",      "water bottle", "novel",
    "headphones",   "wallet",       "coffee mug", "tennis racket", "yoga mat",     "package",
    "flower vase",  "remote control", "scissors", "phone charger", "sunglasses",   "teddy bear",
    "toolbox",      "basketball",   "guitar",     "camera",        "notebook",     "board game",
};

const std::vector<std::string> kShared = {"folding chair", "laundry basket", "step stool"};

struct Consumable {
    std::string singular;
    std::string plural;
    std::string container;
};

const std::vector<Consumable> kConsumables = {
    {"apple", "apples", "fruit bowl"},      {"banana", "bananas", "fruit basket"},
    {"cookie", "cookies", "cookie jar"},    {"egg", "eggs", "egg carton"},
    {"candle", "candles", "candle tray"},   {"paper towel", "paper towels", "towel holder"},
};

const std::vector<std::string> kDays = {"monday", "tuesday", "wednesday", "thursday", "friday", "saturday"};
const std::vector<std::string> kParts = {"morning", "afternoon", "evening"};

enum class Dynamic { added, moved, fixed, removed };

// Object locations per time step: episodes 0..E-1 then the present at index E.
struct Track {
    std::string name;
    Dynamic dynamic = Dynamic::fixed;
    std::vector<std::optional<int>> at;
    int change = 0;  // time step of the change, when there is one
};

struct Layout {
    std::vector<std::string> areas;
    std::map<std::string, std::vector<int>> members;
    std::map<int, std::string> area_of;
    std::map<int, Pose> pose;
    std::vector<WorldEdge> edges;
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    int uniform(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    template <class T>
    const T& pick(const std::vector<T>& v) { return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))]; }
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<std::size_t>(uniform(0, static_cast<int>(i) - 1))]);
    }

private:
    std::mt19937_64 engine_;
};

Layout make_layout(const GenSpec& spec, Rng& rng) {
    Layout L;
    std::vector<std::string> names = kAreaNames;
    rng.shuffle(names);
    names.resize(static_cast<std::size_t>(spec.areas));
    L.areas = names;

    const double spacing = 6.0;
    const std::vector<std::pair<double, double>> offsets = {{-1.5, 0.0}, {0.0, 1.2}, {1.5, 0.0}, {0.0, -1.2}, {0.8, 0.9}};
    int per_floor = (spec.areas + spec.floors - 1) / spec.floors;
    int id = 0;
    for (int a = 0; a < spec.areas; ++a) {
        int floor = a / per_floor;
        int slot = a % per_floor;
        // Odd floors run back so the stairs stay short.
        double cx = (floor % 2 == 0 ? slot : per_floor - 1 - slot) * spacing;
        for (int v = 0; v < spec.viewpoints_per_area; ++v) {
            auto [dx, dy] = offsets[static_cast<std::size_t>(v)];
            L.pose[id] = make_pose(cx + dx, dy, floor);
            L.area_of[id] = names[static_cast<std::size_t>(a)];
            L.members[names[static_cast<std::size_t>(a)]].push_back(id);
            ++id;
        }
    }
    auto link = [&](int u, int w, double extra = 0.0) {
        double d = planar_distance(L.pose[u], L.pose[w]) + extra;
        L.edges.push_back({u, w, std::max(d, 0.5)});
    };
    for (int a = 0; a < spec.areas; ++a) {
        const auto& m = L.members[names[static_cast<std::size_t>(a)]];
        for (std::size_t i = 1; i < m.size(); ++i) link(m[i - 1], m[i]);
        if (a + 1 < spec.areas) {
            const auto& next = L.members[names[static_cast<std::size_t>(a + 1)]];
            bool stairs = L.pose[m.back()].floor != L.pose[next.front()].floor;
            link(m.back(), next.front(), stairs ? 5.0 : 0.0);
        }
    }
    return L;
}

std::string day_label(int episode, int total) {
    // The last episode is "yesterday"-like; labels stay unique by day name.
    int day = static_cast<int>(kDays.size()) - total + episode;
    return kDays[static_cast<std::size_t>(day)] + " " + kParts[static_cast<std::size_t>(episode % 3)];
}

std::string join_items(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += (i + 1 == items.size()) ? " and " : ", ";
        out += items[i];
    }
    return out;
}

std::string article(const std::string& noun) {
    return std::string("aeiou").find(noun.front()) != std::string::npos ? "an " + noun : "a " + noun;
}

std::string number_word(int n) {
    static const std::vector<std::string> words = {"no", "one", "two", "three", "four", "five", "six",
                                                   "seven", "eight", "nine", "ten", "eleven", "twelve"};
    return n >= 0 && n < static_cast<int>(words.size()) ? words[static_cast<std::size_t>(n)] : std::to_string(n);
}

}  // namespace

json generate_scenario(const GenSpec& spec) {
    if (spec.areas < 2) throw ValidationError("generator needs at least 2 areas");
    if (spec.areas > static_cast<int>(kAreaNames.size())) throw ValidationError("generator supports at most 14 areas");
    if (spec.episodes < 2 || spec.episodes > static_cast<int>(kDays.size())) {
        throw ValidationError("generator needs between 2 and 6 episodes");
    }
    if (spec.viewpoints_per_area < 1 || spec.viewpoints_per_area > 5) {
        throw ValidationError("generator needs 1 to 5 viewpoints per area");
    }
    if (spec.floors < 1 || spec.floors > spec.areas) throw ValidationError("generator needs 1..areas floors");
    if (spec.questions_per_type < 1 || spec.questions_per_type > 12) {
        throw ValidationError("generator supports 1 to 12 questions per type");
    }

    Rng rng(spec.seed);
    Layout L = make_layout(spec, rng);
    const int E = spec.episodes;
    const int T = E + 1;  // time steps including the present
    std::vector<int> all_vps;
    for (auto& [id, p] : L.pose) all_vps.push_back(id);

    // Static furniture: one or two pieces per viewpoint.
    std::map<int, std::vector<std::string>> furniture;
    for (int id : all_vps) {
        int n = rng.uniform(1, 2);
        for (int i = 0; i < n; ++i) {
            auto& f = rng.pick(kFurniture);
            if (std::find(furniture[id].begin(), furniture[id].end(), f) == furniture[id].end()) furniture[id].push_back(f);
        }
    }

    auto random_vp = [&](std::optional<int> avoid_area_of = std::nullopt) {
        for (;;) {
            int id = rng.pick(all_vps);
            if (!avoid_area_of || L.area_of[id] != L.area_of[*avoid_area_of]) return id;
        }
    };

    // Tracked objects with their dynamics.
    std::vector<Track> tracks;
    std::vector<std::string> pool = kTracked;
    rng.shuffle(pool);
    const int n_added = spec.questions_per_type;
    const int n_moved = std::max(1, spec.questions_per_type / 2);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        Track t;
        t.name = pool[i];
        t.at.assign(static_cast<std::size_t>(T), std::nullopt);
        int home = random_vp();
        int ii = static_cast<int>(i);
        if (ii < n_added) {
            t.dynamic = Dynamic::added;
            t.change = rng.uniform(1, E - 1);
            for (int s = t.change; s < T; ++s) t.at[static_cast<std::size_t>(s)] = home;
        } else if (ii < n_added + n_moved) {
            t.dynamic = Dynamic::moved;
            t.change = E;  // moved after the last recorded episode
            int away = random_vp(home);
            for (int s = 0; s < T; ++s) t.at[static_cast<std::size_t>(s)] = s < t.change ? home : away;
        } else if (ii % 2 == 0) {
            t.dynamic = Dynamic::fixed;
            for (int s = 0; s < T; ++s) t.at[static_cast<std::size_t>(s)] = home;
        } else {
            t.dynamic = Dynamic::removed;
            t.change = rng.uniform(1, E);
            for (int s = 0; s < t.change; ++s) t.at[static_cast<std::size_t>(s)] = home;
        }
        tracks.push_back(std::move(t));
    }

    // Shared objects sit in two areas at once, the same at every time step.
    std::vector<std::pair<std::string, std::pair<int, int>>> shared;
    for (auto& name : kShared) {
        int a = random_vp();
        int b = random_vp(a);
        shared.push_back({name, {a, b}});
    }

    // Consumables: a container in a fixed place whose count drops by `rate` each time step.
    struct Stock {
        Consumable item;
        int vp;
        int rate;
        int start;
    };
    std::vector<Stock> stocks;
    for (auto& c : kConsumables) {
        int rate = rng.uniform(1, 2);
        int vp = random_vp();
        stocks.push_back({c, vp, rate, rate * (T + 3) + rng.uniform(0, 2)});
    }
    auto count_at = [](const Stock& s, int step) { return s.start - s.rate * step; };

    auto observation_at = [&](int vp, int step) {
        std::vector<std::string> objects = furniture[vp];
        std::vector<std::string> phrases;
        for (auto& f : furniture[vp]) phrases.push_back(article(f));
        for (auto& t : tracks) {
            if (t.at[static_cast<std::size_t>(step)] == vp) {
                objects.push_back(t.name);
                phrases.push_back(t.name == "package" ? "a package in a cardboard box" : article(t.name));
            }
        }
        for (auto& [name, where] : shared) {
            if (where.first == vp || where.second == vp) {
                objects.push_back(name);
                phrases.push_back(article(name));
            }
        }
        for (auto& s : stocks) {
            if (s.vp != vp) continue;
            int n = count_at(s, step);
            objects.push_back(s.item.container);
            objects.push_back(s.item.singular);
            phrases.push_back(article(s.item.container) + " holding " + number_word(n) + " " +
                              (n == 1 ? s.item.singular : s.item.plural));
        }
        json j;
        j["caption"] = "A view of the " + L.area_of[vp] + " with " + join_items(phrases) + ".";
        j["objects"] = objects;
        j["image_ref"] = (step == E ? std::string(kPresentLabel) : "ep" + std::to_string(step)) + "/vp" + std::to_string(vp) + ".jpg";
        return j;
    };

    std::vector<std::string> labels;
    for (int e = 0; e < E; ++e) labels.push_back(day_label(e, E));

    json doc;
    doc["name"] = "generated-" + std::to_string(spec.seed);
    doc["seed"] = spec.seed;
    doc["memory"] = {{"stride", 3}, {"dedup_radius", 0.25}, {"mode", "labeled"}, {"cluster_radius", 2.0},
                     {"adjacency_radius", 7.0}, {"links", json::array()}};
    doc["synonyms"] = {{"package", {"cardboard box", "parcel"}}, {"something to sit on", {"folding chair", "sofa", "armchair"}}};

    json viewpoints = json::array();
    for (int id : all_vps) viewpoints.push_back({{"id", id}, {"pose", L.pose[id]}, {"area", L.area_of[id]}});
    json edges = json::array();
    for (auto& e : L.edges) edges.push_back({{"from", e.from}, {"to", e.to}, {"meters", e.meters}});
    json present = json::array();
    for (int id : all_vps) {
        auto o = observation_at(id, E);
        o["viewpoint"] = id;
        present.push_back(std::move(o));
    }
    doc["world"] = {{"viewpoints", viewpoints}, {"edges", edges}, {"present", present}};

    // Each episode walks every area in a random order; two transit samples follow every viewpoint
    // so that stride-3 sampling keeps exactly the viewpoints.
    json episodes = json::array();
    for (int e = 0; e < E; ++e) {
        auto order = L.areas;
        rng.shuffle(order);
        json samples = json::array();
        for (auto& area : order) {
            for (int id : L.members[area]) {
                auto o = observation_at(id, e);
                o["pose"] = L.pose[id];
                o["area"] = area;
                o["viewpoint"] = id;
                samples.push_back(o);
                for (int k = 1; k <= 2; ++k) {
                    auto p = L.pose[id];
                    json transit = {{"caption", ""},
                                    {"objects", json::array()},
                                    {"pose", make_pose(p.x + 0.1 * k, p.y + 0.05 * k, p.floor, p.heading)},
                                    {"area", area}};
                    samples.push_back(transit);
                }
            }
        }
        episodes.push_back({{"label", labels[static_cast<std::size_t>(e)]}, {"samples", samples}});
    }
    doc["episodes"] = episodes;

    // Questions.
    json questions = json::array();
    const int n = spec.questions_per_type;
    int qid = 0;
    auto next_id = [&](const std::string& kind) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%03d", qid++);
        return "q" + std::string(buf) + "-" + kind;
    };
    auto question = [&](const std::string& kind, const std::string& text, const std::string& truth,
                        std::vector<std::string> keys, std::vector<std::string> targets, json evidence,
                        std::vector<int> solution, int start) {
        json q = {{"id", next_id(kind)},
                  {"text", text},
                  {"type", kind},
                  {"ground_truth", truth},
                  {"key_phrases", keys},
                  {"targets", targets},
                  {"evidence", evidence},
                  {"annotated_solution", solution},
                  {"start_viewpoint", start}};
        questions.push_back(std::move(q));
    };

    std::vector<const Track*> added;
    std::vector<const Track*> moved;
    std::vector<const Track*> steady;  // present in every episode
    std::vector<const Track*> any;
    for (auto& t : tracks) {
        any.push_back(&t);
        if (t.dynamic == Dynamic::added) added.push_back(&t);
        if (t.dynamic == Dynamic::moved) moved.push_back(&t);
        if (t.dynamic == Dynamic::fixed) steady.push_back(&t);
    }

    // past: where was X on a given episode.
    for (int i = 0; i < n; ++i) {
        const Track* t = nullptr;
        int step = 0;
        while (!t) {
            auto* c = rng.pick(any);
            step = rng.uniform(0, E - 1);
            if (c->at[static_cast<std::size_t>(step)]) t = c;
        }
        int vp = *t->at[static_cast<std::size_t>(step)];
        auto& area = L.area_of[vp];
        const auto& label = labels[static_cast<std::size_t>(step)];
        question("past", "Where was the " + t->name + " on " + label + "?", area, {area}, {t->name},
                 json::array({{{"episode", label}, {"viewpoint", vp}, {"present", true}}}), {}, random_vp());
    }

    // present: where is X now.
    for (int i = 0; i < n; ++i) {
        const Track* t = nullptr;
        while (!t) {
            auto* c = rng.pick(any);
            if (c->at[static_cast<std::size_t>(E)]) t = c;
        }
        int vp = *t->at[static_cast<std::size_t>(E)];
        auto& area = L.area_of[vp];
        question("present", "Where is the " + t->name + " right now?", area, {area}, {t->name},
                 json::array({{{"episode", kPresentLabel}, {"viewpoint", vp}, {"present", true}}}), {vp},
                 random_vp(vp));
    }

    // multi_past: when did X arrive; evidence is the first sighting and the absence just before.
    for (int i = 0; i < n; ++i) {
        const Track* t = added[static_cast<std::size_t>(i) % added.size()];
        int vp = *t->at[static_cast<std::size_t>(t->change)];
        const auto& first = labels[static_cast<std::size_t>(t->change)];
        const auto& before = labels[static_cast<std::size_t>(t->change - 1)];
        std::string truth = "Before " + first;
        json evidence = json::array({{{"episode", first}, {"viewpoint", vp}, {"present", true}},
                                     {{"episode", before}, {"viewpoint", vp}, {"present", false}}});
        std::string text = i < static_cast<int>(added.size()) ? "When was the " + t->name + " brought into the house?"
                                                              : "When did the " + t->name + " first show up?";
        question("multi_past", text, truth, {"before " + first}, {t->name}, evidence, {}, random_vp());
    }

    // past_present: moved objects, shared objects (two places at once) and objects that stayed put.
    int made = 0;
    for (std::size_t i = 0; i < moved.size() && made < n; ++i, ++made) {
        const Track* t = moved[i];
        int old_vp = *t->at[static_cast<std::size_t>(E - 1)];
        int new_vp = *t->at[static_cast<std::size_t>(E)];
        const auto& label = labels[static_cast<std::size_t>(E - 1)];
        auto& area = L.area_of[new_vp];
        question("past_present", "I saw the " + t->name + " in the " + L.area_of[old_vp] + " on " + label +
                                     ". Where is it now?",
                 area, {area}, {t->name},
                 json::array({{{"episode", kPresentLabel}, {"viewpoint", new_vp}, {"present", true}}}), {new_vp},
                 random_vp(new_vp));
    }
    for (std::size_t i = 0; i < shared.size() && made < n; ++i, ++made) {
        auto& [name, where] = shared[i];
        auto& a = L.area_of[where.first];
        auto& b = L.area_of[where.second];
        const auto& label = labels[static_cast<std::size_t>(E - 1)];
        // Start inside the first area so one of the candidates is right here.
        int start = L.members[a].front() == where.first && L.members[a].size() > 1 ? L.members[a].back()
                                                                                   : L.members[a].front();
        question("past_present", "There was a " + name + " around on " + label + ". Where can I find one now?",
                 "in the " + a + " and in the " + b, {a, b}, {name},
                 json::array({{{"episode", kPresentLabel}, {"viewpoint", where.first}, {"present", true}}}),
                 {where.first}, start);
    }
    for (std::size_t i = 0; made < n; ++i, ++made) {
        const Track* t = steady.empty() ? any[i % any.size()] : steady[i % steady.size()];
        if (!t->at[static_cast<std::size_t>(E)] || !t->at[static_cast<std::size_t>(E - 1)]) {
            --made;
            if (i > 4 * any.size()) throw ValidationError("generator could not place past_present questions");
            continue;
        }
        int vp = *t->at[static_cast<std::size_t>(E)];
        const auto& label = labels[static_cast<std::size_t>(E - 1)];
        auto& area = L.area_of[vp];
        question("past_present", "Is the " + t->name + " still where it was on " + label + "? Where is it now?",
                 area, {area}, {t->name},
                 json::array({{{"episode", kPresentLabel}, {"viewpoint", vp}, {"present", true}}}), {vp},
                 random_vp(vp));
    }

    // past_present_future: extrapolate a consumption trend seen over the episodes.
    for (int i = 0; i < n; ++i) {
        const Stock& s = stocks[static_cast<std::size_t>(i) % stocks.size()];
        int horizon = 1 + i / static_cast<int>(stocks.size());
        int left = std::max(0, count_at(s, E + horizon));
        std::string unit = left == 1 ? s.item.singular : s.item.plural;
        std::string truth = std::to_string(left) + " " + unit;
        json evidence = json::array();
        for (int e = 0; e < E; ++e) evidence.push_back({{"episode", labels[static_cast<std::size_t>(e)]}, {"viewpoint", s.vp}, {"present", true}});
        evidence.push_back({{"episode", kPresentLabel}, {"viewpoint", s.vp}, {"present", true}});
        std::string when = horizon == 1 ? "tomorrow" : "in " + number_word(horizon) + " days";
        question("past_present_future",
                 "At the rate they are being used, how many " + s.item.plural + " will be left " + when + "?",
                 truth, {truth}, {s.item.singular}, evidence, {s.vp}, random_vp(s.vp));
    }
    doc["questions"] = questions;
    return doc;
}

}  // namespace mindpalace
