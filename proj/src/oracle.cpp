#include "mindpalace/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "mindpalace/text.hpp"

namespace mindpalace {

using nlohmann::json;

std::string enforce_target(std::string descriptor, const Question& q) {
    descriptor = text::trim(descriptor);
    if (descriptor.empty()) {
        // Fall back to the question's content words.
        std::string words;
        for (auto& t : text::tokens(q.text)) {
            auto content = text::content_tokens(t);
            if (content.empty()) continue;
            if (!words.empty()) words += ' ';
            words += t;
        }
        descriptor = words.empty() ? text::normalize(q.text) : words;
    }
    if (text::word_count(descriptor) > kMaxTargetWords) descriptor = text::first_words(descriptor, kMaxTargetWords);
    if (descriptor.empty()) descriptor = "object";
    return descriptor;
}

InstancePlan enforce_instances(InstancePlan plan, const std::vector<std::string>& labels) {
    InstancePlan out;
    out.strategy = plan.strategy;
    bool with_present = false;
    std::size_t past = 0;
    for (auto& l : plan.labels) {
        if (std::find(labels.begin(), labels.end(), l) == labels.end()) continue;
        if (l == kPresentLabel) {
            with_present = true;
            continue;
        }
        if (std::find(out.labels.begin(), out.labels.end(), l) != out.labels.end()) continue;
        if (past == kMaxPastInstances) continue;
        out.labels.push_back(l);
        ++past;
    }
    if (out.strategy == SearchStrategy::present_only) {
        out.labels.clear();
        with_present = true;
    }
    if (out.strategy == SearchStrategy::past_then_present || out.strategy == SearchStrategy::multi_past_and_present) {
        with_present = true;
    }
    if (out.strategy == SearchStrategy::past_only) with_present = false;
    bool present_available = std::find(labels.begin(), labels.end(), kPresentLabel) != labels.end();
    if (with_present && present_available) out.labels.push_back(kPresentLabel);
    if (out.labels.empty()) {
        // Nothing usable was named: fall back to the most recent instance available.
        auto first_past = std::find_if(labels.begin(), labels.end(), [](auto& l) { return l != kPresentLabel; });
        out.labels.push_back(first_past != labels.end() ? *first_past : kPresentLabel);
        out.strategy = out.labels.front() == kPresentLabel ? SearchStrategy::present_only : SearchStrategy::past_only;
    }
    return out;
}

AreaProbabilities enforce_probabilities(AreaProbabilities raw, const std::vector<AreaSummary>& areas,
                                        std::vector<std::string>* warnings) {
    std::vector<std::string> known;
    for (auto& a : areas) known.push_back(a.name);
    AreaProbabilities kept;
    for (auto& [name, p] : raw) {
        if (std::find(known.begin(), known.end(), name) == known.end()) {
            if (warnings) warnings->push_back("dropped unknown area '" + name + "'");
            continue;
        }
        if (std::any_of(kept.begin(), kept.end(), [&](auto& e) { return e.first == name; })) continue;
        double v = p;
        if (!(v >= 0.0) || v > kMaxAreaProbability) {
            double clamped = std::clamp(std::isnan(v) ? 0.0 : v, 0.0, kMaxAreaProbability);
            if (warnings) warnings->push_back("clamped probability of '" + name + "' from " + std::to_string(v));
            v = clamped;
        }
        kept.emplace_back(name, v);
    }
    auto order = [&](const std::string& n) {
        return std::find(known.begin(), known.end(), n) - known.begin();
    };
    std::stable_sort(kept.begin(), kept.end(), [&](auto& a, auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return order(a.first) < order(b.first);
    });
    if (kept.size() > kMaxAreaCandidates) kept.resize(kMaxAreaCandidates);
    return kept;
}

std::vector<int> enforce_viewpoints(std::vector<int> ids, const std::vector<ViewpointSummary>& index) {
    std::vector<int> out;
    for (int id : ids) {
        bool known = std::any_of(index.begin(), index.end(), [&](auto& v) { return v.id == id; });
        if (known && std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
        if (out.size() == kMaxViewpoints) break;
    }
    return out;
}

bool seeded_miss(const NoiseModel& noise, const std::string& target, const DetectionContext& where) {
    if (noise.miss_rate <= 0.0) return false;
    auto key = target + "|" + where.episode + "|" + std::to_string(where.viewpoint);
    std::uint64_t z = text::fnv1a(key, noise.seed ^ 0x9e3779b97f4a7c15ull);
    // FNV leaves the high bits nearly constant for keys differing in the last bytes; finalize first.
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    double u = static_cast<double>(z >> 11) * 0x1.0p-53;
    return u < noise.miss_rate;
}

int key_phrase_score(const Question& q, const std::string& ground_truth, const std::string& answer) {
    if (text::normalize(answer).empty()) return 1;
    // The annotated answer itself always earns full credit.
    if (!ground_truth.empty() && text::contains_phrase(answer, ground_truth)) return 5;
    std::vector<std::string> phrases = q.key_phrases;
    if (phrases.empty()) phrases.push_back(ground_truth);
    std::size_t hits = 0;
    for (auto& p : phrases) hits += text::contains_phrase(answer, p) ? 1 : 0;
    if (hits == phrases.size()) return 5;
    return hits > 0 ? 3 : 1;
}

namespace {

int recency_rank(const std::string& label, const std::vector<std::string>& recent_first) {
    if (label == kPresentLabel) return -1;
    auto it = std::find(recent_first.begin(), recent_first.end(), label);
    return it == recent_first.end() ? static_cast<int>(recent_first.size()) : static_cast<int>(it - recent_first.begin());
}

std::string matched_objects(const MemoryEntry& e) {
    auto head = text::head_tokens(e.target);
    std::string out;
    for (auto& o : e.finding->objects) {
        if (text::overlap(text::content_tokens(o), head) == 0) continue;
        if (!out.empty()) out += ", ";
        out += o;
    }
    return out;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += (i + 1 == items.size()) ? " and " : ", ";
        out += items[i];
    }
    return out;
}

}  // namespace

std::string compose_findings_answer(const Question& q, const WorkingMemory& wm,
                                    const std::vector<std::string>& recent_first) {
    auto findings = wm.findings();
    if (findings.empty()) return kHonestFailure;

    std::stable_sort(findings.begin(), findings.end(), [&](auto* a, auto* b) {
        return recency_rank(a->episode, recent_first) < recency_rank(b->episode, recent_first);
    });

    std::ostringstream os;
    if (text::normalize(q.text).rfind("when ", 0) == 0) {
        const auto& target = findings.front()->target;
        const MemoryEntry* earliest = nullptr;
        for (auto* f : findings) {
            if (f->target != target) continue;
            if (!earliest || recency_rank(f->episode, recent_first) > recency_rank(earliest->episode, recent_first)) {
                earliest = f;
            }
        }
        std::vector<std::string> absent;
        for (auto& label : wm.searched_instances(target)) {
            bool found = std::any_of(findings.begin(), findings.end(),
                                     [&](auto* f) { return f->target == target && f->episode == label; });
            if (!found) absent.push_back(label);
        }
        os << "The " << target << " was first seen on " << earliest->episode << " in the " << earliest->area << ".";
        if (!absent.empty()) os << " It was not seen on " << join(absent) << ".";
        os << " It appeared before " << earliest->episode << ".";
        return os.str();
    }

    std::set<std::tuple<std::string, std::string, std::string>> seen;
    bool first = true;
    for (auto* f : findings) {
        if (!seen.emplace(f->target, f->episode, f->area).second) continue;
        if (!first) os << " ";
        first = false;
        auto objs = matched_objects(*f);
        if (f->episode == kPresentLabel) {
            os << "The " << f->target << " is in the " << f->area << " now";
        } else {
            os << "On " << f->episode << " the " << f->target << " was in the " << f->area;
        }
        if (!objs.empty()) os << " (" << objs << ")";
        os << ".";
    }
    return os.str();
}

// ---------------------------------------------------------------------------

void TracingOracle::log(const std::string& call, const json& inputs, const json& payload,
                        const std::string& reasoning) {
    log_.record("oracle", {{"call", call},
                           {"inputs_digest", text::hex_digest(inputs.dump())},
                           {"payload", payload},
                           {"reasoning", reasoning}});
}

Decision<bool> TracingOracle::is_ready_to_answer(const Question& q, const WorkingMemory& wm) {
    auto d = inner_.is_ready_to_answer(q, wm);
    log("is_ready_to_answer", {q.id, wm.entries().size()}, d.value, d.reasoning);
    return d;
}

Decision<std::string> TracingOracle::identify_target(const Question& q, const WorkingMemory& wm) {
    auto d = inner_.identify_target(q, wm);
    log("identify_target", {q.id, wm.entries().size()}, d.value, d.reasoning);
    return d;
}

Decision<InstancePlan> TracingOracle::select_world_instances(const std::string& target, const Question& q,
                                                             const std::vector<std::string>& labels,
                                                             const WorkingMemory& wm) {
    auto d = inner_.select_world_instances(target, q, labels, wm);
    log("select_world_instances", {target, q.id, labels, wm.entries().size()},
        {{"strategy", to_string(d.value.strategy)}, {"instances", d.value.labels}}, d.reasoning);
    return d;
}

Decision<AreaProbabilities> TracingOracle::area_probabilities(const std::string& target, const Question& q,
                                                              const std::string& instance,
                                                              const std::vector<AreaSummary>& areas,
                                                              const WorkingMemory& wm) {
    auto d = inner_.area_probabilities(target, q, instance, areas, wm);
    json names = json::array();
    for (auto& a : areas) names.push_back(a.name);
    json payload = json::array();
    for (auto& [name, p] : d.value) payload.push_back({name, p});
    log("area_probabilities", {target, q.id, instance, names, wm.entries().size()}, payload, d.reasoning);
    return d;
}

Decision<std::vector<int>> TracingOracle::select_viewpoints(const std::string& target, const Question& q,
                                                            const std::string& instance,
                                                            const std::vector<ViewpointSummary>& index) {
    auto d = inner_.select_viewpoints(target, q, instance, index);
    json ids = json::array();
    for (auto& v : index) ids.push_back(v.id);
    log("select_viewpoints", {target, q.id, instance, ids}, d.value, d.reasoning);
    return d;
}

bool TracingOracle::detect(const std::string& target, const Observation& obs, const DetectionContext& where) {
    bool found = inner_.detect(target, obs, where);
    log("detect", {target, obs, where.episode, where.viewpoint}, found,
        found ? "Object found!" : "Object NOT found!");
    return found;
}

Decision<std::string> TracingOracle::answer(const Question& q, const WorkingMemory& wm) {
    auto d = inner_.answer(q, wm);
    log("answer", {q.id, wm.entries().size()}, d.value, d.reasoning);
    return d;
}

int TracingOracle::score(const Question& q, const std::string& ground_truth, const std::string& answer) {
    int s = inner_.score(q, ground_truth, answer);
    log("score", {q.id, ground_truth, answer}, s, "");
    return s;
}

}  // namespace mindpalace
