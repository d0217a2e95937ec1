#include <algorithm>
#include <map>

#include "mindpalace/oracle.hpp"
#include "mindpalace/text.hpp"

namespace mindpalace {

namespace {

const std::set<std::string>& determiners() {
    static const std::set<std::string> words = {"the", "my", "a", "an", "our", "your", "his", "her", "their"};
    return words;
}

// Words that end the noun phrase following a determiner.
const std::set<std::string>& phrase_end() {
    static const std::set<std::string> words = {
        "at", "in", "on", "near", "by", "with", "from", "under", "inside", "behind", "next", "beside",
        "that", "which", "for", "of", "to", "is", "are", "was", "were", "be", "been", "did", "do",
        "does", "have", "has", "had", "will", "when", "where", "before", "after", "last", "now",
        "today", "yesterday", "this", "and", "or", "still", "right", "currently", "usually",
        "delivered", "left", "moved", "put", "placed", "go", "gone", "there", "it",
    };
    return words;
}

std::string noun_phrase(const std::string& question) {
    auto words = text::tokens(question);
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (!determiners().count(words[i])) continue;
        std::string phrase;
        for (std::size_t j = i + 1; j < words.size() && !phrase_end().count(words[j]); ++j) {
            if (!phrase.empty()) phrase += ' ';
            phrase += words[j];
        }
        if (!phrase.empty()) return phrase;
    }
    return {};
}

bool has_any(const std::string& question, std::initializer_list<const char*> cues) {
    return std::any_of(cues.begin(), cues.end(), [&](const char* c) { return text::contains_phrase(question, c); });
}

bool label_mentioned(const std::string& question, const std::string& label) {
    if (text::contains_phrase(question, label)) return true;
    auto words = text::tokens(label);
    // "on thursday" names "thursday afternoon" when only one instance carries that day.
    return !words.empty() && text::contains_phrase(question, words.front());
}

bool caption_mentions(const std::string& target, const Observation& obs) {
    auto head = text::head_tokens(target);
    return !head.empty() && text::overlap(head, text::content_tokens(obs.caption)) == head.size();
}

}  // namespace

HeuristicOracle::HeuristicOracle(text::Lexicon lexicon, std::vector<std::string> recent_first, NoiseModel noise)
    : lexicon_(std::move(lexicon)), recent_first_(std::move(recent_first)), noise_(noise) {}

std::vector<std::string> HeuristicOracle::targets_of(const Question& q) const {
    if (!q.targets.empty()) return q.targets;
    auto phrase = noun_phrase(q.text);
    if (phrase.empty()) return {};
    return {phrase};
}

Decision<bool> HeuristicOracle::is_ready_to_answer(const Question& q, const WorkingMemory& wm) {
    auto targets = targets_of(q);
    if (targets.empty()) {
        bool ready = !wm.findings().empty();
        return {ready, ready ? "Something relevant was observed." : "Nothing relevant observed yet."};
    }
    for (auto& t : targets) {
        if (wm.findings_for(t).empty()) return {false, "No observation of '" + t + "' yet."};
    }
    return {true, "Every target has at least one observation."};
}

Decision<std::string> HeuristicOracle::identify_target(const Question& q, const WorkingMemory& wm) {
    auto targets = targets_of(q);
    for (auto& t : targets) {
        if (wm.findings_for(t).empty()) return {enforce_target(t, q), "First target without an observation."};
    }
    if (!targets.empty()) return {enforce_target(targets.back(), q), "All targets observed."};
    return {enforce_target("", q), "No noun phrase found; using the question words."};
}

Decision<InstancePlan> HeuristicOracle::select_world_instances(const std::string&, const Question& q,
                                                              const std::vector<std::string>& labels,
                                                              const WorkingMemory&) {
    std::vector<std::string> past;
    for (auto& l : labels)
        if (l != kPresentLabel) past.push_back(l);

    std::vector<std::string> named;
    for (auto& l : past)
        if (label_mentioned(q.text, l)) named.push_back(l);

    bool future = has_any(q.text, {"will", "next", "going to", "run out", "how many more", "by then"});
    bool present = has_any(q.text, {"now", "currently", "right now", "at the moment", "still", "today"});
    bool when = text::normalize(q.text).rfind("when ", 0) == 0;
    bool usually = has_any(q.text, {"usually", "typically", "every", "each", "always", "often", "ever"});

    InstancePlan plan;
    std::string why;
    if (future) {
        plan = {SearchStrategy::multi_past_and_present, past};
        plan.labels.push_back(kPresentLabel);
        why = "Prediction needs the trend over past instances and the present state.";
    } else if (present && !named.empty()) {
        plan = {SearchStrategy::past_then_present, named};
        plan.labels.push_back(kPresentLabel);
        why = "Compares a named past instance with the present.";
    } else if (present) {
        bool remembered = has_any(q.text, {"left", "put", "placed", "saw", "was", "were", "did"});
        if (remembered && !past.empty()) {
            plan = {SearchStrategy::past_then_present, {past.front(), kPresentLabel}};
            why = "The most recent memory is the best prior for the present location.";
        } else {
            plan = {SearchStrategy::present_only, {kPresentLabel}};
            why = "The question asks about the present state only.";
        }
    } else if (!named.empty()) {
        plan = {SearchStrategy::past_only, named};
        why = "The question names past instances.";
    } else if (when || usually) {
        plan = {SearchStrategy::past_only, past};
        why = "Timing questions need several past instances, most recent first.";
    } else if (!past.empty()) {
        plan = {SearchStrategy::past_then_present, {past.front(), kPresentLabel}};
        why = "Past instances are preferred; the present confirms.";
    } else {
        plan = {SearchStrategy::present_only, {kPresentLabel}};
        why = "No past instance is available.";
    }
    return {enforce_instances(plan, labels), why};
}

Decision<AreaProbabilities> HeuristicOracle::area_probabilities(const std::string& target, const Question&,
                                                                const std::string& instance,
                                                                const std::vector<AreaSummary>& areas,
                                                                const WorkingMemory& wm) {
    auto head = text::head_tokens(target);
    // Most recent past finding per area, used as a prior for the present.
    std::map<std::string, int> seen_rank;
    if (instance == kPresentLabel) {
        for (auto* f : wm.findings_for(target)) {
            if (f->episode == kPresentLabel) continue;
            auto it = std::find(recent_first_.begin(), recent_first_.end(), f->episode);
            int rank = it == recent_first_.end() ? static_cast<int>(recent_first_.size())
                                                 : static_cast<int>(it - recent_first_.begin());
            auto [pos, inserted] = seen_rank.emplace(f->area, rank);
            if (!inserted) pos->second = std::min(pos->second, rank);
        }
    }
    int best_rank = seen_rank.empty() ? 0 : std::min_element(seen_rank.begin(), seen_rank.end(), [](auto& a, auto& b) {
                                                 return a.second < b.second;
                                             })->second;

    AreaProbabilities raw;
    std::string reasoning;
    for (auto& a : areas) {
        double p = 0.05;
        bool object_hit = std::any_of(a.objects.begin(), a.objects.end(),
                                      [&](const std::string& o) { return lexicon_.matches(target, o); });
        if (object_hit) {
            p = 0.9;
        } else if (auto it = seen_rank.find(a.name); it != seen_rank.end()) {
            p = it->second == best_rank ? 0.85 : 0.5;
        } else if (!head.empty()) {
            auto words = text::content_tokens(a.description + " " + a.name);
            double frac = static_cast<double>(text::overlap(head, words)) / static_cast<double>(head.size());
            p = std::max(p, 0.4 * frac);
        }
        raw.emplace_back(a.name, p);
        if (p > 0.05) reasoning += a.name + " looks likely (" + std::to_string(p).substr(0, 4) + "). ";
    }
    if (instance != kPresentLabel) {
        // A memory is fully indexed: areas whose records never mention the target are not worth recalling.
        raw.erase(std::remove_if(raw.begin(), raw.end(), [](auto& e) { return e.second <= 0.05; }), raw.end());
        if (raw.empty()) reasoning = "No area of " + instance + " mentions the target.";
    }
    if (reasoning.empty()) reasoning = "No area shows the target; probabilities are flat.";
    return {enforce_probabilities(std::move(raw), areas), reasoning};
}

Decision<std::vector<int>> HeuristicOracle::select_viewpoints(const std::string& target, const Question&,
                                                              const std::string&,
                                                              const std::vector<ViewpointSummary>& index) {
    auto head = text::head_tokens(target);
    std::vector<std::pair<double, int>> ranked;
    for (auto& v : index) {
        double s = 0.0;
        if (std::any_of(v.objects.begin(), v.objects.end(), [&](auto& o) { return lexicon_.matches(target, o); })) {
            s += 10.0;
        }
        std::set<std::string> words = text::content_tokens(v.caption);
        for (auto& o : v.objects) {
            auto ot = text::content_tokens(o);
            words.insert(ot.begin(), ot.end());
        }
        s += static_cast<double>(text::overlap(head, words));
        ranked.emplace_back(-s, v.id);
    }
    std::sort(ranked.begin(), ranked.end());
    std::vector<int> ids;
    for (auto& [neg, id] : ranked) ids.push_back(id);
    return {enforce_viewpoints(std::move(ids), index), "Ranked by overlap with the target description."};
}

bool HeuristicOracle::detect(const std::string& target, const Observation& obs, const DetectionContext& where) {
    bool found = std::any_of(obs.objects.begin(), obs.objects.end(),
                             [&](const std::string& o) { return lexicon_.matches(target, o); }) ||
                 caption_mentions(target, obs);
    return found && !seeded_miss(noise_, target, where);
}

Decision<std::string> HeuristicOracle::answer(const Question& q, const WorkingMemory& wm) {
    return {compose_findings_answer(q, wm, recent_first_), "Answer assembled from the observations."};
}

int HeuristicOracle::score(const Question& q, const std::string& ground_truth, const std::string& answer) {
    return key_phrase_score(q, ground_truth, answer);
}

}  // namespace mindpalace
