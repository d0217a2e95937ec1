#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mindpalace/memory.hpp"
#include "mindpalace/scenario.hpp"
#include "mindpalace/trace.hpp"
#include "mindpalace/working_memory.hpp"

namespace mindpalace {

// Caps shared by every adapter.
inline constexpr std::size_t kMaxTargetWords = 10;
inline constexpr std::size_t kMaxPastInstances = 5;
inline constexpr std::size_t kMaxAreaCandidates = 10;
inline constexpr std::size_t kMaxViewpoints = 5;
inline constexpr double kMaxAreaProbability = 0.99;

inline const std::string kHonestFailure = "I could not determine the answer from what I recalled or observed.";

template <class T>
struct Decision {
    T value;
    std::string reasoning;
};

struct InstancePlan {
    SearchStrategy strategy = SearchStrategy::past_only;
    std::vector<std::string> labels;  // ordered; kPresentLabel last when included
};

struct AreaSummary {
    std::string name;
    std::set<std::string> objects;   // object_union of the area in this instance
    std::string description;         // member captions, joined
    std::vector<int> viewpoints;     // viewpoints the agent could visit or recall
};

struct ViewpointSummary {
    int id = 0;
    std::string caption;
    std::set<std::string> objects;
    double centroid_distance = 0.0;
};

using AreaProbabilities = std::vector<std::pair<std::string, double>>;  // descending

struct DetectionContext {
    std::string episode;  // instance label
    int viewpoint = -1;
};

// Every LLM/VLM decision point of the agent loop.
class Oracle {
public:
    virtual ~Oracle() = default;

    virtual Decision<bool> is_ready_to_answer(const Question& q, const WorkingMemory& wm) = 0;
    virtual Decision<std::string> identify_target(const Question& q, const WorkingMemory& wm) = 0;
    virtual Decision<InstancePlan> select_world_instances(const std::string& target, const Question& q,
                                                          const std::vector<std::string>& labels,
                                                          const WorkingMemory& wm) = 0;
    virtual Decision<AreaProbabilities> area_probabilities(const std::string& target, const Question& q,
                                                           const std::string& instance,
                                                           const std::vector<AreaSummary>& areas,
                                                           const WorkingMemory& wm) = 0;
    virtual Decision<std::vector<int>> select_viewpoints(const std::string& target, const Question& q,
                                                         const std::string& instance,
                                                         const std::vector<ViewpointSummary>& index) = 0;
    virtual bool detect(const std::string& target, const Observation& obs, const DetectionContext& where) = 0;
    virtual Decision<std::string> answer(const Question& q, const WorkingMemory& wm) = 0;
    virtual int score(const Question& q, const std::string& ground_truth, const std::string& answer) = 0;
};

// Contract enforcement applied to every adapter's raw output.
std::string enforce_target(std::string descriptor, const Question& q);
InstancePlan enforce_instances(InstancePlan plan, const std::vector<std::string>& labels);
AreaProbabilities enforce_probabilities(AreaProbabilities raw, const std::vector<AreaSummary>& areas,
                                        std::vector<std::string>* warnings = nullptr);
std::vector<int> enforce_viewpoints(std::vector<int> ids, const std::vector<ViewpointSummary>& index);

// Key-phrase rubric: 5 if all phrases appear, 3 if some, 1 if none.
int key_phrase_score(const Question& q, const std::string& ground_truth, const std::string& answer);

// Text answer assembled from the positive findings in working memory.
// `recent_first` orders world-instance labels; kPresentLabel counts as most recent.
std::string compose_findings_answer(const Question& q, const WorkingMemory& wm,
                                    const std::vector<std::string>& recent_first);

struct NoiseModel {
    double miss_rate = 0.0;  // probability a true detection is reported as absent
    std::uint64_t seed = 0;
};

// Seeded coin flip: should a true detection of `target` at `where` be dropped?
bool seeded_miss(const NoiseModel& noise, const std::string& target, const DetectionContext& where);

// Ground-truth backed stand-in: reads targets, evidence, strategy and answers from the scenario.
class ScriptedOracle : public Oracle {
public:
    explicit ScriptedOracle(std::shared_ptr<const Scenario> scenario, NoiseModel noise = {});

    Decision<bool> is_ready_to_answer(const Question& q, const WorkingMemory& wm) override;
    Decision<std::string> identify_target(const Question& q, const WorkingMemory& wm) override;
    Decision<InstancePlan> select_world_instances(const std::string& target, const Question& q,
                                                  const std::vector<std::string>& labels,
                                                  const WorkingMemory& wm) override;
    Decision<AreaProbabilities> area_probabilities(const std::string& target, const Question& q,
                                                   const std::string& instance,
                                                   const std::vector<AreaSummary>& areas,
                                                   const WorkingMemory& wm) override;
    Decision<std::vector<int>> select_viewpoints(const std::string& target, const Question& q,
                                                 const std::string& instance,
                                                 const std::vector<ViewpointSummary>& index) override;
    bool detect(const std::string& target, const Observation& obs, const DetectionContext& where) override;
    Decision<std::string> answer(const Question& q, const WorkingMemory& wm) override;
    int score(const Question& q, const std::string& ground_truth, const std::string& answer) override;

private:
    bool truly_present(const std::string& target, const Question* q, const std::string& instance,
                       int viewpoint) const;
    const Question* lookup(const Question& q) const;

    std::shared_ptr<const Scenario> scenario_;
    NoiseModel noise_;
};

// String and object matching only; no access to answers or evidence.
class HeuristicOracle : public Oracle {
public:
    explicit HeuristicOracle(text::Lexicon lexicon, std::vector<std::string> recent_first = {},
                             NoiseModel noise = {});

    Decision<bool> is_ready_to_answer(const Question& q, const WorkingMemory& wm) override;
    Decision<std::string> identify_target(const Question& q, const WorkingMemory& wm) override;
    Decision<InstancePlan> select_world_instances(const std::string& target, const Question& q,
                                                  const std::vector<std::string>& labels,
                                                  const WorkingMemory& wm) override;
    Decision<AreaProbabilities> area_probabilities(const std::string& target, const Question& q,
                                                   const std::string& instance,
                                                   const std::vector<AreaSummary>& areas,
                                                   const WorkingMemory& wm) override;
    Decision<std::vector<int>> select_viewpoints(const std::string& target, const Question& q,
                                                 const std::string& instance,
                                                 const std::vector<ViewpointSummary>& index) override;
    bool detect(const std::string& target, const Observation& obs, const DetectionContext& where) override;
    Decision<std::string> answer(const Question& q, const WorkingMemory& wm) override;
    int score(const Question& q, const std::string& ground_truth, const std::string& answer) override;

private:
    std::vector<std::string> targets_of(const Question& q) const;

    text::Lexicon lexicon_;
    std::vector<std::string> recent_first_;
    NoiseModel noise_;
};

// Decorator that appends one trace record per call.
class TracingOracle : public Oracle {
public:
    TracingOracle(Oracle& inner, TraceLog& log) : inner_(inner), log_(log) {}

    Decision<bool> is_ready_to_answer(const Question& q, const WorkingMemory& wm) override;
    Decision<std::string> identify_target(const Question& q, const WorkingMemory& wm) override;
    Decision<InstancePlan> select_world_instances(const std::string& target, const Question& q,
                                                  const std::vector<std::string>& labels,
                                                  const WorkingMemory& wm) override;
    Decision<AreaProbabilities> area_probabilities(const std::string& target, const Question& q,
                                                   const std::string& instance,
                                                   const std::vector<AreaSummary>& areas,
                                                   const WorkingMemory& wm) override;
    Decision<std::vector<int>> select_viewpoints(const std::string& target, const Question& q,
                                                 const std::string& instance,
                                                 const std::vector<ViewpointSummary>& index) override;
    bool detect(const std::string& target, const Observation& obs, const DetectionContext& where) override;
    Decision<std::string> answer(const Question& q, const WorkingMemory& wm) override;
    int score(const Question& q, const std::string& ground_truth, const std::string& answer) override;

private:
    void log(const std::string& call, const nlohmann::json& inputs, const nlohmann::json& payload,
             const std::string& reasoning);

    Oracle& inner_;
    TraceLog& log_;
};

}  // namespace mindpalace
