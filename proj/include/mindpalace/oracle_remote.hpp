#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "mindpalace/oracle.hpp"

namespace mindpalace {

struct RemoteConfig {
    std::string endpoint = "http://127.0.0.1:8000/v1/chat/completions";
    std::string model = "gpt-4o";
    std::string api_key_env = "MINDPALACE_API_KEY";  // sent as a bearer token when set
    double timeout_s = 30.0;
    int max_retries = 2;
};

// Reads the [remote] section of a key = value config file. Unknown keys are rejected.
RemoteConfig remote_config_from(const std::map<std::string, std::string>& section);

// Finds "Label: value" on its own line, case-insensitively. Returns nullopt when absent.
std::optional<std::string> labeled_field(const std::string& reply, const std::string& label);

// Chat-completion client speaking the OpenAI-style JSON contract over plain HTTP.
class RemoteOracle : public Oracle {
public:
    // `recent_first` is the palace label order, used when composing prompts.
    explicit RemoteOracle(RemoteConfig config, std::vector<std::string> recent_first = {});

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

    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    // Sends one prompt and returns the assistant message text. Throws OracleTransportError.
    std::string complete(const std::string& system, const std::string& user);

    // complete() followed by `parse`, retried on transport and parse errors.
    template <class T>
    T ask(const std::string& system, const std::string& user, const std::function<T(const std::string&)>& parse);

    RemoteConfig config_;
    std::vector<std::string> recent_first_;
    std::vector<std::string> warnings_;
    std::string scheme_host_;
    std::string path_;
};

}  // namespace mindpalace
