#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mindpalace/memory.hpp"
#include "mindpalace/text.hpp"
#include "mindpalace/worldsim.hpp"

namespace mindpalace {

enum class SearchStrategy { past_only, present_only, past_then_present, multi_past_and_present };

std::string to_string(SearchStrategy s);  // "PAST_ONLY", ...
SearchStrategy parse_strategy(std::string_view s);  // accepts "PAST ONLY" and "past_only" too

enum class QuestionType { past, present, multi_past, past_present, past_present_future };

inline constexpr QuestionType kQuestionTypes[] = {
    QuestionType::past, QuestionType::present, QuestionType::multi_past,
    QuestionType::past_present, QuestionType::past_present_future};

std::string to_string(QuestionType t);
QuestionType parse_question_type(std::string_view s);

struct Evidence {
    std::string episode;  // past label or kPresentLabel
    int viewpoint = 0;
    bool present = true;  // false: the object is known to be absent there
};

struct Question {
    std::string id;
    std::string text;
    QuestionType qtype = QuestionType::past;
    std::string ground_truth;
    std::vector<std::string> key_phrases;
    std::vector<std::string> targets;
    std::vector<Evidence> evidence;
    std::vector<int> annotated_solution;  // w*
    int start_viewpoint = 0;

    // Optional annotations consumed by the scripted oracle.
    std::optional<SearchStrategy> strategy;
    std::vector<std::string> instances;
    std::string answer_template;  // may reference {area}, {episode}, {object}
};

struct Scenario {
    std::string name;
    std::uint64_t seed = 0;
    World world;
    std::vector<EpisodeMemory> episodes;  // chronological, oldest first
    std::vector<Question> questions;
    text::Lexicon lexicon;
    GraphConfig graph;

    const Question& question(const std::string& id) const;
    std::vector<std::string> past_labels_recent_first() const;
};

// Parses and validates. Throws ValidationError listing every problem found.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);

// Schema and reference checks without throwing; empty result means valid.
std::vector<std::string> validate_scenario(const nlohmann::json& doc);

nlohmann::json scenario_to_json(const Scenario& scenario);

void to_json(nlohmann::json& j, const Question& q);
void from_json(const nlohmann::json& j, Question& q);

}  // namespace mindpalace
