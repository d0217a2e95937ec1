#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mindpalace {

struct EvalRecord {
    std::string question_id;
    std::string agent;
    std::string qtype;
    int sigma = 1;
    double p = 0.0;  // meters traveled by the agent
    double l = 0.0;  // meters of the annotated solution
    int retrieved_images = 0;
    int explored_viewpoints = 0;
    std::string answer;
    std::string error;  // empty when the run completed
    int stops = 0;      // early-stopping firings
    // Run-specific, nondeterministic values live here so results can be compared without them.
    double wall_time = 0.0;
    std::string finished_at;
};

// C = (sigma - 1) / 4 * 100. Throws ValidationError outside 1..5.
double correctness(int sigma);

// (sigma - 1) / 4 when l = p = 0, otherwise (sigma - 1) / 4 * l / max(l, p). Fraction in [0, 1].
double exploration_efficiency_fraction(int sigma, double p, double l);
double exploration_efficiency(int sigma, double p, double l);  // percent

// Number of "retrieve" action records in a run trace.
int retrieval_count(const std::vector<nlohmann::json>& trace);

struct SummaryRow {
    std::string label;
    std::size_t count = 0;
    double correctness = 0.0;  // percent
    double efficiency = 0.0;   // fraction
    double retrievals = 0.0;
};

// Means over the records. Throws ValidationError when empty.
SummaryRow aggregate(const std::vector<EvalRecord>& records, std::string label = {});

// "65.0% | 0.45 | 22.86"
std::string render_row(const SummaryRow& row);

std::string render_table(const std::vector<SummaryRow>& rows, const std::string& title);
std::string render_csv(const std::vector<SummaryRow>& rows);

// "timestamp" holds the wall time and finish time; everything else is deterministic.
nlohmann::json to_json(const EvalRecord& r);
EvalRecord record_from_json(const nlohmann::json& j);

std::vector<EvalRecord> read_results(std::istream& in);
void write_results(std::ostream& out, const std::vector<EvalRecord>& records);

}  // namespace mindpalace
