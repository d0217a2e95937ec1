#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mindpalace {

// Ordered JSONL records of one run: oracle calls, actions and decisions.
class TraceLog {
public:
    // Adds "step" and "event" fields and stores the record.
    void record(const std::string& event, nlohmann::json payload);

    const std::vector<nlohmann::json>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }

    void write_jsonl(std::ostream& os) const;

private:
    std::vector<nlohmann::json> records_;
};

}  // namespace mindpalace
