#include "mindpalace/trace.hpp"

namespace mindpalace {

void TraceLog::record(const std::string& event, nlohmann::json payload) {
    if (!payload.is_object()) payload = {{"value", std::move(payload)}};
    payload["step"] = records_.size();
    payload["event"] = event;
    records_.push_back(std::move(payload));
}

void TraceLog::write_jsonl(std::ostream& os) const {
    for (auto& r : records_) os << r.dump() << "\n";
}

}  // namespace mindpalace
