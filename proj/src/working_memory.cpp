#include "mindpalace/working_memory.hpp"

#include <algorithm>
#include <sstream>

namespace mindpalace {

std::string to_string(EntryKind kind) {
    switch (kind) {
        case EntryKind::retrieve: return "retrieve";
        case EntryKind::explore: return "explore";
        case EntryKind::caption: return "caption";
        case EntryKind::reason: return "reason";
    }
    return "reason";
}

int WorkingMemory::append(MemoryEntry entry) {
    entry.step = entries_.empty() ? 0 : entries_.back().step + 1;
    entries_.push_back(std::move(entry));
    return entries_.back().step;
}

bool WorkingMemory::visited(const std::string& episode, int viewpoint) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const MemoryEntry& e) {
        return e.kind != EntryKind::reason && e.episode == episode && e.viewpoint == viewpoint;
    });
}

std::vector<const MemoryEntry*> WorkingMemory::findings() const {
    std::vector<const MemoryEntry*> out;
    for (auto& e : entries_)
        if (e.finding) out.push_back(&e);
    return out;
}

std::vector<const MemoryEntry*> WorkingMemory::findings_for(const std::string& target) const {
    std::vector<const MemoryEntry*> out;
    for (auto& e : entries_)
        if (e.finding && e.target == target) out.push_back(&e);
    return out;
}

std::vector<std::string> WorkingMemory::searched_instances(const std::string& target) const {
    std::vector<std::string> out;
    for (auto& e : entries_) {
        if (e.kind == EntryKind::reason || e.target != target) continue;
        if (std::find(out.begin(), out.end(), e.episode) == out.end()) out.push_back(e.episode);
    }
    return out;
}

std::string WorkingMemory::summary() const {
    if (entries_.empty()) return "(nothing collected yet)";
    std::ostringstream os;
    for (auto& e : entries_) {
        os << "[" << e.step << "] " << to_string(e.kind);
        if (e.kind != EntryKind::reason) {
            os << " " << e.episode << " viewpoint " << e.viewpoint << " (" << e.area << ")";
            if (!e.target.empty()) os << " searching '" << e.target << "'";
            if (e.finding) {
                os << ": found; objects:";
                for (auto& o : e.finding->objects) os << " " << o << ";";
                if (!e.finding->caption.empty()) os << " caption: " << e.finding->caption;
            } else {
                os << ": not found";
            }
        }
        if (!e.note.empty()) os << " - " << e.note;
        os << "\n";
    }
    return os.str();
}

void to_json(nlohmann::json& j, const MemoryEntry& e) {
    j = {{"step", e.step},   {"kind", to_string(e.kind)}, {"episode", e.episode},
         {"viewpoint", e.viewpoint}, {"area", e.area}, {"target", e.target},
         {"note", e.note}};
    j["finding"] = e.finding ? nlohmann::json(*e.finding) : nlohmann::json(nullptr);
}

}  // namespace mindpalace
