#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mindpalace/memory.hpp"

namespace mindpalace {

enum class EntryKind {
    retrieve,  // past image recalled from the palace
    explore,   // present viewpoint visited
    caption,   // caption text read without an image (baseline analogs only)
    reason,    // oracle reasoning
};

std::string to_string(EntryKind kind);

struct MemoryEntry {
    int step = 0;
    EntryKind kind = EntryKind::reason;
    std::string episode;  // world instance label; kPresentLabel for explore
    int viewpoint = -1;
    std::string area;
    std::string target;                  // descriptor being searched when the entry was made
    std::optional<Observation> finding;  // set iff the target was detected
    std::string note;
};

// h_k: everything the agent did and saw since the question arrived. Append-only.
class WorkingMemory {
public:
    // Assigns the next step index and returns it.
    int append(MemoryEntry entry);

    const std::vector<MemoryEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    bool visited(const std::string& episode, int viewpoint) const;
    std::vector<const MemoryEntry*> findings() const;
    std::vector<const MemoryEntry*> findings_for(const std::string& target) const;
    std::vector<std::string> searched_instances(const std::string& target) const;

    // Plain-text digest used in remote prompts.
    std::string summary() const;

private:
    std::vector<MemoryEntry> entries_;
};

void to_json(nlohmann::json& j, const MemoryEntry& e);

}  // namespace mindpalace
