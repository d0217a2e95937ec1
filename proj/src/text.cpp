#include "mindpalace/text.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

namespace mindpalace::text {

namespace {

const std::set<std::string>& stopwords() {
    static const std::set<std::string> words = {
        "a", "an", "the", "and", "or", "of", "to", "in", "on", "at", "by", "for", "with",
        "from", "near", "under", "is", "are", "was", "were", "be", "been", "it", "its", "this",
        "that", "these", "those", "my", "our", "your", "i", "we", "you", "me", "do", "did",
        "does", "has", "have", "had", "can", "could", "will", "would", "what", "where", "when",
        "which", "who", "how", "there", "any", "some", "something", "used", "use", "up", "if",
        "than", "then", "so", "as", "into", "onto", "over", "about", "still", "now", "right",
        "last", "left", "leave", "know", "find", "see", "seen", "thing", "one",
    };
    return words;
}

const std::set<std::string>& phrase_breaks() {
    static const std::set<std::string> words = {
        "at", "in", "on", "near", "by", "with", "from", "under", "inside", "behind", "next",
        "beside", "that", "which", "for", "of", "to",
    };
    return words;
}

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos) return {};
    auto end = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(begin, end - begin + 1));
}

std::string normalize(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool space = false;
    for (unsigned char c : s) {
        if (std::isalnum(c)) {
            if (space && !out.empty()) out.push_back(' ');
            space = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        } else {
            space = true;
        }
    }
    return out;
}

std::string stem(std::string_view word) {
    std::string w = to_lower(word);
    auto ends_with = [&](std::string_view suffix) {
        return w.size() > suffix.size() + 1 && w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (ends_with("ies")) return w.substr(0, w.size() - 3) + "y";
    if (ends_with("sses") || ends_with("xes") || ends_with("ches") || ends_with("shes")) {
        return w.substr(0, w.size() - 2);
    }
    if (ends_with("s") && !ends_with("ss") && !ends_with("us")) return w.substr(0, w.size() - 1);
    return w;
}

std::vector<std::string> tokens(std::string_view s) {
    std::vector<std::string> out;
    std::string norm = normalize(s);
    std::size_t pos = 0;
    while (pos < norm.size()) {
        auto next = norm.find(' ', pos);
        if (next == std::string::npos) next = norm.size();
        out.push_back(stem(std::string_view(norm).substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

std::set<std::string> content_tokens(std::string_view s) {
    std::set<std::string> out;
    for (auto& t : tokens(s)) {
        if (!stopwords().count(t)) out.insert(t);
    }
    return out;
}

std::set<std::string> head_tokens(std::string_view descriptor) {
    std::set<std::string> out;
    for (auto& t : tokens(descriptor)) {
        if (phrase_breaks().count(t) && !out.empty()) break;
        if (!stopwords().count(t)) out.insert(t);
    }
    return out;
}

std::size_t overlap(const std::set<std::string>& a, const std::set<std::string>& b) {
    std::size_t n = 0;
    for (auto& t : a) n += b.count(t);
    return n;
}

bool contains_phrase(std::string_view haystack, std::string_view phrase) {
    std::string needle = normalize(phrase);
    if (needle.empty()) return false;
    std::string hay = " " + normalize(haystack) + " ";
    return hay.find(" " + needle + " ") != std::string::npos;
}

std::size_t word_count(std::string_view s) {
    std::string norm = normalize(s);
    if (norm.empty()) return 0;
    return static_cast<std::size_t>(std::count(norm.begin(), norm.end(), ' ')) + 1;
}

std::string first_words(std::string_view s, std::size_t n) {
    std::string out;
    std::size_t count = 0;
    std::size_t pos = 0;
    std::string str = trim(s);
    while (pos < str.size() && count < n) {
        auto next = str.find(' ', pos);
        if (next == std::string::npos) next = str.size();
        if (next > pos) {
            if (!out.empty()) out.push_back(' ');
            out += str.substr(pos, next - pos);
            ++count;
        }
        pos = next + 1;
    }
    return out;
}

Lexicon::Lexicon(std::map<std::string, std::vector<std::string>> synonyms) {
    for (auto& [key, labels] : synonyms) {
        auto& slot = synonyms_[normalize(key)];
        for (auto& l : labels) slot.push_back(normalize(l));
    }
}

std::vector<std::string> Lexicon::expand(std::string_view descriptor) const {
    std::vector<std::string> out{normalize(descriptor)};
    auto it = synonyms_.find(normalize(descriptor));
    if (it == synonyms_.end()) {
        // A synonym key may be the head phrase of a longer descriptor.
        auto head = head_tokens(descriptor);
        for (auto& [key, labels] : synonyms_) {
            if (!head.empty() && content_tokens(key) == head) {
                out.insert(out.end(), labels.begin(), labels.end());
            }
        }
        return out;
    }
    out.insert(out.end(), it->second.begin(), it->second.end());
    return out;
}

bool Lexicon::matches(std::string_view descriptor, std::string_view label) const {
    auto label_tokens = content_tokens(label);
    if (label_tokens.empty()) return false;
    for (auto& candidate : expand(descriptor)) {
        auto head = head_tokens(candidate);
        if (head.empty()) continue;
        bool head_in_label = std::includes(label_tokens.begin(), label_tokens.end(), head.begin(), head.end());
        bool label_in_head = std::includes(head.begin(), head.end(), label_tokens.begin(), label_tokens.end());
        if (head_in_label || label_in_head) return true;
    }
    return false;
}

std::uint64_t fnv1a(std::string_view data, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex_digest(std::string_view data) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(data)));
    return buf;
}

}  // namespace mindpalace::text
