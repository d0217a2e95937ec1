#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mindpalace::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::string normalize(std::string_view s);  // lowercase, punctuation -> space, collapsed spaces

// Singular form used for plural-insensitive comparison ("boxes" -> "box").
std::string stem(std::string_view word);

// Lowercase alphanumeric tokens, stemmed. Stopwords kept.
std::vector<std::string> tokens(std::string_view s);

// Stemmed tokens with stopwords removed.
std::set<std::string> content_tokens(std::string_view s);

// Content tokens of the leading noun phrase: "package at the front door" -> {package}.
std::set<std::string> head_tokens(std::string_view descriptor);

std::size_t overlap(const std::set<std::string>& a, const std::set<std::string>& b);

bool contains_phrase(std::string_view haystack, std::string_view phrase);  // normalized substring

std::size_t word_count(std::string_view s);
std::string first_words(std::string_view s, std::size_t n);

// Descriptor -> concrete object labels that satisfy it, as supplied by a scenario.
class Lexicon {
public:
    Lexicon() = default;
    explicit Lexicon(std::map<std::string, std::vector<std::string>> synonyms);

    // Labels that stand in for the descriptor, including the descriptor itself.
    std::vector<std::string> expand(std::string_view descriptor) const;

    // Does an observed object label satisfy the descriptor? Case- and plural-insensitive.
    bool matches(std::string_view descriptor, std::string_view label) const;

    const std::map<std::string, std::vector<std::string>>& entries() const { return synonyms_; }

private:
    std::map<std::string, std::vector<std::string>> synonyms_;  // normalized key
};

// 64-bit FNV-1a, stable across platforms; used for digests and seeded coin flips.
std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 14695981039346656037ull);
std::string hex_digest(std::string_view data);

}  // namespace mindpalace::text
