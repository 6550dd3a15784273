#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace theorygen {

/// Token-count heuristic (chars / 4) used for context budgeting when the
/// gateway supplies no tokenizer.
inline long estimate_tokens(std::string_view text) {
    return static_cast<long>((text.size() + 3) / 4);
}

std::string to_lower(std::string_view s);

/// Lowercased alphanumeric words, length >= 3.
std::vector<std::string> tokenize_words(std::string_view s);

/// Fraction of the query's distinct words that occur in the candidate text.
/// Lexical relevance fallback for backfill ranking.
double lexical_overlap(std::string_view query, std::string_view candidate);

std::string trim(std::string_view s);

}  // namespace theorygen
