#include "theorygen/core/text.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace theorygen {

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string> tokenize_words(std::string_view s) {
    std::vector<std::string> words;
    std::string cur;
    for (unsigned char c : s) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            if (cur.size() >= 3) words.push_back(cur);
            cur.clear();
        }
    }
    if (cur.size() >= 3) words.push_back(cur);
    return words;
}

double lexical_overlap(std::string_view query, std::string_view candidate) {
    auto qw = tokenize_words(query);
    std::set<std::string> qset(qw.begin(), qw.end());
    if (qset.empty()) return 0.0;
    auto cw = tokenize_words(candidate);
    std::set<std::string> cset(cw.begin(), cw.end());
    std::size_t hits = 0;
    for (const auto& w : qset) {
        if (cset.count(w)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(qset.size());
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

}  // namespace theorygen
