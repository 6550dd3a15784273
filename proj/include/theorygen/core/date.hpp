#pragma once

#include <compare>
#include <optional>
#include <string>

namespace theorygen {

/// ISO-8601 calendar date. Month-granularity inputs ("2024-04") normalize to
/// the first of the month.
struct Date {
    int year = 0;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;

    std::string to_string() const;

    static Date parse(const std::string& text);                 // throws ParseError
    static std::optional<Date> try_parse(const std::string& text);

    /// Calendar arithmetic on whole months; day clamps to the target month's length.
    Date minus_months(int months) const;
};

struct DateRange {
    std::optional<Date> from;  // inclusive
    std::optional<Date> to;    // inclusive

    bool contains(const Date& d) const {
        if (from && d < *from) return false;
        if (to && *to < d) return false;
        return true;
    }
};

}  // namespace theorygen
