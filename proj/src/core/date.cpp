#include "theorygen/core/date.hpp"

#include <array>
#include <cstdio>

#include "theorygen/core/errors.hpp"

namespace theorygen {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static constexpr std::array<int, 12> days = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return days[m - 1];
}

}  // namespace

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

std::optional<Date> Date::try_parse(const std::string& text) {
    Date d;
    int n = 0;
    if (std::sscanf(text.c_str(), "%d-%d-%d%n", &d.year, &d.month, &d.day, &n) == 3 &&
        n == static_cast<int>(text.size())) {
        // full calendar date
    } else if (std::sscanf(text.c_str(), "%d-%d%n", &d.year, &d.month, &n) == 2 &&
               n == static_cast<int>(text.size())) {
        d.day = 1;  // month-only input
    } else {
        return std::nullopt;
    }
    if (d.year < 1 || d.month < 1 || d.month > 12 || d.day < 1 ||
        d.day > days_in_month(d.year, d.month)) {
        return std::nullopt;
    }
    return d;
}

Date Date::parse(const std::string& text) {
    auto d = try_parse(text);
    if (!d) throw ParseError("invalid date: '" + text + "'", 0);
    return *d;
}

Date Date::minus_months(int months) const {
    int total = year * 12 + (month - 1) - months;
    Date d;
    d.year = total / 12;
    d.month = total % 12 + 1;
    d.day = std::min(day, days_in_month(d.year, d.month));
    return d;
}

}  // namespace theorygen
