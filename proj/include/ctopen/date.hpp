#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace ctopen {

// Calendar date (no time-of-day, no timezone). Field validity is checked
// with is_valid(); publication-date year bounds are a separate concern
// handled by the date finder.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    bool is_valid() const;
    std::string to_iso() const;  // "YYYY-MM-DD"

    // Days since 1970-01-01 (may be negative).
    std::int64_t to_epoch_days() const;
    static Date from_epoch_days(std::int64_t days);

    Date plus_days(std::int64_t n) const;

    auto operator<=>(const Date&) const = default;
};

bool is_leap_year(int year);
int days_in_month(int year, int month);

// Strict "YYYY-MM-DD" or "YYYY-MM" (day defaults to 1). Absent on anything
// else, including calendar-invalid dates.
std::optional<Date> parse_iso_date(const std::string& text);

// Whole days between two dates (b - a).
std::int64_t days_between(const Date& a, const Date& b);

// Half-open publication-date window: start inclusive, end exclusive.
// An absent bound means unbounded on that side.
struct DateWindow {
    std::optional<Date> start;
    std::optional<Date> end;

    bool contains(const Date& d) const;
    bool is_unbounded() const { return !start && !end; }
    std::string to_string() const;  // "[-inf, 2025-01-31)" style, for logs

    static DateWindow all();
    static DateWindow before(const Date& end);
    static DateWindow from(const Date& start);
    static DateWindow between(const Date& start, const Date& end);
};

}  // namespace ctopen
