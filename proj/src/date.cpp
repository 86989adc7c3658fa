#include "ctopen/date.hpp"

#include <cstdio>
#include <stdexcept>

namespace ctopen {

bool is_leap_year(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
    static const int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month < 1 || month > 12) return 0;
    if (month == 2 && is_leap_year(year)) return 29;
    return lengths[month - 1];
}

bool Date::is_valid() const {
    return month >= 1 && month <= 12 && day >= 1 && day <= days_in_month(year, month);
}

std::string Date::to_iso() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

// civil-day conversions after Howard Hinnant's chrono algorithms
std::int64_t Date::to_epoch_days() const {
    std::int64_t y = year;
    y -= month <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

Date Date::from_epoch_days(std::int64_t days) {
    days += 719468;
    const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(days - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

Date Date::plus_days(std::int64_t n) const {
    return from_epoch_days(to_epoch_days() + n);
}

std::optional<Date> parse_iso_date(const std::string& text) {
    int y = 0, m = 0, d = 1;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%4d-%2d-%2d%c", &y, &m, &d, &extra) == 3 &&
        text.size() == 10) {
        Date date{y, m, d};
        if (date.is_valid()) return date;
        return std::nullopt;
    }
    d = 1;
    if (std::sscanf(text.c_str(), "%4d-%2d%c", &y, &m, &extra) == 2 && text.size() == 7) {
        Date date{y, m, 1};
        if (date.is_valid()) return date;
    }
    return std::nullopt;
}

std::int64_t days_between(const Date& a, const Date& b) {
    return b.to_epoch_days() - a.to_epoch_days();
}

bool DateWindow::contains(const Date& d) const {
    if (start && d < *start) return false;
    if (end && !(d < *end)) return false;
    return true;
}

std::string DateWindow::to_string() const {
    std::string s = "[";
    s += start ? start->to_iso() : "-inf";
    s += ", ";
    s += end ? end->to_iso() : "+inf";
    s += ")";
    return s;
}

DateWindow DateWindow::all() { return {}; }
DateWindow DateWindow::before(const Date& end) { return {std::nullopt, end}; }
DateWindow DateWindow::from(const Date& start) { return {start, std::nullopt}; }

DateWindow DateWindow::between(const Date& start, const Date& end) {
    if (!(start < end)) throw std::invalid_argument("DateWindow: start must precede end");
    return {start, end};
}

}  // namespace ctopen
