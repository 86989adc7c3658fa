#include "doctest.h"

#include "ctopen/date.hpp"

using namespace ctopen;

TEST_CASE("calendar validity covers month lengths and leap years") {
    CHECK(Date{2024, 2, 29}.is_valid());
    CHECK_FALSE(Date{2023, 2, 29}.is_valid());
    CHECK(Date{2000, 2, 29}.is_valid());
    CHECK_FALSE(Date{1900, 2, 29}.is_valid());
    CHECK_FALSE(Date{2024, 13, 1}.is_valid());
    CHECK_FALSE(Date{2024, 4, 31}.is_valid());
    CHECK(Date{2024, 12, 31}.is_valid());
    CHECK_FALSE(Date{2024, 0, 10}.is_valid());
}

TEST_CASE("epoch-day conversion round-trips and orders") {
    Date d{2025, 1, 31};
    CHECK(Date::from_epoch_days(d.to_epoch_days()) == d);
    CHECK(d.plus_days(1) == Date{2025, 2, 1});
    CHECK(Date{2026, 6, 1}.plus_days(-1) == Date{2026, 5, 31});
    CHECK(days_between(Date{2026, 9, 1}, Date{2026, 10, 2}) == 31);
    CHECK(days_between(Date{2026, 9, 1}, Date{2026, 10, 3}) == 32);
    // around a leap day
    CHECK(days_between(Date{2024, 2, 28}, Date{2024, 3, 1}) == 2);
}

TEST_CASE("iso parsing accepts dates and year-month, rejects junk") {
    CHECK(parse_iso_date("2025-01-31") == Date{2025, 1, 31});
    CHECK(parse_iso_date("2025-01") == Date{2025, 1, 1});
    CHECK_FALSE(parse_iso_date("2025-02-30").has_value());
    CHECK_FALSE(parse_iso_date("not a date").has_value());
    CHECK_FALSE(parse_iso_date("2025-01-31T00:00:00Z").has_value());
    CHECK_FALSE(parse_iso_date("20250131").has_value());
}

TEST_CASE("date window is start-inclusive end-exclusive") {
    DateWindow w = DateWindow::between(Date{2026, 6, 1}, Date{2026, 9, 1});
    CHECK(w.contains(Date{2026, 6, 1}));
    CHECK(w.contains(Date{2026, 8, 31}));
    CHECK_FALSE(w.contains(Date{2026, 9, 1}));
    CHECK_FALSE(w.contains(Date{2026, 5, 31}));

    DateWindow before = DateWindow::before(Date{2025, 1, 31});
    CHECK(before.contains(Date{1995, 1, 1}));
    CHECK_FALSE(before.contains(Date{2025, 1, 31}));

    DateWindow after = DateWindow::from(Date{2025, 1, 31});
    CHECK(after.contains(Date{2025, 1, 31}));
    CHECK_FALSE(after.contains(Date{2025, 1, 30}));

    CHECK(DateWindow::all().contains(Date{1970, 1, 1}));
    CHECK_THROWS(DateWindow::between(Date{2026, 9, 1}, Date{2026, 6, 1}));
}
