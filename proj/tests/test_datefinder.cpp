#include "doctest.h"

#include "ctopen/assets.hpp"
#include "ctopen/datefinder.hpp"
#include "support/date_fixtures.hpp"

using namespace ctopen;

namespace {

Clock clock_2026() { return Clock{Date{2026, 12, 31}}; }

const DomainDateHints& hints() {
    static DomainDateHints h =
        DomainDateHints::load(AssetStore::default_root() + "/date_hints/v1.json");
    return h;
}

DateVerdict extract(const std::string& markup, const std::string& url) {
    return extract_publication_date(markup, url, clock_2026(), hints());
}

}  // namespace

TEST_CASE("date validation bounds years to [1990, current year]") {
    Clock clock = clock_2026();
    CHECK(validate_date(2024, 2, 29, clock));
    CHECK_FALSE(validate_date(2023, 2, 29, clock));
    CHECK_FALSE(validate_date(1989, 12, 31, clock));
    CHECK(validate_date(1990, 1, 1, clock));
    CHECK(validate_date(2026, 12, 31, clock));
    CHECK_FALSE(validate_date(2027, 1, 1, clock));
    CHECK_FALSE(validate_date(2024, 13, 1, clock));
    CHECK_FALSE(validate_date(2024, 4, 31, clock));
}

TEST_CASE("date normalization format table") {
    Clock clock = clock_2026();

    // ISO 8601 datetimes and dates
    CHECK(normalize_date_string("2025-08-31T00:00:00Z", clock) == Date{2025, 8, 31});
    CHECK(normalize_date_string("2025-08-31T14:20:11.532+02:00", clock) == Date{2025, 8, 31});
    CHECK(normalize_date_string("2025-08-31", clock) == Date{2025, 8, 31});
    CHECK(normalize_date_string("2025-8-3", clock) == Date{2025, 8, 3});

    // year-first with other separators
    CHECK(normalize_date_string("2024/03/05", clock) == Date{2024, 3, 5});
    CHECK(normalize_date_string("2024.03.05", clock) == Date{2024, 3, 5});

    // day-first vs month-first numeric
    DateHints day_first{true};
    CHECK(normalize_date_string("05/03/1999", clock, day_first) == Date{1999, 3, 5});
    CHECK(normalize_date_string("05/03/1999", clock) == Date{1999, 5, 3});
    // an unambiguous reading wins regardless of the hint
    CHECK(normalize_date_string("25/03/2024", clock) == Date{2024, 3, 25});

    // two-digit year pivot: 00-49 -> 2000s, 50-99 -> 1900s
    CHECK(normalize_date_string("05/03/99", clock, day_first) == Date{1999, 3, 5});
    CHECK(normalize_date_string("05/03/24", clock) == Date{2024, 5, 3});
    CHECK(normalize_date_string("05/03/95", clock) == Date{1995, 5, 3});

    // compact 8-digit
    CHECK(normalize_date_string("20240305", clock) == Date{2024, 3, 5});

    // month-name variants in multiple orderings
    CHECK(normalize_date_string("March 5, 2024", clock) == Date{2024, 3, 5});
    CHECK(normalize_date_string("5 March 2024", clock) == Date{2024, 3, 5});
    CHECK(normalize_date_string("Mar 5, 2024", clock) == Date{2024, 3, 5});
    CHECK(normalize_date_string("5-Mar-2024", clock) == Date{2024, 3, 5});
    CHECK(normalize_date_string("2024 March 5", clock) == Date{2024, 3, 5});
    CHECK(normalize_date_string("March 5th, 2024", clock) == Date{2024, 3, 5});

    // year+month and year-only map to the first day
    CHECK(normalize_date_string("2024-03", clock) == Date{2024, 3, 1});
    CHECK(normalize_date_string("03/2024", clock) == Date{2024, 3, 1});
    CHECK(normalize_date_string("March 2024", clock) == Date{2024, 3, 1});
    CHECK(normalize_date_string("2024", clock) == Date{2024, 1, 1});

    // boundary-year policy
    CHECK_FALSE(normalize_date_string("1989-06-01", clock).has_value());
    CHECK_FALSE(normalize_date_string("1989", clock).has_value());
    CHECK_FALSE(normalize_date_string("2030-01-01", clock).has_value());

    // invalid calendar days
    CHECK_FALSE(normalize_date_string("2023-02-29", clock).has_value());
    CHECK(normalize_date_string("2024-02-29", clock) == Date{2024, 2, 29});

    // garbage
    CHECK_FALSE(normalize_date_string("not a date", clock).has_value());
    CHECK_FALSE(normalize_date_string("", clock).has_value());
    CHECK_FALSE(normalize_date_string("123456", clock).has_value());
}

TEST_CASE("each strategy fixture resolves with its own provenance") {
    for (const auto& fixture : ctopen::testing::date_strategy_fixtures()) {
        DateVerdict verdict = extract(fixture.markup, "https://news.example.com/story");
        REQUIRE_MESSAGE(verdict.date.has_value(), "no date for strategy ", fixture.strategy);
        CHECK_MESSAGE(*verdict.date == fixture.expected, "wrong date for ", fixture.strategy,
                      ": got ", verdict.date->to_iso());
        CHECK(verdict.provenance == fixture.strategy);
        for (const auto& c : verdict.all_candidates) {
            CHECK(validate_date(c.normalized.year, c.normalized.month, c.normalized.day,
                                clock_2026()));
        }
    }
}

TEST_CASE("sciencedaily definition-list pairs resolve as a domain container") {
    std::string markup =
        R"(<html><body><dl><dt>Date:</dt><dd>March 5, 2024</dd>
           <dt>Source:</dt><dd>Example University</dd></dl><p>story</p></body></html>)";
    DateVerdict verdict = extract(markup, "https://www.sciencedaily.com/releases/2024/03/x.htm");
    REQUIRE(verdict.date.has_value());
    CHECK(*verdict.date == Date{2024, 3, 5});
    CHECK(verdict.provenance == "domain_containers");
}

TEST_CASE("preprint pages use only the specialized posting-date parser") {
    std::string markup =
        R"(<html><body><div class="pane-content">Posted April 12, 2024.</div>
           <meta property="article:published_time" content="2020-01-01">
           <p>Abstract text</p></body></html>)";
    DateVerdict verdict = extract(markup, "https://www.biorxiv.org/content/10.1101/2024.04.10");
    REQUIRE(verdict.date.has_value());
    CHECK(*verdict.date == Date{2024, 4, 12});
    CHECK(verdict.provenance == "preprint_server");

    DateVerdict med = extract(markup, "https://www.medrxiv.org/content/10.1101/2024.04.10");
    CHECK(med.provenance == "preprint_server");
}

TEST_CASE("video pages parse the embedded script data object") {
    std::string markup =
        R"(<html><body><script>var ytInitialPlayerResponse =
           {"microformat":{"playerMicroformatRenderer":{"publishDate":"2024-03-15",
           "uploadDate":"2024-03-14"}}};</script></body></html>)";
    DateVerdict verdict = extract(markup, "https://www.youtube.com/watch?v=abc123");
    REQUIRE(verdict.date.has_value());
    CHECK(*verdict.date == Date{2024, 3, 14});  // earliest of the embedded dates
    CHECK(verdict.provenance == "video_page");
}

TEST_CASE("priority order is total over crafted strategy pairs") {
    auto fixtures = ctopen::testing::date_strategy_fixtures();
    for (std::size_t i = 0; i < fixtures.size(); ++i) {
        for (std::size_t j = i + 1; j < fixtures.size(); ++j) {
            std::string merged = "<html><body>" + fixtures[i].markup + fixtures[j].markup +
                                 "</body></html>";
            DateVerdict verdict = extract(merged, "https://news.example.com/merged");
            REQUIRE(verdict.date.has_value());
            CHECK_MESSAGE(verdict.provenance == fixtures[i].strategy, "pair (", i, ",", j,
                          ") resolved to ", verdict.provenance);
            CHECK(*verdict.date == fixtures[i].expected);
        }
    }
}

TEST_CASE("earliest candidate wins within the winning strategy") {
    std::string markup =
        R"(<html><body><time>2023-01-10</time><time>2023-01-05</time></body></html>)";
    DateVerdict verdict = extract(markup, "https://example.com/a");
    REQUIRE(verdict.date.has_value());
    CHECK(*verdict.date == Date{2023, 1, 5});

    // the returned date is never later than the minimum candidate of the
    // winning strategy
    Date minimum{9999, 12, 31};
    for (const auto& c : verdict.all_candidates) {
        if (c.strategy == verdict.provenance && c.normalized < minimum) minimum = c.normalized;
    }
    CHECK(*verdict.date == minimum);
}

TEST_CASE("pages whose dates all fail validation yield no verdict") {
    std::string markup =
        R"(<html><head><script type="application/ld+json">{"datePublished":"1989-03-03"}</script>
           <meta property="article:published_time" content="1988-01-01"></head>
           <body><time>1989-07-07</time></body></html>)";
    DateVerdict verdict = extract(markup, "https://example.com/old");
    CHECK_FALSE(verdict.date.has_value());
    CHECK(verdict.provenance.empty());
    CHECK(verdict.all_candidates.empty());
}

TEST_CASE("inconsistent date spans fall through to a later strategy") {
    std::string markup =
        R"(<html><body><span class="post-meta-date">January 7, 2023</span>
           <span class="footer-date">February 9, 2023</span>
           <div id="content"><p>Published March 3, 2021</p></div></body></html>)";
    DateVerdict verdict = extract(markup, "https://example.com/mixed");
    REQUIRE(verdict.date.has_value());
    CHECK(verdict.provenance == "text_scan");
    CHECK(*verdict.date == Date{2021, 3, 3});
}

TEST_CASE("extraction is deterministic") {
    std::string markup = ctopen::testing::date_strategy_fixtures()[0].markup;
    DateVerdict a = extract(markup, "https://example.com/x");
    DateVerdict b = extract(markup, "https://example.com/x");
    REQUIRE(a.date.has_value());
    CHECK(a.date == b.date);
    CHECK(a.provenance == b.provenance);
    CHECK(a.all_candidates.size() == b.all_candidates.size());
}

TEST_CASE("day-first hint table drives slash-date readings per site") {
    std::string markup =
        R"(<html><head><meta property="article:published_time" content="05/03/2021"></head>
           <body><p>s</p></body></html>)";
    DateVerdict uk = extract(markup, "https://www.bbc.co.uk/news/health-123");
    REQUIRE(uk.date.has_value());
    // ambiguous readings surface as two candidates; the earliest wins
    CHECK(*uk.date == Date{2021, 3, 5});
    DateVerdict us = extract(markup, "https://www.usnews.example.com/article");
    REQUIRE(us.date.has_value());
    CHECK(*us.date == Date{2021, 3, 5});
    CHECK(us.all_candidates.size() == 2);
}

TEST_CASE("known problematic domains are skipped") {
    std::string markup = ctopen::testing::date_strategy_fixtures()[0].markup;
    DateVerdict verdict = extract(markup, "https://www.facebook.com/some/post");
    CHECK_FALSE(verdict.date.has_value());
    CHECK(verdict.all_candidates.empty());
}
