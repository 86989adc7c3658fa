#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ctopen/date.hpp"
#include "json.hpp"

namespace ctopen {

// Injected clock so "current year" validation is reproducible in tests.
struct Clock {
    Date today;
    static Clock system();
};

// true iff 1990 <= y <= current year and (y, m, d) is a real calendar day.
bool validate_date(int year, int month, int day, const Clock& clock);

struct DateHints {
    bool day_first = false;  // slash-date disambiguation for this site
};

// Robust raw-string normalization: ISO 8601 datetimes, year-first and
// day-first numeric dates, two-digit year pivoting (00-49 -> 2000s,
// 50-99 -> 1900s), compact 8-digit dates, month-name variants, year+month
// and year-only (both mapped to the first day). Absent when unrecognized
// or failing validate_date.
std::optional<Date> normalize_date_string(const std::string& raw, const Clock& clock,
                                          const DateHints& hints = {});

// All defensible readings of a raw string: one for unambiguous forms, two
// when a numeric date is valid both month-first and day-first.
std::vector<Date> normalize_date_readings(const std::string& raw, const Clock& clock,
                                          const DateHints& hints = {});

struct DateCandidate {
    std::string raw;
    Date normalized;
    std::string strategy;
    int priority = 0;  // 1 = highest; 0 for the special handlers
};

struct DateVerdict {
    std::optional<Date> date;
    std::string provenance;  // winning strategy id; empty when no date
    std::vector<DateCandidate> all_candidates;
};

// Per-site-domain parsing hints, a versioned asset file.
struct DomainDateHints {
    std::string version;
    std::set<std::string> day_first_domains;
    std::set<std::string> skip_domains;  // known-problematic, never dated

    static DomainDateHints from_json(const nlohmann::json& j);
    static DomainDateHints load(const std::string& path);
    DateHints for_domain(const std::string& domain) const;
};

// Publication date of a page via the prioritized strategy cascade; preprint
// servers and video pages take their specialized parsers instead. When the
// winning strategy yields several dates the earliest is returned.
DateVerdict extract_publication_date(const std::string& markup, const std::string& url,
                                     const Clock& clock, const DomainDateHints& hints);

}  // namespace ctopen
