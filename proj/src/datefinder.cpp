#include "ctopen/datefinder.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <ctime>
#include <fstream>
#include <regex>

#include "ctopen/extraction.hpp"
#include "ctopen/html.hpp"

namespace ctopen {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string trim_raw(const std::string& s) {
    size_t b = 0, e = s.size();
    auto junk = [](unsigned char c) {
        return std::isspace(c) || c == '.' || c == ',' || c == ';';
    };
    while (b < e && junk(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && junk(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

int month_from_name(const std::string& name) {
    static const std::vector<std::vector<std::string>> names = {
        {"january", "jan"}, {"february", "feb"}, {"march", "mar"},
        {"april", "apr"},   {"may"},             {"june", "jun"},
        {"july", "jul"},    {"august", "aug"},   {"september", "sep", "sept"},
        {"october", "oct"}, {"november", "nov"}, {"december", "dec"}};
    std::string key = lower(name);
    while (!key.empty() && key.back() == '.') key.pop_back();
    for (size_t i = 0; i < names.size(); ++i) {
        for (const auto& n : names[i])
            if (key == n) return static_cast<int>(i) + 1;
    }
    return 0;
}

int pivot_two_digit_year(int yy) { return yy <= 49 ? 2000 + yy : 1900 + yy; }

struct Readings {
    std::vector<Date> dates;  // hinted reading first
    void add(const Date& d, const Clock& clock) {
        if (!validate_date(d.year, d.month, d.day, clock)) return;
        if (std::find(dates.begin(), dates.end(), d) == dates.end()) dates.push_back(d);
    }
};

Readings parse_readings(const std::string& input, const Clock& clock, const DateHints& hints) {
    Readings out;
    std::string raw = trim_raw(input);
    if (raw.empty() || raw.size() > 40) return out;
    std::smatch m;

    // ISO 8601 date, optionally with a time part
    static const std::regex iso(
        R"(^(\d{4})-(\d{1,2})-(\d{1,2})(?:[T ]\d{2}:\d{2}(?::\d{2})?(?:\.\d+)?(?:Z|[+-]\d{2}:?\d{2})?)?$)");
    if (std::regex_match(raw, m, iso)) {
        out.add({std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3])}, clock);
        return out;
    }

    // compact 8-digit
    static const std::regex compact(R"(^(\d{4})(\d{2})(\d{2})$)");
    if (std::regex_match(raw, m, compact)) {
        out.add({std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3])}, clock);
        return out;
    }

    // year-first with slash or dot separators
    static const std::regex yfirst(R"(^(\d{4})([/.])(\d{1,2})\2(\d{1,2})$)");
    if (std::regex_match(raw, m, yfirst)) {
        out.add({std::stoi(m[1]), std::stoi(m[3]), std::stoi(m[4])}, clock);
        return out;
    }

    // numeric day/month or month/day, optional two-digit year
    static const std::regex numeric(R"(^(\d{1,2})([-/.])(\d{1,2})\2(\d{2}|\d{4})$)");
    if (std::regex_match(raw, m, numeric)) {
        int a = std::stoi(m[1]), b = std::stoi(m[3]);
        int year = std::stoi(m[4]);
        if (m[4].str().size() == 2) year = pivot_two_digit_year(year);
        Date month_first{year, a, b};
        Date day_first{year, b, a};
        if (hints.day_first) {
            out.add(day_first, clock);
            out.add(month_first, clock);
        } else {
            out.add(month_first, clock);
            out.add(day_first, clock);
        }
        return out;
    }

    // month-name orderings: "March 5, 2024", "5 March 2024", "5-Mar-2024",
    // "2024 March 5", "March 2024"
    static const std::regex mdy(R"(^([A-Za-z]{3,9})\.?\s+(\d{1,2})(?:st|nd|rd|th)?,?\s+(\d{4})$)");
    if (std::regex_match(raw, m, mdy)) {
        int month = month_from_name(m[1]);
        if (month) out.add({std::stoi(m[3]), month, std::stoi(m[2])}, clock);
        return out;
    }
    static const std::regex dmy(
        R"(^(\d{1,2})(?:st|nd|rd|th)?[\s-]+([A-Za-z]{3,9})\.?[\s-]+(\d{4})$)");
    if (std::regex_match(raw, m, dmy)) {
        int month = month_from_name(m[2]);
        if (month) out.add({std::stoi(m[3]), month, std::stoi(m[1])}, clock);
        return out;
    }
    static const std::regex ymd_name(R"(^(\d{4})\s+([A-Za-z]{3,9})\.?\s+(\d{1,2})$)");
    if (std::regex_match(raw, m, ymd_name)) {
        int month = month_from_name(m[2]);
        if (month) out.add({std::stoi(m[1]), month, std::stoi(m[3])}, clock);
        return out;
    }
    static const std::regex month_year(R"(^([A-Za-z]{3,9})\.?,?\s+(\d{4})$)");
    if (std::regex_match(raw, m, month_year)) {
        int month = month_from_name(m[1]);
        if (month) out.add({std::stoi(m[2]), month, 1}, clock);
        return out;
    }

    // year+month numeric, and month/year
    static const std::regex year_month(R"(^(\d{4})[-/.](\d{1,2})$)");
    if (std::regex_match(raw, m, year_month)) {
        out.add({std::stoi(m[1]), std::stoi(m[2]), 1}, clock);
        return out;
    }
    static const std::regex month_year_num(R"(^(\d{1,2})/(\d{4})$)");
    if (std::regex_match(raw, m, month_year_num)) {
        out.add({std::stoi(m[2]), std::stoi(m[1]), 1}, clock);
        return out;
    }

    // year only
    static const std::regex year_only(R"(^(\d{4})$)");
    if (std::regex_match(raw, m, year_only)) {
        out.add({std::stoi(m[1]), 1, 1}, clock);
        return out;
    }

    return out;
}

// date-looking substrings inside free text, for the span/text-scan strategies
const std::regex& text_date_pattern() {
    static const std::regex re(
        R"((\d{4}-\d{1,2}-\d{1,2})|([A-Za-z]{3,9}\.?\s+\d{1,2}(?:st|nd|rd|th)?,?\s+\d{4})|(\d{1,2}(?:st|nd|rd|th)?\s+[A-Za-z]{3,9}\.?\s+\d{4})|(\d{1,2}[/.]\d{1,2}[/.]\d{2,4})|([A-Za-z]{3,9}\.?\s+\d{4}))");
    return re;
}

std::vector<std::string> scan_date_strings(const std::string& text) {
    std::vector<std::string> out;
    auto begin = std::sregex_iterator(text.begin(), text.end(), text_date_pattern());
    for (auto it = begin; it != std::sregex_iterator(); ++it) out.push_back(it->str());
    return out;
}

bool attr_token_contains(const std::string& attr_value, const std::string& needle) {
    return lower(attr_value).find(needle) != std::string::npos;
}

class Extractor {
  public:
    Extractor(const std::string& markup, const Clock& clock, const DateHints& hints)
        : markup_(markup), clock_(clock), hints_(hints) {}

    void add_candidate(std::vector<DateCandidate>& out, const std::string& raw,
                       const std::string& strategy, int priority) const {
        for (const Date& d : parse_readings(raw, clock_, hints_).dates) {
            out.push_back({trim_raw(raw), d, strategy, priority});
        }
    }

    std::vector<DateCandidate> structured_data() const {
        std::vector<DateCandidate> out;
        for (const auto& tag : find_all_tags(markup_, "script")) {
            auto it = tag.attributes.find("type");
            if (it == tag.attributes.end() || lower(it->second) != "application/ld+json") continue;
            nlohmann::json j = nlohmann::json::parse(tag.inner_html, nullptr, false);
            if (j.is_discarded()) continue;
            collect_ld_dates(j, out);
        }
        return out;
    }

    std::vector<DateCandidate> meta_tags() const {
        static const std::set<std::string> keys = {
            "article:published_time", "og:published_time", "og:pubdate",
            "article:published",      "pubdate",           "publishdate",
            "publish-date",           "publish_date",      "date",
            "dc.date",                "dc.date.issued",    "sailthru.date",
            "parsely-pub-date",       "article.published", "datepublished"};
        std::vector<DateCandidate> out;
        for (const auto& tag : find_all_tags(markup_, "meta")) {
            std::string key;
            for (const char* attr : {"property", "name", "itemprop"}) {
                auto it = tag.attributes.find(attr);
                if (it != tag.attributes.end() && keys.count(lower(it->second))) {
                    key = lower(it->second);
                    break;
                }
            }
            if (key.empty()) continue;
            auto content = tag.attributes.find("content");
            if (content != tag.attributes.end())
                add_candidate(out, content->second, "meta_tags", 2);
        }
        return out;
    }

    std::vector<DateCandidate> time_attributes() const {
        std::vector<DateCandidate> out;
        for (const auto& tag : find_all_tags(markup_, "time")) {
            auto dt = tag.attributes.find("datetime");
            if (dt != tag.attributes.end()) add_candidate(out, dt->second, "time_attributes", 3);
        }
        for (const char* name : {"span", "abbr", "div", "time"}) {
            for (const auto& tag : find_all_tags(markup_, name)) {
                auto ip = tag.attributes.find("itemprop");
                if (ip == tag.attributes.end() || lower(ip->second) != "datepublished") continue;
                for (const char* value_attr : {"content", "datetime", "title"}) {
                    auto v = tag.attributes.find(value_attr);
                    if (v != tag.attributes.end())
                        add_candidate(out, v->second, "time_attributes", 3);
                }
            }
        }
        return out;
    }

    std::vector<DateCandidate> domain_containers(const std::string& domain) const {
        static const std::vector<std::string> container_names = {
            "publish-date", "published-date", "publishdate",  "pub-date",
            "post-date",    "entry-date",     "article-date", "date-published",
            "article__date", "post__date"};
        std::vector<DateCandidate> out;
        if (domain == "sciencedaily.com") {
            // definition-list pairs: <dt>Date:</dt><dd>March 5, 2024</dd>
            auto dts = find_all_tags(markup_, "dt");
            auto dds = find_all_tags(markup_, "dd");
            for (size_t i = 0; i < dts.size() && i < dds.size(); ++i) {
                if (lower(strip_tags(dts[i].inner_html)).starts_with("date"))
                    add_candidate(out, strip_tags(dds[i].inner_html), "domain_containers", 4);
            }
        }
        for (const char* name : {"div", "span", "p", "li"}) {
            for (const auto& tag : find_all_tags(markup_, name)) {
                bool container = false;
                for (const char* attr : {"class", "id"}) {
                    auto it = tag.attributes.find(attr);
                    if (it == tag.attributes.end()) continue;
                    for (const auto& token : container_names)
                        if (attr_token_contains(it->second, token)) container = true;
                }
                if (!container) continue;
                for (const auto& raw : scan_date_strings(strip_tags(tag.inner_html)))
                    add_candidate(out, raw, "domain_containers", 4);
            }
        }
        return out;
    }

    std::vector<DateCandidate> citation_metadata() const {
        static const std::set<std::string> keys = {
            "citation_publication_date", "citation_date", "citation_online_date",
            "citation_cover_date",       "prism.publicationdate", "bepress_citation_date"};
        std::vector<DateCandidate> out;
        for (const auto& tag : find_all_tags(markup_, "meta")) {
            auto name = tag.attributes.find("name");
            if (name == tag.attributes.end() || !keys.count(lower(name->second))) continue;
            auto content = tag.attributes.find("content");
            if (content != tag.attributes.end())
                add_candidate(out, content->second, "citation_metadata", 5);
        }
        return out;
    }

    std::vector<DateCandidate> script_variables() const {
        static const std::regex var_re(
            R"((?:publish(?:ed)?[_-]?(?:date|time|at)|pub[_-]?date|datePublished|published_at|post[_-]?date)["']?\s*[:=]\s*["']([^"']{4,40})["'])",
            std::regex::icase);
        std::vector<DateCandidate> out;
        for (const auto& tag : find_all_tags(markup_, "script")) {
            auto type = tag.attributes.find("type");
            if (type != tag.attributes.end() && lower(type->second) == "application/ld+json")
                continue;
            auto begin = std::sregex_iterator(tag.inner_html.begin(), tag.inner_html.end(), var_re);
            for (auto it = begin; it != std::sregex_iterator(); ++it)
                add_candidate(out, (*it)[1].str(), "script_variables", 6);
        }
        return out;
    }

    std::vector<DateCandidate> date_spans() const {
        std::vector<DateCandidate> out;
        for (const char* name : {"span", "div", "p"}) {
            for (const auto& tag : find_all_tags(markup_, name)) {
                bool dated = false;
                for (const char* attr : {"class", "id"}) {
                    auto it = tag.attributes.find(attr);
                    if (it != tag.attributes.end() && attr_token_contains(it->second, "date"))
                        dated = true;
                }
                if (!dated) continue;
                for (const auto& raw : scan_date_strings(strip_tags(tag.inner_html)))
                    add_candidate(out, raw, "date_spans", 7);
            }
        }
        // uniqueness consistency check: all spans must agree, else fall through
        for (size_t i = 1; i < out.size(); ++i) {
            if (!(out[i].normalized == out[0].normalized)) return {};
        }
        return out;
    }

    std::vector<DateCandidate> time_elements() const {
        std::vector<DateCandidate> out;
        for (const auto& tag : find_all_tags(markup_, "time")) {
            auto dt = tag.attributes.find("datetime");
            if (dt != tag.attributes.end()) add_candidate(out, dt->second, "time_elements", 8);
            for (const auto& raw : scan_date_strings(strip_tags(tag.inner_html)))
                add_candidate(out, raw, "time_elements", 8);
        }
        for (const char* name : {"span", "div"}) {
            for (const auto& tag : find_all_tags(markup_, name)) {
                bool timed = false;
                for (const char* attr : {"class", "id"}) {
                    auto it = tag.attributes.find(attr);
                    if (it != tag.attributes.end() &&
                        (attr_token_contains(it->second, "timestamp") ||
                         attr_token_contains(it->second, "time")))
                        timed = true;
                }
                if (!timed) continue;
                for (const auto& raw : scan_date_strings(strip_tags(tag.inner_html)))
                    add_candidate(out, raw, "time_elements", 8);
            }
        }
        return out;
    }

    std::vector<DateCandidate> text_scan() const {
        static const std::regex near_keyword(
            R"((?:published|posted|updated)(?:\s+on)?\s*:?\s*)", std::regex::icase);
        std::vector<DateCandidate> out;
        std::string text;
        for (const auto& block : dom_to_blocks(markup_).blocks) {
            text += block.text;
            text += "\n";
        }
        auto begin = std::sregex_iterator(text.begin(), text.end(), near_keyword);
        for (auto it = begin; it != std::sregex_iterator(); ++it) {
            size_t at = static_cast<size_t>(it->position() + it->length());
            std::string tail = text.substr(at, 32);
            std::smatch m;
            if (std::regex_search(tail, m, text_date_pattern()) && m.position() <= 2)
                add_candidate(out, m.str(), "text_scan", 9);
        }
        return out;
    }

    std::vector<DateCandidate> preprint_server() const {
        // posting line in the preprint layout: "Posted March 05, 2024."
        static const std::regex posted(
            R"(Posted\s+([A-Za-z]{3,9}\.?\s+\d{1,2}(?:st|nd|rd|th)?,?\s+\d{4}))",
            std::regex::icase);
        std::vector<DateCandidate> out;
        std::string text;
        for (const auto& block : dom_to_blocks(markup_).blocks) {
            text += block.text;
            text += "\n";
        }
        std::smatch m;
        if (std::regex_search(text, m, posted)) add_candidate(out, m[1].str(), "preprint_server", 0);
        return out;
    }

    std::vector<DateCandidate> video_page() const {
        static const std::regex publish(R"re("(?:publishDate|uploadDate)"\s*:\s*"([^"]+)")re");
        std::vector<DateCandidate> out;
        auto begin = std::sregex_iterator(markup_.begin(), markup_.end(), publish);
        for (auto it = begin; it != std::sregex_iterator(); ++it)
            add_candidate(out, (*it)[1].str(), "video_page", 0);
        return out;
    }

  private:
    void collect_ld_dates(const nlohmann::json& j, std::vector<DateCandidate>& out) const {
        if (j.is_object()) {
            for (const auto& [key, value] : j.items()) {
                std::string k = lower(key);
                if ((k == "datepublished" || k == "datecreated" || k == "uploaddate") &&
                    value.is_string())
                    add_candidate(out, value.get<std::string>(), "structured_data", 1);
                else
                    collect_ld_dates(value, out);
            }
        } else if (j.is_array()) {
            for (const auto& item : j) collect_ld_dates(item, out);
        }
    }

    const std::string& markup_;
    const Clock& clock_;
    const DateHints& hints_;
};

}  // namespace

Clock Clock::system() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    return Clock{Date{tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday}};
}

bool validate_date(int year, int month, int day, const Clock& clock) {
    if (year < 1990 || year > clock.today.year) return false;
    return Date{year, month, day}.is_valid();
}

std::optional<Date> normalize_date_string(const std::string& raw, const Clock& clock,
                                          const DateHints& hints) {
    auto readings = parse_readings(raw, clock, hints).dates;
    if (readings.empty()) return std::nullopt;
    return readings.front();
}

std::vector<Date> normalize_date_readings(const std::string& raw, const Clock& clock,
                                          const DateHints& hints) {
    return parse_readings(raw, clock, hints).dates;
}

DomainDateHints DomainDateHints::from_json(const nlohmann::json& j) {
    DomainDateHints h;
    h.version = j.value("version", "");
    if (j.contains("day_first_domains"))
        for (const auto& d : j["day_first_domains"]) h.day_first_domains.insert(d.get<std::string>());
    if (j.contains("skip_domains"))
        for (const auto& d : j["skip_domains"]) h.skip_domains.insert(d.get<std::string>());
    return h;
}

DomainDateHints DomainDateHints::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("date hint table not found: " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

DateHints DomainDateHints::for_domain(const std::string& domain) const {
    DateHints h;
    for (const auto& d : day_first_domains) {
        if (domain == d ||
            (domain.size() > d.size() &&
             domain.compare(domain.size() - d.size(), d.size(), d) == 0 &&
             domain[domain.size() - d.size() - 1] == '.')) {
            h.day_first = true;
            break;
        }
    }
    return h;
}

DateVerdict extract_publication_date(const std::string& markup, const std::string& url,
                                     const Clock& clock, const DomainDateHints& hints) {
    DateVerdict verdict;
    if (markup.empty()) return verdict;
    std::string domain = domain_of_url(url);
    if (hints.skip_domains.count(domain)) return verdict;

    DateHints site_hints = hints.for_domain(domain);
    Extractor extractor(markup, clock, site_hints);

    auto is_domain = [&](const std::string& d) {
        return domain == d || (domain.size() > d.size() &&
                               domain.compare(domain.size() - d.size(), d.size(), d) == 0 &&
                               domain[domain.size() - d.size() - 1] == '.');
    };

    std::vector<std::vector<DateCandidate>> tiers;
    if (is_domain("biorxiv.org") || is_domain("medrxiv.org")) {
        tiers.push_back(extractor.preprint_server());
    } else if (is_domain("youtube.com") || is_domain("youtu.be")) {
        tiers.push_back(extractor.video_page());
    } else {
        tiers.push_back(extractor.structured_data());
        tiers.push_back(extractor.meta_tags());
        tiers.push_back(extractor.time_attributes());
        tiers.push_back(extractor.domain_containers(domain));
        tiers.push_back(extractor.citation_metadata());
        tiers.push_back(extractor.script_variables());
        tiers.push_back(extractor.date_spans());
        tiers.push_back(extractor.time_elements());
        tiers.push_back(extractor.text_scan());
    }

    for (const auto& tier : tiers) {
        for (const auto& c : tier) verdict.all_candidates.push_back(c);
        if (!verdict.date && !tier.empty()) {
            const DateCandidate* earliest = &tier.front();
            for (const auto& c : tier) {
                if (c.normalized < earliest->normalized) earliest = &c;
            }
            verdict.date = earliest->normalized;
            verdict.provenance = earliest->strategy;
        }
    }
    return verdict;
}

}  // namespace ctopen
