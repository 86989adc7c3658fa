#include "ctopen/extraction.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <stdexcept>

namespace ctopen {

namespace {

constexpr int kMaxChainIterations = 16;
constexpr std::size_t kSplitWindow = 6;     // consecutive short blocks
constexpr std::size_t kShortBlockChars = 12;

std::string strip_marker(const std::string& text) {
    size_t i = 0;
    while (i < text.size() && text[i] == '#') ++i;
    if (i > 0 && i <= 6 && i < text.size() && text[i] == ' ') return text.substr(i + 1);
    if (text.size() >= 2 && text[0] == '-' && text[1] == ' ') return text.substr(2);
    return text;
}

// lowercase, whitespace collapsed, structural marker stripped
std::string normalize_for_match(const std::string& text) {
    std::string body = strip_marker(text);
    std::string out;
    out.reserve(body.size());
    bool in_space = true;
    for (unsigned char c : body) {
        if (std::isspace(c)) {
            if (!in_space) out.push_back(' ');
            in_space = true;
        } else {
            out.push_back(static_cast<char>(std::tolower(c)));
            in_space = false;
        }
    }
    while (!out.empty() && (out.back() == ' ' || out.back() == ':' || out.back() == '.'))
        out.pop_back();
    return out;
}

// ASCII punctuation and spacing removed entirely; survives mid-word splits
// ("R" + "eferences") and spacing variants. Non-ASCII bytes pass through.
std::string normalize_tight(const std::string& text) {
    std::string body = strip_marker(text);
    std::string out;
    out.reserve(body.size());
    for (unsigned char c : body) {
        if (c < 0x80) {
            if (std::isalnum(c)) out.push_back(static_cast<char>(std::tolower(c)));
        } else {
            out.push_back(static_cast<char>(c));
        }
    }
    return out;
}

bool matches_pattern(const std::string& normalized, const std::string& pattern,
                     FilterRule::Match kind) {
    switch (kind) {
        case FilterRule::Match::exact:
            return normalized == pattern;
        case FilterRule::Match::prefix:
            if (normalized.size() < pattern.size()) return false;
            if (normalized.compare(0, pattern.size(), pattern) != 0) return false;
            return normalized.size() == pattern.size() ||
                   !std::isalnum(static_cast<unsigned char>(normalized[pattern.size()]));
        case FilterRule::Match::contains:
            return normalized.find(pattern) != std::string::npos;
    }
    return false;
}

bool domain_applies(const std::string& site_domain, const std::vector<std::string>& scopes) {
    if (scopes.empty()) return true;
    for (const auto& scope : scopes) {
        if (site_domain == scope) return true;
        if (site_domain.size() > scope.size() &&
            site_domain.compare(site_domain.size() - scope.size(), scope.size(), scope) == 0 &&
            site_domain[site_domain.size() - scope.size() - 1] == '.')
            return true;
    }
    return false;
}

std::size_t latter_half_start(std::size_t n) { return (n + 1) / 2; }  // ceil(n/2)

// end of the section starting at a matched block: next heading at the same
// or higher level (section headings), or end of document
std::size_t section_end(const std::vector<ContentBlock>& blocks, std::size_t start) {
    int level = blocks[start].kind == BlockKind::heading ? blocks[start].heading_level : 7;
    for (std::size_t i = start + 1; i < blocks.size(); ++i) {
        if (blocks[i].kind == BlockKind::heading &&
            (level == 7 || blocks[i].heading_level <= level))
            return i;
    }
    return blocks.size();
}

FilterRule::Match parse_match(const std::string& s) {
    if (s == "prefix") return FilterRule::Match::prefix;
    if (s == "contains") return FilterRule::Match::contains;
    return FilterRule::Match::exact;
}

FilterRule::Position parse_position(const std::string& s) {
    if (s == "latter_half") return FilterRule::Position::latter_half;
    return FilterRule::Position::any;
}

FilterRule::Action parse_action(const std::string& s) {
    if (s == "remove_block") return FilterRule::Action::remove_block;
    if (s == "truncate") return FilterRule::Action::truncate;
    return FilterRule::Action::remove_section;
}

// one pass of a single rule; returns true when it removed anything
bool apply_rule_once(std::vector<ContentBlock>& blocks, const FilterRule& rule) {
    const std::size_t n = blocks.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (rule.position == FilterRule::Position::latter_half && i < latter_half_start(n))
            continue;
        std::string norm = normalize_for_match(blocks[i].text);
        bool hit = false;
        for (const auto& pattern : rule.patterns) {
            if (matches_pattern(norm, pattern, rule.match)) {
                hit = true;
                break;
            }
        }
        if (!hit) continue;
        switch (rule.action) {
            case FilterRule::Action::remove_block:
                blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(i));
                return true;
            case FilterRule::Action::remove_section: {
                std::size_t end = section_end(blocks, i);
                blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(i),
                             blocks.begin() + static_cast<std::ptrdiff_t>(end));
                return true;
            }
            case FilterRule::Action::truncate:
                blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(i), blocks.end());
                return true;
        }
    }
    return false;
}

}  // namespace

std::string to_string(BoundaryStatus s) {
    switch (s) {
        case BoundaryStatus::truncated_at_reference: return "truncated_at_reference";
        case BoundaryStatus::no_boundary: return "no_boundary";
        case BoundaryStatus::multiple_candidates_flagged: return "multiple_candidates_flagged";
    }
    return "no_boundary";
}

FilterRegistry FilterRegistry::from_json(const nlohmann::json& j) {
    FilterRegistry reg;
    reg.version = j.value("version", "");
    for (const auto& r : j.at("filters")) {
        FilterRule rule;
        rule.id = r.at("id").get<std::string>();
        if (r.contains("domains")) rule.domains = r["domains"].get<std::vector<std::string>>();
        for (const auto& p : r.at("patterns"))
            rule.patterns.push_back(normalize_for_match(p.get<std::string>()));
        rule.match = parse_match(r.value("match", "exact"));
        rule.position = parse_position(r.value("position", "any"));
        rule.action = parse_action(r.value("action", "remove_section"));
        reg.rules.push_back(std::move(rule));
    }
    for (const auto& p : j.at("slogan_patterns"))
        reg.slogan_patterns.push_back(normalize_for_match(p.get<std::string>()));
    for (const auto& p : j.at("boundary_patterns"))
        reg.boundary_patterns.push_back(normalize_tight(p.get<std::string>()));
    return reg;
}

FilterRegistry FilterRegistry::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("filter registry not found: " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

std::string ExtractedDocument::text() const {
    std::string out;
    for (const auto& b : blocks) {
        if (!out.empty()) out += "\n";
        out += b.text;
    }
    return out;
}

DomainFilterOutcome apply_domain_filters(std::vector<ContentBlock> blocks,
                                         const std::string& site_domain,
                                         const FilterRegistry& registry) {
    DomainFilterOutcome out;
    std::set<std::string> applied;
    bool changed = true;
    for (int iter = 0; changed && iter < kMaxChainIterations; ++iter) {
        changed = false;
        for (const auto& rule : registry.rules) {
            if (!domain_applies(site_domain, rule.domains)) continue;
            while (apply_rule_once(blocks, rule)) {
                changed = true;
                applied.insert(rule.id);
            }
        }
    }
    for (const auto& rule : registry.rules) {
        if (applied.count(rule.id)) out.filters_applied.push_back(rule.id);
    }
    out.blocks = std::move(blocks);
    return out;
}

SloganOutcome remove_marketing_slogans(std::vector<ContentBlock> blocks,
                                       const FilterRegistry& registry) {
    SloganOutcome out;
    bool changed = true;
    while (changed) {
        changed = false;
        const std::size_t n = blocks.size();
        for (std::size_t i = latter_half_start(n); i < n; ++i) {
            std::string norm = normalize_for_match(blocks[i].text);
            for (const auto& pattern : registry.slogan_patterns) {
                if (matches_pattern(norm, pattern, FilterRule::Match::prefix)) {
                    blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(i));
                    ++out.removed_count;
                    changed = true;
                    break;
                }
            }
            if (changed) break;
        }
    }
    out.blocks = std::move(blocks);
    return out;
}

BoundaryOutcome truncate_at_reference_boundary(std::vector<ContentBlock> blocks,
                                               const FilterRegistry& registry) {
    BoundaryOutcome out;
    std::set<std::string> patterns(registry.boundary_patterns.begin(),
                                   registry.boundary_patterns.end());
    std::vector<std::size_t> candidates;

    std::vector<std::string> tight(blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) tight[i] = normalize_tight(blocks[i].text);

    for (std::size_t i = 0; i < blocks.size(); ++i) {
        bool found = patterns.count(tight[i]) > 0;
        if (!found && tight[i].size() <= kShortBlockChars && !tight[i].empty()) {
            std::string joined = tight[i];
            for (std::size_t j = i + 1; j < blocks.size() && j - i < kSplitWindow; ++j) {
                if (tight[j].empty() || tight[j].size() > kShortBlockChars) break;
                joined += tight[j];
                if (patterns.count(joined)) {
                    found = true;
                    break;
                }
            }
        }
        if (found) candidates.push_back(i);
    }

    if (candidates.size() == 1) {
        blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(candidates[0]), blocks.end());
        out.status = BoundaryStatus::truncated_at_reference;
    } else if (candidates.empty()) {
        out.status = BoundaryStatus::no_boundary;
    } else {
        out.status = BoundaryStatus::multiple_candidates_flagged;
    }
    out.blocks = std::move(blocks);
    return out;
}

ExtractedDocument extract_document(const std::string& markup, const std::string& url,
                                   const FilterRegistry& registry) {
    ExtractedDocument doc;
    doc.source_url = url;
    doc.site_domain = domain_of_url(url);

    BlockParseResult parsed = dom_to_blocks(markup);
    doc.diagnostic = parsed.diagnostic;
    std::vector<ContentBlock> blocks = std::move(parsed.blocks);

    std::set<std::string> applied;
    bool truncated = false;
    BoundaryStatus last_status = BoundaryStatus::no_boundary;

    // iterate to a fixed point so the chain is idempotent even when removals
    // shift the latter-half boundary
    for (int iter = 0; iter < kMaxChainIterations; ++iter) {
        std::size_t before = blocks.size();

        auto domain_out = apply_domain_filters(std::move(blocks), doc.site_domain, registry);
        for (const auto& id : domain_out.filters_applied) applied.insert(id);
        auto slogan_out = remove_marketing_slogans(std::move(domain_out.blocks), registry);
        if (slogan_out.removed_count > 0) applied.insert("marketing_slogans");
        auto boundary_out = truncate_at_reference_boundary(std::move(slogan_out.blocks), registry);
        if (boundary_out.status == BoundaryStatus::truncated_at_reference) {
            truncated = true;
            applied.insert("reference_boundary");
        }
        last_status = boundary_out.status;
        blocks = std::move(boundary_out.blocks);

        if (blocks.size() == before) break;
    }

    doc.boundary_status = truncated ? BoundaryStatus::truncated_at_reference : last_status;
    for (const auto& rule : registry.rules) {
        if (applied.count(rule.id)) doc.filters_applied.push_back(rule.id);
    }
    if (applied.count("marketing_slogans")) doc.filters_applied.push_back("marketing_slogans");
    if (applied.count("reference_boundary")) doc.filters_applied.push_back("reference_boundary");
    doc.blocks = std::move(blocks);
    return doc;
}

std::string domain_of_url(const std::string& url) {
    std::string rest = url;
    auto scheme = rest.find("://");
    if (scheme != std::string::npos) rest = rest.substr(scheme + 3);
    auto slash = rest.find_first_of("/?#");
    if (slash != std::string::npos) rest = rest.substr(0, slash);
    auto at = rest.rfind('@');
    if (at != std::string::npos) rest = rest.substr(at + 1);
    auto colon = rest.find(':');
    if (colon != std::string::npos) rest = rest.substr(0, colon);
    std::transform(rest.begin(), rest.end(), rest.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (rest.starts_with("www.")) rest = rest.substr(4);
    return rest;
}

}  // namespace ctopen
