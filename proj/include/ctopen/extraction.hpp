#pragma once

#include <string>
#include <vector>

#include "ctopen/html.hpp"
#include "json.hpp"

namespace ctopen {

enum class BoundaryStatus { truncated_at_reference, no_boundary, multiple_candidates_flagged };

std::string to_string(BoundaryStatus s);

// One registered cleanup rule. Patterns are matched against block text after
// normalization (markers stripped, lowercased, whitespace collapsed).
struct FilterRule {
    enum class Match { exact, prefix, contains };
    enum class Position { any, latter_half };
    enum class Action { remove_block, remove_section, truncate };

    std::string id;
    std::vector<std::string> domains;  // empty: applies to every domain
    std::vector<std::string> patterns;
    Match match = Match::exact;
    Position position = Position::any;
    Action action = Action::remove_section;
};

// Versioned, data-driven registry: domain filters, promotional patterns and
// reference-boundary headers, loaded from a structured asset file so new
// domains are additions rather than code changes.
struct FilterRegistry {
    std::string version;
    std::vector<FilterRule> rules;
    std::vector<std::string> slogan_patterns;
    std::vector<std::string> boundary_patterns;

    static FilterRegistry from_json(const nlohmann::json& j);
    static FilterRegistry load(const std::string& path);
};

struct ExtractedDocument {
    std::string source_url;
    std::string site_domain;
    std::vector<ContentBlock> blocks;
    std::vector<std::string> filters_applied;  // every filter that removed >= 1 block
    BoundaryStatus boundary_status = BoundaryStatus::no_boundary;
    std::string diagnostic;

    std::string text() const;  // newline-joined block text
};

struct DomainFilterOutcome {
    std::vector<ContentBlock> blocks;
    std::vector<std::string> filters_applied;
};

struct SloganOutcome {
    std::vector<ContentBlock> blocks;
    std::size_t removed_count = 0;
};

struct BoundaryOutcome {
    std::vector<ContentBlock> blocks;
    BoundaryStatus status = BoundaryStatus::no_boundary;
};

// Domain-keyed filters in registry order; unmatched domains only see rules
// with an empty domain scope.
DomainFilterOutcome apply_domain_filters(std::vector<ContentBlock> blocks,
                                         const std::string& site_domain,
                                         const FilterRegistry& registry);

// Promotional blocks are removed only in the latter half of the page
// (index >= ceil(n/2)); earlier matches are retained.
SloganOutcome remove_marketing_slogans(std::vector<ContentBlock> blocks,
                                       const FilterRegistry& registry);

// Detects reference/bibliography/conflict-of-interest headers, including
// headers split across up to 6 consecutive short blocks (<= 12 chars each)
// and registered non-English variants. Truncates only on exactly one
// candidate boundary.
BoundaryOutcome truncate_at_reference_boundary(std::vector<ContentBlock> blocks,
                                               const FilterRegistry& registry);

// Full chain: dom_to_blocks, domain filters, slogan removal, boundary
// truncation, iterated until the block list is stable.
ExtractedDocument extract_document(const std::string& markup, const std::string& url,
                                   const FilterRegistry& registry);

// Host part of a URL, lowercased, without a leading "www.".
std::string domain_of_url(const std::string& url);

}  // namespace ctopen
