#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ctopen/assets.hpp"
#include "ctopen/cache.hpp"
#include "ctopen/config.hpp"
#include "ctopen/datefinder.hpp"
#include "ctopen/extraction.hpp"
#include "ctopen/registry.hpp"
#include "ctopen/transport.hpp"
#include "ctopen/verification.hpp"

namespace ctopen {

enum class SearchMode { llm_search_a, llm_search_b, web_index, literature_database };

std::string to_string(SearchMode m);
std::string backend_id_for(SearchMode m);

// One retrieved evidence document. Raw bytes live in the document cache
// under raw_digest. A populated results_verified implies the identity check
// passed first.
struct EvidenceDocument {
    std::string url;
    SearchMode retrieval_mode = SearchMode::web_index;
    std::string query_used;
    std::string raw_digest;
    std::string extracted_text;
    std::optional<Date> publication_date;
    std::string date_provenance;
    std::optional<bool> identity_verified;
    std::optional<bool> results_verified;

    nlohmann::json to_json(bool include_text = false) const;
    static EvidenceDocument from_json(const nlohmann::json& j);
};

struct UrlCandidate {
    std::string url;
    std::vector<std::string> queries;  // every query that surfaced this url
};

struct UrlDetails {
    std::optional<Date> publication_date;
    std::string raw_date;
    std::string results_summary;
    bool date_flagged = false;  // raw date present but failed normalization
};

struct FetchResult {
    CacheEntry entry;
    bool from_cache = false;
};

struct SearchWarning {
    std::string backend_id;
    std::string message;
};

// The Search(query, [start, end], mode, k) abstraction over the two
// grounded-LLM searchers, the web-index pipeline and the literature
// databases, with a persistent cache and record/replay support.
class SearchEngine {
  public:
    SearchEngine(std::shared_ptr<Transport> transport, DocumentCache& cache,
                 const AssetStore& assets, const RunConfig& config);

    // Every returned document's publication date lies within the window;
    // web_index and literature_database results are additionally identity-
    // and results-verified. An absent limit is unbounded; with a limit the
    // search stops as soon as enough documents qualify.
    std::vector<EvidenceDocument> search(const TrialRecord& trial, const DateWindow& window,
                                         SearchMode mode, std::optional<std::size_t> limit);

    // queries are: brief title, NCT ID, one judge-rewritten query; judge
    // failure falls back to the two deterministic queries with a warning
    std::vector<std::string> rewrite_queries(const TrialRecord& trial);

    // round 1 of an LLM-mode search: URLs claimed to report results
    std::vector<std::string> llm_grounded_search(const std::string& trial_text,
                                                 const DateWindow& window, SearchMode backend);

    // round 2: per-URL publication dates and result summaries
    std::map<std::string, UrlDetails> llm_extract_url_details(
        const std::vector<std::string>& urls, SearchMode backend);

    // union over (query x freshness) of up to 100 candidate URLs each,
    // issued concurrently, de-duplicated with per-query provenance
    std::vector<UrlCandidate> web_index_search(const std::vector<std::string>& queries,
                                               const DateWindow& window,
                                               const TrialRecord* trial);

    // routes by URL kind (paper repository / downloadable PDF / webpage),
    // with proxy fallback and the persistent cache in front
    FetchResult fetch_document(const std::string& url);

    // the four literature sources by identifier, window filter on the
    // source-reported date, then two-round verification
    std::vector<EvidenceDocument> database_lookup(const std::string& nct_id,
                                                  const DateWindow& window,
                                                  const TrialRecord& trial);

    const JudgeClient& judge() const { return judge_; }
    DocumentCache& cache() { return cache_; }

    std::vector<std::string> undated_urls() const;
    std::vector<SearchWarning> warnings() const;
    void clear_audit();

    static std::vector<std::string> normalize_url_list(const std::string& raw_output);
    static std::map<std::string, UrlDetails> parse_url_details(const std::string& raw_output,
                                                               const Clock& clock);
    static bool is_paper_repository_url(const std::string& url);
    static bool is_pdf_url(const std::string& url);

  private:
    std::vector<EvidenceDocument> llm_mode_search(const TrialRecord& trial,
                                                  const DateWindow& window, SearchMode backend,
                                                  std::optional<std::size_t> limit);
    std::vector<EvidenceDocument> web_index_mode_search(const TrialRecord& trial,
                                                        const DateWindow& window,
                                                        std::optional<std::size_t> limit);
    std::optional<EvidenceDocument> qualify_document(const std::string& url,
                                                     const std::string& query_used,
                                                     SearchMode mode, const DateWindow& window,
                                                     const TrialRecord& trial);
    CacheEntry fetch_via_repository(const std::string& url);
    CacheEntry fetch_webpage(const std::string& url);
    CacheEntry fetch_pdf(const std::string& url);
    std::string llm_call(SearchMode backend, const nlohmann::json& request);
    void add_warning(const std::string& backend_id, const std::string& message);
    void add_undated(const std::string& url);

    std::shared_ptr<Transport> transport_;
    DocumentCache& cache_;
    AssetStore assets_;
    RunConfig config_;
    Clock clock_;
    FilterRegistry filters_;
    DomainDateHints date_hints_;
    JudgeClient judge_;

    mutable std::mutex audit_mutex_;
    std::vector<std::string> undated_urls_;
    std::vector<SearchWarning> warnings_;

    std::mutex fetch_gate_mutex_;
    std::map<std::string, std::shared_ptr<std::mutex>> fetch_gates_;
};

}  // namespace ctopen
