#include "ctopen/search.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <regex>
#include <set>
#include <sstream>

#include "ctopen/concurrency.hpp"
#include "ctopen/live_transport.hpp"
#include "ctopen/sha256.hpp"

namespace ctopen {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string b64_decode(const std::string& in) {
    static const std::string alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    int val = 0, bits = -8;
    for (unsigned char c : in) {
        if (c == '=' || std::isspace(c)) continue;
        size_t pos = alphabet.find(static_cast<char>(c));
        if (pos == std::string::npos) continue;
        val = (val << 6) + static_cast<int>(pos);
        bits += 6;
        if (bits >= 0) {
            out.push_back(static_cast<char>((val >> bits) & 0xff));
            bits -= 8;
        }
    }
    return out;
}

std::string strip_trailing_punct(std::string url) {
    while (!url.empty()) {
        char c = url.back();
        if (c == '.' || c == ',' || c == ';' || c == ':' || c == ')' || c == ']' || c == '}' ||
            c == '\'' || c == '"' || c == '>' || c == '!' || c == '?')
            url.pop_back();
        else
            break;
    }
    return url;
}

bool looks_blocked(int status, const std::string& body) {
    if (status == 403 || status == 429 || status == 503) return true;
    std::string probe = lower(body.substr(0, 4096));
    for (const char* marker : {"access denied", "captcha", "are you a robot",
                               "attention required", "enable javascript and cookies"}) {
        if (probe.find(marker) != std::string::npos) return true;
    }
    return false;
}

struct FetchedBody {
    int status = 200;
    std::string content_type;
    std::string body;
};

// transports may return a raw body or a {status, content_type, body_b64} wrapper
FetchedBody parse_fetch_payload(const std::string& payload) {
    FetchedBody f;
    nlohmann::json j = nlohmann::json::parse(payload, nullptr, false);
    if (!j.is_discarded() && j.is_object() && j.contains("status")) {
        f.status = j["status"].get<int>();
        f.content_type = j.value("content_type", "");
        if (j.contains("body_b64"))
            f.body = b64_decode(j["body_b64"].get<std::string>());
        else
            f.body = j.value("body", "");
        return f;
    }
    f.body = payload;
    return f;
}

std::string unwrap_model_text(const std::string& payload) {
    nlohmann::json j = nlohmann::json::parse(payload, nullptr, false);
    if (!j.is_discarded() && j.is_object() && j.contains("text"))
        return j["text"].get<std::string>();
    return payload;
}

std::string repository_source_for(const std::string& domain, const std::string& url) {
    if (domain == "pubmed.ncbi.nlm.nih.gov") return "pubmed";
    if (domain == "pmc.ncbi.nlm.nih.gov") return "pmc";
    if (domain == "ncbi.nlm.nih.gov" && url.find("/pmc") != std::string::npos) return "pmc";
    if (domain == "biorxiv.org" || domain.ends_with(".biorxiv.org")) return "biorxiv";
    if (domain == "medrxiv.org" || domain.ends_with(".medrxiv.org")) return "medrxiv";
    return "";
}

}  // namespace

std::string to_string(SearchMode m) {
    switch (m) {
        case SearchMode::llm_search_a: return "llm_search_a";
        case SearchMode::llm_search_b: return "llm_search_b";
        case SearchMode::web_index: return "web_index";
        case SearchMode::literature_database: return "literature_database";
    }
    return "web_index";
}

std::string backend_id_for(SearchMode m) { return to_string(m); }

nlohmann::json EvidenceDocument::to_json(bool include_text) const {
    nlohmann::json j;
    j["url"] = url;
    j["retrieval_mode"] = ctopen::to_string(retrieval_mode);
    j["query_used"] = query_used;
    if (!raw_digest.empty()) j["raw_digest"] = raw_digest;
    if (include_text) j["extracted_text"] = extracted_text;
    if (publication_date) j["publication_date"] = publication_date->to_iso();
    if (!date_provenance.empty()) j["date_provenance"] = date_provenance;
    if (identity_verified) j["identity_verified"] = *identity_verified;
    if (results_verified) j["results_verified"] = *results_verified;
    return j;
}

EvidenceDocument EvidenceDocument::from_json(const nlohmann::json& j) {
    EvidenceDocument d;
    d.url = j.value("url", "");
    std::string mode = j.value("retrieval_mode", "web_index");
    if (mode == "llm_search_a") d.retrieval_mode = SearchMode::llm_search_a;
    else if (mode == "llm_search_b") d.retrieval_mode = SearchMode::llm_search_b;
    else if (mode == "literature_database") d.retrieval_mode = SearchMode::literature_database;
    else d.retrieval_mode = SearchMode::web_index;
    d.query_used = j.value("query_used", "");
    d.raw_digest = j.value("raw_digest", "");
    d.extracted_text = j.value("extracted_text", "");
    if (j.contains("publication_date"))
        d.publication_date = parse_iso_date(j["publication_date"].get<std::string>());
    d.date_provenance = j.value("date_provenance", "");
    if (j.contains("identity_verified")) d.identity_verified = j["identity_verified"].get<bool>();
    if (j.contains("results_verified")) d.results_verified = j["results_verified"].get<bool>();
    return d;
}

SearchEngine::SearchEngine(std::shared_ptr<Transport> transport, DocumentCache& cache,
                           const AssetStore& assets, const RunConfig& config)
    : transport_(std::move(transport)),
      cache_(cache),
      assets_(assets),
      config_(config),
      clock_(config.clock()),
      filters_(FilterRegistry::from_json(assets.read_json("filters/" + config.prompt_version + ".json"))),
      date_hints_(DomainDateHints::from_json(
          assets.read_json("date_hints/" + config.prompt_version + ".json"))),
      judge_(transport_, assets_, config.prompt_version) {}

void SearchEngine::add_warning(const std::string& backend_id, const std::string& message) {
    std::lock_guard<std::mutex> lock(audit_mutex_);
    warnings_.push_back({backend_id, message});
}

void SearchEngine::add_undated(const std::string& url) {
    std::lock_guard<std::mutex> lock(audit_mutex_);
    if (std::find(undated_urls_.begin(), undated_urls_.end(), url) == undated_urls_.end())
        undated_urls_.push_back(url);
}

std::vector<std::string> SearchEngine::undated_urls() const {
    std::lock_guard<std::mutex> lock(audit_mutex_);
    return undated_urls_;
}

std::vector<SearchWarning> SearchEngine::warnings() const {
    std::lock_guard<std::mutex> lock(audit_mutex_);
    return warnings_;
}

void SearchEngine::clear_audit() {
    std::lock_guard<std::mutex> lock(audit_mutex_);
    undated_urls_.clear();
    warnings_.clear();
}

std::vector<std::string> SearchEngine::normalize_url_list(const std::string& raw_output) {
    std::vector<std::string> urls;
    std::set<std::string> seen;
    auto push = [&](std::string url) {
        url = strip_trailing_punct(trim(url));
        if (url.size() < 10) return;
        std::string l = lower(url);
        if (!l.starts_with("http://") && !l.starts_with("https://")) return;
        if (seen.insert(url).second) urls.push_back(url);
    };

    // structured list or object notation first
    nlohmann::json j = nlohmann::json::parse(raw_output, nullptr, false);
    if (!j.is_discarded()) {
        if (j.is_array()) {
            for (const auto& item : j) {
                if (item.is_string()) push(item.get<std::string>());
                else if (item.is_object() && item.contains("url"))
                    push(item["url"].get<std::string>());
            }
        } else if (j.is_object() && j.contains("urls") && j["urls"].is_array()) {
            for (const auto& item : j["urls"])
                if (item.is_string()) push(item.get<std::string>());
        }
        if (!urls.empty()) return urls;
    }

    // free text (also covers Python-style literal lists)
    static const std::regex url_re(R"(https?://[^\s"'<>\)\]]+)");
    auto begin = std::sregex_iterator(raw_output.begin(), raw_output.end(), url_re);
    for (auto it = begin; it != std::sregex_iterator(); ++it) push(it->str());
    return urls;
}

std::map<std::string, UrlDetails> SearchEngine::parse_url_details(const std::string& raw_output,
                                                                  const Clock& clock) {
    std::map<std::string, UrlDetails> out;
    std::string text = unwrap_model_text(raw_output);
    std::istringstream in(text);
    std::string line;
    std::string current_url;
    UrlDetails current;
    bool in_results = false;

    auto flush = [&]() {
        if (!current_url.empty()) {
            current.results_summary = trim(current.results_summary);
            out[current_url] = current;
        }
        current = UrlDetails{};
        current_url.clear();
        in_results = false;
    };

    auto prefix_value = [&](const std::string& l, const char* key) -> std::optional<std::string> {
        std::string lowered = lower(l);
        std::string want = std::string(key) + ":";
        size_t start = lowered.find_first_not_of(" \t-*");
        if (start == std::string::npos) return std::nullopt;
        if (lowered.compare(start, want.size(), want) != 0) return std::nullopt;
        return trim(l.substr(start + want.size()));
    };

    while (std::getline(in, line)) {
        if (auto url = prefix_value(line, "url")) {
            flush();
            current_url = strip_trailing_punct(*url);
            continue;
        }
        if (auto date = prefix_value(line, "date")) {
            in_results = false;
            current.raw_date = *date;
            if (lower(*date) != "none" && !date->empty()) {
                current.publication_date = normalize_date_string(*date, clock);
                if (!current.publication_date) current.date_flagged = true;
            }
            continue;
        }
        if (auto results = prefix_value(line, "results")) {
            in_results = true;
            current.results_summary = *results;
            continue;
        }
        if (in_results && !trim(line).empty()) {
            current.results_summary += "\n" + trim(line);
        }
    }
    flush();
    return out;
}

bool SearchEngine::is_paper_repository_url(const std::string& url) {
    return !repository_source_for(domain_of_url(url), url).empty();
}

bool SearchEngine::is_pdf_url(const std::string& url) {
    std::string path = url;
    auto q = path.find_first_of("?#");
    if (q != std::string::npos) path = path.substr(0, q);
    return lower(path).ends_with(".pdf");
}

std::string SearchEngine::llm_call(SearchMode backend, const nlohmann::json& request) {
    return unwrap_model_text(transport_->call(backend_id_for(backend), request));
}

std::vector<std::string> SearchEngine::rewrite_queries(const TrialRecord& trial) {
    std::vector<std::string> queries;
    queries.push_back(trial.brief_title);
    queries.push_back(trial.nct_id);
    try {
        std::string rewritten = judge_.ask_freeform(
            "query_rewrite", {{"trial_text", flatten_protocol(trial, false, true)}});
        if (!rewritten.empty()) queries.push_back(rewritten);
        else add_warning("judge", "query rewrite returned empty output for " + trial.nct_id);
    } catch (const std::exception& e) {
        add_warning("judge", std::string("query rewrite failed, using deterministic queries: ") +
                                 e.what());
    }
    return queries;
}

std::vector<std::string> SearchEngine::llm_grounded_search(const std::string& trial_text,
                                                           const DateWindow& window,
                                                           SearchMode backend) {
    std::string prompt_name;
    std::map<std::string, std::string> values{{"trial_text", trial_text}};
    if (window.is_unbounded()) {
        prompt_name = "initial_screening";
    } else if (window.start && window.end) {
        prompt_name = "web_search_windowed";
        values["start"] = window.start->to_iso();
        values["end"] = window.end->to_iso();
    } else if (window.end) {
        prompt_name = "web_search_before_cutoff";
        values["end"] = window.end->to_iso();
    } else {
        prompt_name = "web_search_after_cutoff";
        values["start"] = window.start->to_iso();
    }
    std::string prompt = render_prompt(assets_.prompt(config_.prompt_version, prompt_name), values);

    nlohmann::json request;
    request["op"] = "grounded_search";
    request["window"] = window.to_string();
    request["prompt"] = prompt;
    std::string output = llm_call(backend, request);
    return normalize_url_list(output);
}

std::map<std::string, UrlDetails> SearchEngine::llm_extract_url_details(
    const std::vector<std::string>& urls, SearchMode backend) {
    if (urls.empty()) return {};
    std::string joined;
    for (const auto& u : urls) {
        joined += u;
        joined += "\n";
    }
    std::string prompt = render_prompt(
        assets_.prompt(config_.prompt_version, "url_details_extraction"), {{"urls", joined}});
    nlohmann::json request;
    request["op"] = "url_details";
    request["urls"] = urls;
    request["prompt"] = prompt;
    std::string output = llm_call(backend, request);
    return parse_url_details(output, clock_);
}

std::vector<UrlCandidate> SearchEngine::web_index_search(const std::vector<std::string>& queries,
                                                         const DateWindow& window,
                                                         const TrialRecord* trial) {
    struct Combo {
        std::string query;
        bool freshness;
    };
    std::vector<Combo> combos;
    for (const auto& q : queries) {
        combos.push_back({q, false});
        combos.push_back({q, true});
    }

    std::vector<std::vector<std::string>> per_combo(combos.size());
    std::atomic<std::size_t> failed_combos{0};
    parallel_for(combos.size(), config_.concurrency, [&](std::size_t i) {
        nlohmann::json request;
        request["op"] = "web_search";
        request["q"] = combos[i].query;
        request["count"] = 100;
        if (combos[i].freshness && trial) {
            Date from = trial->study_start_date;
            Date to = trial->estimated_primary_completion_date
                          ? *trial->estimated_primary_completion_date
                          : clock_.today;
            request["freshness"] = from.to_iso() + "to" + to.to_iso();
        }
        if (window.end) request["before"] = window.end->to_iso();
        try {
            std::string payload = transport_->call("web_index", request);
            nlohmann::json j = nlohmann::json::parse(payload, nullptr, false);
            if (j.is_discarded()) return;
            const nlohmann::json* results = nullptr;
            if (j.contains("results") && j["results"].is_array()) results = &j["results"];
            else if (j.contains("web") && j["web"].contains("results")) results = &j["web"]["results"];
            if (!results) return;
            std::size_t n = 0;
            for (const auto& r : *results) {
                if (n >= 100) break;  // up to 100 results per configuration
                if (r.is_object() && r.contains("url")) {
                    per_combo[i].push_back(r["url"].get<std::string>());
                    ++n;
                } else if (r.is_string()) {
                    per_combo[i].push_back(r.get<std::string>());
                    ++n;
                }
            }
        } catch (const BackendError& e) {
            // a failing query configuration never aborts its siblings
            failed_combos.fetch_add(1);
            add_warning("web_index", e.what());
        }
    });

    // every configuration failing means the stage did not complete; a check
    // that could not run must defer the trial rather than look clean
    if (!combos.empty() && failed_combos.load() == combos.size())
        throw BackendError("web_index", true, "all query configurations failed");

    std::vector<UrlCandidate> out;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < combos.size(); ++i) {
        for (const auto& url : per_combo[i]) {
            auto it = index.find(url);
            if (it == index.end()) {
                index[url] = out.size();
                out.push_back({url, {combos[i].query}});
            } else {
                auto& queries_seen = out[it->second].queries;
                if (std::find(queries_seen.begin(), queries_seen.end(), combos[i].query) ==
                    queries_seen.end())
                    queries_seen.push_back(combos[i].query);
            }
        }
    }
    return out;
}

CacheEntry SearchEngine::fetch_via_repository(const std::string& url) {
    CacheEntry entry;
    entry.url = url;
    entry.content_kind = "text";
    entry.fetched_at = clock_.today.to_iso();
    std::string source = repository_source_for(domain_of_url(url), url);
    nlohmann::json request;
    request["op"] = "db_fetch_by_url";
    request["url"] = url;
    std::string payload = transport_->call("db." + source, request);
    nlohmann::json j = nlohmann::json::parse(payload, nullptr, false);
    if (j.is_discarded() || !j.contains("articles") || j["articles"].empty()) {
        entry.fetch_failed = true;
        entry.failure = "repository returned no article";
        return entry;
    }
    const auto& article = j["articles"][0];
    std::string title = article.value("title", "");
    std::string text = article.value("text", "");
    entry.extracted_text = title.empty() ? text : title + "\n" + text;
    if (article.contains("date")) {
        entry.publication_date =
            normalize_date_string(article["date"].get<std::string>(), clock_);
        entry.date_provenance = "database";
    }
    return entry;
}

CacheEntry SearchEngine::fetch_pdf(const std::string& url) {
    CacheEntry entry;
    entry.url = url;
    entry.content_kind = "pdf";
    entry.fetched_at = clock_.today.to_iso();

    nlohmann::json request;
    request["op"] = "get";
    request["url"] = url;
    std::string payload = transport_->call("fetch.direct", request);
    FetchedBody fetched = parse_fetch_payload(payload);
    if (fetched.status != 200) {
        entry.fetch_failed = true;
        entry.failure = "pdf download failed with status " + std::to_string(fetched.status);
        return entry;
    }

    nlohmann::json ocr_request;
    ocr_request["op"] = "ocr";
    ocr_request["content_sha256"] = Sha256::hex(fetched.body);
    ocr_request["body_b64"] = base64_encode(fetched.body);
    try {
        std::string ocr_payload = transport_->call("ocr", ocr_request);
        entry.extracted_text = unwrap_model_text(ocr_payload);
    } catch (const BackendError& e) {
        // unextractable, but the bytes stay cached
        entry.failure = std::string("ocr failed: ") + e.what();
    }
    if (!entry.extracted_text.empty()) {
        DateVerdict verdict =
            extract_publication_date(entry.extracted_text, url, clock_, date_hints_);
        entry.publication_date = verdict.date;
        entry.date_provenance = verdict.provenance;
    }
    cache_.put(entry, fetched.body);
    return entry;
}

CacheEntry SearchEngine::fetch_webpage(const std::string& url) {
    CacheEntry entry;
    entry.url = url;
    entry.content_kind = "html";
    entry.fetched_at = clock_.today.to_iso();

    nlohmann::json request;
    request["op"] = "get";
    request["url"] = url;

    FetchedBody fetched;
    bool have_body = false;
    try {
        fetched = parse_fetch_payload(transport_->call("fetch.direct", request));
        have_body = fetched.status == 200 && !looks_blocked(fetched.status, fetched.body);
    } catch (const BackendError&) {
        have_body = false;
    }
    if (!have_body) {
        // scraping-proxy fallback on block or failure
        try {
            fetched = parse_fetch_payload(transport_->call("fetch.proxy", request));
            have_body = fetched.status == 200;
        } catch (const BackendError& e) {
            entry.fetch_failed = true;
            entry.failure = std::string("unreachable after proxy fallback: ") + e.what();
            cache_.put(entry, "");
            return entry;
        }
    }
    if (!have_body) {
        entry.fetch_failed = true;
        entry.failure = "blocked with status " + std::to_string(fetched.status);
        cache_.put(entry, fetched.body);
        return entry;
    }

    if (lower(fetched.content_type).find("pdf") != std::string::npos) {
        entry.content_kind = "pdf";
        nlohmann::json ocr_request;
        ocr_request["op"] = "ocr";
        ocr_request["content_sha256"] = Sha256::hex(fetched.body);
        ocr_request["body_b64"] = base64_encode(fetched.body);
        try {
            entry.extracted_text = unwrap_model_text(transport_->call("ocr", ocr_request));
        } catch (const BackendError& e) {
            entry.failure = std::string("ocr failed: ") + e.what();
        }
        if (!entry.extracted_text.empty()) {
            DateVerdict verdict =
                extract_publication_date(entry.extracted_text, url, clock_, date_hints_);
            entry.publication_date = verdict.date;
            entry.date_provenance = verdict.provenance;
        }
        cache_.put(entry, fetched.body);
        return entry;
    }

    ExtractedDocument doc = extract_document(fetched.body, url, filters_);
    entry.extracted_text = doc.text();
    DateVerdict verdict = extract_publication_date(fetched.body, url, clock_, date_hints_);
    entry.publication_date = verdict.date;
    entry.date_provenance = verdict.provenance;
    cache_.put(entry, fetched.body);
    return entry;
}

FetchResult SearchEngine::fetch_document(const std::string& url) {
    if (auto cached = cache_.find(url)) return {*cached, true};
    // one fetch per url even under concurrent first access
    std::shared_ptr<std::mutex> gate;
    {
        std::lock_guard<std::mutex> lock(fetch_gate_mutex_);
        auto& slot = fetch_gates_[url];
        if (!slot) slot = std::make_shared<std::mutex>();
        gate = slot;
    }
    std::lock_guard<std::mutex> fetch_lock(*gate);
    if (auto cached = cache_.find(url)) return {*cached, true};
    CacheEntry entry;
    if (is_paper_repository_url(url)) {
        try {
            entry = fetch_via_repository(url);
        } catch (const BackendError& e) {
            entry.url = url;
            entry.content_kind = "text";
            entry.fetched_at = clock_.today.to_iso();
            entry.fetch_failed = true;
            entry.failure = e.what();
        }
        cache_.put(entry, "");
        return {entry, false};
    }
    if (is_pdf_url(url)) {
        try {
            entry = fetch_pdf(url);
        } catch (const BackendError& e) {
            entry.url = url;
            entry.content_kind = "pdf";
            entry.fetched_at = clock_.today.to_iso();
            entry.fetch_failed = true;
            entry.failure = e.what();
            cache_.put(entry, "");
        }
        return {entry, false};
    }
    return {fetch_webpage(url), false};
}

std::optional<EvidenceDocument> SearchEngine::qualify_document(const std::string& url,
                                                               const std::string& query_used,
                                                               SearchMode mode,
                                                               const DateWindow& window,
                                                               const TrialRecord& trial) {
    FetchResult fetched = fetch_document(url);
    const CacheEntry& entry = fetched.entry;
    if (entry.fetch_failed || entry.extracted_text.empty()) {
        if (entry.fetch_failed) add_warning("fetch", url + ": " + entry.failure);
        return std::nullopt;
    }
    if (!entry.publication_date) {
        // dropped from window-filtered results, kept for the audit report
        add_undated(url);
        return std::nullopt;
    }
    if (!window.contains(*entry.publication_date)) return std::nullopt;

    EvidenceDocument doc;
    doc.url = url;
    doc.retrieval_mode = mode;
    doc.query_used = query_used;
    doc.raw_digest = entry.raw_digest;
    doc.extracted_text = entry.extracted_text;
    doc.publication_date = entry.publication_date;
    doc.date_provenance = entry.date_provenance;

    std::string trial_text = flatten_protocol(trial, false, true);
    try {
        IdentityVerdict identity = verify_same_trial(trial_text, doc.extracted_text, judge_);
        doc.identity_verified = identity.same_trial;
        if (!identity.same_trial) return std::nullopt;
        ResultsVerdict results = verify_reports_results(trial_text, doc.extracted_text, judge_);
        doc.results_verified = results.reports_results;
        if (!results.reports_results) return std::nullopt;
    } catch (const JudgeContractError& e) {
        add_warning("judge", url + ": " + e.what());
        return std::nullopt;
    }
    return doc;
}

std::vector<EvidenceDocument> SearchEngine::llm_mode_search(const TrialRecord& trial,
                                                            const DateWindow& window,
                                                            SearchMode backend,
                                                            std::optional<std::size_t> limit) {
    std::string trial_text = flatten_protocol(trial, false, false);
    std::vector<std::string> urls = llm_grounded_search(trial_text, window, backend);
    std::vector<EvidenceDocument> docs;
    std::string query_used = "info:" + trial.nct_id;

    if (window.is_unbounded()) {
        // screening: existence only, no date round needed
        for (const auto& url : urls) {
            if (limit && docs.size() >= *limit) break;
            EvidenceDocument doc;
            doc.url = url;
            doc.retrieval_mode = backend;
            doc.query_used = query_used;
            docs.push_back(std::move(doc));
        }
        return docs;
    }

    auto details = llm_extract_url_details(urls, backend);
    for (const auto& url : urls) {
        if (limit && docs.size() >= *limit) break;
        auto it = details.find(url);
        if (it == details.end()) continue;
        const UrlDetails& d = it->second;
        if (!d.publication_date) {
            if (d.date_flagged || !d.raw_date.empty()) add_undated(url);
            continue;
        }
        if (!window.contains(*d.publication_date)) continue;
        EvidenceDocument doc;
        doc.url = url;
        doc.retrieval_mode = backend;
        doc.query_used = query_used;
        doc.extracted_text = d.results_summary;
        doc.publication_date = d.publication_date;
        doc.date_provenance = "llm_round2";
        docs.push_back(std::move(doc));
    }
    return docs;
}

std::vector<EvidenceDocument> SearchEngine::web_index_mode_search(
    const TrialRecord& trial, const DateWindow& window, std::optional<std::size_t> limit) {
    std::vector<std::string> queries = rewrite_queries(trial);
    std::vector<UrlCandidate> candidates = web_index_search(queries, window, &trial);

    std::vector<EvidenceDocument> docs;
    auto query_label = [](const UrlCandidate& c) {
        std::string label;
        for (const auto& q : c.queries) {
            if (!label.empty()) label += " | ";
            label += q;
        }
        return label;
    };

    if (limit) {
        // with a limit the pipeline stops as soon as enough documents qualify
        for (const auto& candidate : candidates) {
            if (docs.size() >= *limit) break;
            auto doc = qualify_document(candidate.url, query_label(candidate),
                                        SearchMode::web_index, window, trial);
            if (doc) docs.push_back(std::move(*doc));
        }
        return docs;
    }

    std::vector<std::optional<EvidenceDocument>> slots(candidates.size());
    parallel_for(candidates.size(), config_.concurrency, [&](std::size_t i) {
        slots[i] = qualify_document(candidates[i].url, query_label(candidates[i]),
                                    SearchMode::web_index, window, trial);
    });
    for (auto& slot : slots)
        if (slot) docs.push_back(std::move(*slot));
    return docs;
}

std::vector<EvidenceDocument> SearchEngine::database_lookup(const std::string& nct_id,
                                                            const DateWindow& window,
                                                            const TrialRecord& trial) {
    static const char* kSources[] = {"pubmed", "pmc", "biorxiv", "medrxiv"};
    std::vector<EvidenceDocument> docs;
    std::set<std::string> seen;
    std::size_t failed_sources = 0;
    std::string trial_text = flatten_protocol(trial, false, true);

    for (const char* source : kSources) {
        nlohmann::json request;
        request["op"] = "db_search";
        request["id"] = nct_id;
        std::string payload;
        try {
            payload = transport_->call(std::string("db.") + source, request);
        } catch (const BackendError& e) {
            // per-source failure: record and return partial results
            ++failed_sources;
            add_warning(std::string("db.") + source, e.what());
            continue;
        }
        nlohmann::json j = nlohmann::json::parse(payload, nullptr, false);
        if (j.is_discarded() || !j.contains("articles")) continue;
        for (const auto& article : j["articles"]) {
            std::string url = article.value("url", "");
            if (url.empty() || !seen.insert(url).second) continue;
            std::optional<Date> date;
            if (article.contains("date"))
                date = normalize_date_string(article["date"].get<std::string>(), clock_);
            if (!date) {
                add_undated(url);
                continue;
            }
            if (!window.contains(*date)) continue;

            std::string title = article.value("title", "");
            std::string text = article.value("text", "");
            EvidenceDocument doc;
            doc.url = url;
            doc.retrieval_mode = SearchMode::literature_database;
            doc.query_used = nct_id;
            doc.extracted_text = title.empty() ? text : title + "\n" + text;
            doc.publication_date = date;
            doc.date_provenance = std::string("database:") + source;
            try {
                IdentityVerdict identity =
                    verify_same_trial(trial_text, doc.extracted_text, judge_);
                doc.identity_verified = identity.same_trial;
                if (!identity.same_trial) continue;
                ResultsVerdict results =
                    verify_reports_results(trial_text, doc.extracted_text, judge_);
                doc.results_verified = results.reports_results;
                if (!results.reports_results) continue;
            } catch (const JudgeContractError& e) {
                add_warning("judge", url + ": " + e.what());
                continue;
            }
            docs.push_back(std::move(doc));
        }
    }
    if (failed_sources == std::size(kSources))
        throw BackendError("literature_database", true, "every literature source failed");
    return docs;
}

std::vector<EvidenceDocument> SearchEngine::search(const TrialRecord& trial,
                                                   const DateWindow& window, SearchMode mode,
                                                   std::optional<std::size_t> limit) {
    std::vector<EvidenceDocument> docs;
    switch (mode) {
        case SearchMode::llm_search_a:
        case SearchMode::llm_search_b:
            docs = llm_mode_search(trial, window, mode, limit);
            break;
        case SearchMode::web_index:
            docs = web_index_mode_search(trial, window, limit);
            break;
        case SearchMode::literature_database:
            docs = database_lookup(trial.nct_id, window, trial);
            break;
    }
    if (limit && docs.size() > *limit) docs.resize(*limit);
    return docs;
}

}  // namespace ctopen
