#pragma once

#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "ctopen/date.hpp"
#include "json.hpp"

namespace ctopen {

struct CacheEntry {
    std::string url;
    std::string raw_digest;  // content-addressed object file
    std::string content_kind;  // html | pdf | text
    std::string extracted_text;
    std::optional<Date> publication_date;
    std::string date_provenance;
    std::string fetched_at;  // injected-clock date, ISO
    bool fetch_failed = false;
    std::string failure;

    nlohmann::json to_json() const;
    static CacheEntry from_json(const nlohmann::json& j);
};

// Content-addressed document store: objects/<aa>/<digest> plus index.jsonl.
// A cached url is never re-fetched within a run; readers are concurrent and
// writers are serialized. Layout is byte-stable across platforms.
class DocumentCache {
  public:
    explicit DocumentCache(std::string dir);

    std::optional<CacheEntry> find(const std::string& url) const;
    bool contains(const std::string& url) const;

    // stores raw content under its digest and records the entry; fills in
    // entry.raw_digest
    void put(CacheEntry& entry, const std::string& raw_content);

    std::string read_raw(const std::string& raw_digest) const;
    std::vector<CacheEntry> entries() const;  // index order
    bool evict(const std::string& url);

    const std::string& dir() const { return dir_; }

  private:
    void load();
    void append_index_line(const CacheEntry& entry);
    void rewrite_index();

    std::string dir_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, CacheEntry> by_url_;
    std::vector<std::string> url_order_;
};

}  // namespace ctopen
