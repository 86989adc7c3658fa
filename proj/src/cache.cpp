#include "ctopen/cache.hpp"

#include <filesystem>
#include <mutex>
#include <fstream>
#include <stdexcept>

#include "ctopen/sha256.hpp"

namespace fs = std::filesystem;

namespace ctopen {

nlohmann::json CacheEntry::to_json() const {
    nlohmann::json j;
    j["url"] = url;
    j["raw_digest"] = raw_digest;
    j["content_kind"] = content_kind;
    j["extracted_text"] = extracted_text;
    if (publication_date) j["publication_date"] = publication_date->to_iso();
    j["date_provenance"] = date_provenance;
    j["fetched_at"] = fetched_at;
    if (fetch_failed) {
        j["fetch_failed"] = true;
        j["failure"] = failure;
    }
    return j;
}

CacheEntry CacheEntry::from_json(const nlohmann::json& j) {
    CacheEntry e;
    e.url = j.value("url", "");
    e.raw_digest = j.value("raw_digest", "");
    e.content_kind = j.value("content_kind", "");
    e.extracted_text = j.value("extracted_text", "");
    if (j.contains("publication_date"))
        e.publication_date = parse_iso_date(j["publication_date"].get<std::string>());
    e.date_provenance = j.value("date_provenance", "");
    e.fetched_at = j.value("fetched_at", "");
    e.fetch_failed = j.value("fetch_failed", false);
    e.failure = j.value("failure", "");
    return e;
}

DocumentCache::DocumentCache(std::string dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_ + "/objects");
    load();
}

void DocumentCache::load() {
    std::ifstream in(dir_ + "/index.jsonl");
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        CacheEntry e = CacheEntry::from_json(nlohmann::json::parse(line));
        if (!by_url_.count(e.url)) url_order_.push_back(e.url);
        by_url_[e.url] = std::move(e);  // last record wins
    }
}

std::optional<CacheEntry> DocumentCache::find(const std::string& url) const {
    std::shared_lock lock(mutex_);
    auto it = by_url_.find(url);
    if (it == by_url_.end()) return std::nullopt;
    return it->second;
}

bool DocumentCache::contains(const std::string& url) const {
    std::shared_lock lock(mutex_);
    return by_url_.count(url) > 0;
}

void DocumentCache::put(CacheEntry& entry, const std::string& raw_content) {
    entry.raw_digest = Sha256::hex(raw_content);
    std::unique_lock lock(mutex_);
    std::string shard = dir_ + "/objects/" + entry.raw_digest.substr(0, 2);
    fs::create_directories(shard);
    std::string object_path = shard + "/" + entry.raw_digest;
    if (!fs::exists(object_path)) {
        std::ofstream out(object_path, std::ios::binary | std::ios::trunc);
        out.write(raw_content.data(), static_cast<std::streamsize>(raw_content.size()));
    }
    if (!by_url_.count(entry.url)) url_order_.push_back(entry.url);
    append_index_line(entry);
    by_url_[entry.url] = entry;
}

void DocumentCache::append_index_line(const CacheEntry& entry) {
    std::ofstream out(dir_ + "/index.jsonl", std::ios::app);
    out << entry.to_json().dump() << "\n";
}

std::string DocumentCache::read_raw(const std::string& raw_digest) const {
    std::string path = dir_ + "/objects/" + raw_digest.substr(0, 2) + "/" + raw_digest;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cache object missing: " + raw_digest);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::vector<CacheEntry> DocumentCache::entries() const {
    std::shared_lock lock(mutex_);
    std::vector<CacheEntry> out;
    out.reserve(url_order_.size());
    for (const auto& url : url_order_) out.push_back(by_url_.at(url));
    return out;
}

bool DocumentCache::evict(const std::string& url) {
    std::unique_lock lock(mutex_);
    auto it = by_url_.find(url);
    if (it == by_url_.end()) return false;
    by_url_.erase(it);
    url_order_.erase(std::remove(url_order_.begin(), url_order_.end(), url), url_order_.end());
    rewrite_index();
    return true;
}

void DocumentCache::rewrite_index() {
    std::ofstream out(dir_ + "/index.jsonl", std::ios::trunc);
    for (const auto& url : url_order_) out << by_url_.at(url).to_json().dump() << "\n";
}

}  // namespace ctopen
