#include "ctopen/config.hpp"

#include <cstdlib>
#include <fstream>

#include "ctopen/assets.hpp"
#include "ctopen/sha256.hpp"

namespace ctopen {

namespace {

const char* env_or_null(const char* name) {
    const char* v = std::getenv(name);
    return (v && *v) ? v : nullptr;
}

}  // namespace

std::string BackendConfig::resolved_key() const {
    if (!api_key.empty()) return api_key;
    if (!api_key_env.empty()) {
        if (const char* v = env_or_null(api_key_env.c_str())) return v;
    }
    return "";
}

RunConfig RunConfig::defaults() {
    RunConfig c;
    c.assets_dir = AssetStore::default_root();
    return c;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig c = defaults();
    if (j.contains("backends")) {
        for (const auto& [id, b] : j["backends"].items()) {
            BackendConfig bc;
            bc.endpoint = b.value("endpoint", "");
            bc.api_key = b.value("api_key", "");
            bc.api_key_env = b.value("api_key_env", "");
            bc.rate_limit = b.value("rate_limit", 4);
            c.backends[id] = std::move(bc);
        }
    }
    c.concurrency = j.value("concurrency", 8);
    c.cache_dir = j.value("cache_dir", c.cache_dir);
    if (j.contains("replay_dir")) c.replay_dir = j["replay_dir"].get<std::string>();
    if (j.contains("record_dir")) c.record_dir = j["record_dir"].get<std::string>();
    c.assets_dir = j.value("assets_dir", c.assets_dir);
    c.prompt_version = j.value("prompt_version", c.prompt_version);
    if (j.contains("today")) {
        auto d = parse_iso_date(j["today"].get<std::string>());
        if (!d) throw ConfigError("config: invalid today date \"" +
                                  j["today"].get<std::string>() + "\"");
        c.today = d;
    }
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not found: " + path);
    nlohmann::json j;
    in >> j;
    RunConfig c = from_json(j);
    c.apply_env_overrides();
    return c;
}

void RunConfig::apply_env_overrides() {
    if (const char* v = env_or_null("CTOPEN_CACHE_DIR")) cache_dir = v;
    if (const char* v = env_or_null("CTOPEN_REPLAY_DIR")) replay_dir = v;
    if (const char* v = env_or_null("CTOPEN_RECORD_DIR")) record_dir = v;
    if (const char* v = env_or_null("CTOPEN_ASSETS_DIR")) assets_dir = v;
    if (const char* v = env_or_null("CTOPEN_PROMPT_VERSION")) prompt_version = v;
    if (const char* v = env_or_null("CTOPEN_CONCURRENCY")) concurrency = std::atoi(v);
    if (const char* v = env_or_null("CTOPEN_TODAY")) {
        auto d = parse_iso_date(v);
        if (!d) throw ConfigError("CTOPEN_TODAY: invalid date");
        today = d;
    }
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["backends"] = nlohmann::json::object();
    for (const auto& [id, b] : backends) {
        // keys stay out of run reports
        j["backends"][id] = {{"endpoint", b.endpoint},
                             {"api_key_env", b.api_key_env},
                             {"rate_limit", b.rate_limit}};
    }
    j["concurrency"] = concurrency;
    j["cache_dir"] = cache_dir;
    if (replay_dir) j["replay_dir"] = *replay_dir;
    if (record_dir) j["record_dir"] = *record_dir;
    j["assets_dir"] = assets_dir;
    j["prompt_version"] = prompt_version;
    if (today) j["today"] = today->to_iso();
    return j;
}

std::string RunConfig::digest() const { return Sha256::hex(to_json().dump()); }

Clock RunConfig::clock() const {
    if (today) return Clock{*today};
    return Clock::system();
}

void RunConfig::require_backends(const std::vector<std::string>& backend_ids) const {
    if (replay_mode()) return;  // replayed runs need no credentials
    for (const auto& id : backend_ids) {
        auto it = backends.find(id);
        if (it == backends.end() || it->second.endpoint.empty())
            throw ConfigError("missing backend configuration: backends." + id + ".endpoint");
        bool needs_key = id != "fetch.direct";
        if (needs_key && it->second.resolved_key().empty())
            throw ConfigError("missing credential: backends." + id + ".api_key (or api_key_env)");
    }
}

}  // namespace ctopen
