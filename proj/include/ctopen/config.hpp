#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctopen/date.hpp"
#include "ctopen/datefinder.hpp"
#include "json.hpp"

namespace ctopen {

struct BackendConfig {
    std::string endpoint;
    std::string api_key;
    std::string api_key_env;  // environment variable holding the key
    int rate_limit = 4;

    std::string resolved_key() const;
};

// Run configuration: backend credentials and endpoints, concurrency ceilings,
// cache path, replay/record directories, clock pin and prompt version. File
// values can be overridden through CTOPEN_* environment variables.
struct RunConfig {
    std::map<std::string, BackendConfig> backends;
    int concurrency = 8;
    std::string cache_dir = "ctopen-cache";
    std::optional<std::string> replay_dir;
    std::optional<std::string> record_dir;
    std::string assets_dir;
    std::string prompt_version = "v1";
    std::optional<Date> today;  // pinned clock; system clock when absent

    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::string& path);  // file + env overrides
    static RunConfig defaults();

    void apply_env_overrides();
    nlohmann::json to_json() const;
    std::string digest() const;  // for run-report auditability
    Clock clock() const;

    bool replay_mode() const { return replay_dir.has_value(); }

    // Outside replay mode every required backend needs an endpoint and, for
    // authenticated backends, a resolvable credential. Throws naming the
    // missing key.
    void require_backends(const std::vector<std::string>& backend_ids) const;
};

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace ctopen
