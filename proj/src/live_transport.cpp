#ifdef CTOPEN_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif

#include "ctopen/live_transport.hpp"

#include <chrono>
#include <thread>

#include "httplib.h"

namespace ctopen {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;    // /path?query
};

SplitUrl split_url(const std::string& url) {
    SplitUrl out;
    auto scheme_end = url.find("://");
    std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = url.find('/', host_start);
    if (path_start == std::string::npos) {
        out.origin = url;
        out.path = "/";
    } else {
        out.origin = url.substr(0, path_start);
        out.path = url.substr(path_start);
    }
    return out;
}

std::string url_encode(const std::string& value) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : value) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xf]);
        }
    }
    return out;
}

class LiveTransport : public Transport {
  public:
    explicit LiveTransport(RunConfig config) : config_(std::move(config)) {}

    std::string call(const std::string& backend_id, const nlohmann::json& request) override {
        std::string op = request.value("op", "");
        if (op == "get") return fetch(backend_id, request.value("url", ""));
        if (backend_id == "web_index") return web_search(request);
        if (backend_id.rfind("db.", 0) == 0) return database(backend_id, request);
        return post_json(backend_id, request);
    }

  private:
    const BackendConfig& backend(const std::string& id) const {
        auto it = config_.backends.find(id);
        if (it == config_.backends.end() || it->second.endpoint.empty())
            throw BackendError(id, false, "backend endpoint not configured");
        return it->second;
    }

    httplib::Result do_get(const std::string& url, const httplib::Headers& headers) {
        SplitUrl split = split_url(url);
        httplib::Client client(split.origin);
        client.set_connection_timeout(20);
        client.set_read_timeout(60);
        client.set_follow_location(true);
        return client.Get(split.path, headers);
    }

    std::string fetch(const std::string& backend_id, const std::string& url) {
        std::string target = url;
        httplib::Headers headers = {{"User-Agent", "ctopen/1.0"}};
        if (backend_id == "fetch.proxy") {
            const BackendConfig& proxy = backend("fetch.proxy");
            target = proxy.endpoint + "?apikey=" + url_encode(proxy.resolved_key()) +
                     "&url=" + url_encode(url);
        }
        auto result = do_get(target, headers);
        if (!result)
            throw BackendError(backend_id, true,
                               "transport failure: " + httplib::to_string(result.error()));
        nlohmann::json payload;
        payload["status"] = result->status;
        auto it = result->headers.find("Content-Type");
        payload["content_type"] = it == result->headers.end() ? "" : it->second;
        payload["body_b64"] = base64_encode(result->body);
        return payload.dump();
    }

    std::string web_search(const nlohmann::json& request) {
        const BackendConfig& b = backend("web_index");
        std::string target = b.endpoint + "?q=" + url_encode(request.value("q", "")) +
                             "&count=" + std::to_string(request.value("count", 20));
        if (request.contains("freshness"))
            target += "&freshness=" + url_encode(request["freshness"].get<std::string>());
        auto result = do_get(target, {{"Accept", "application/json"},
                                      {"X-Subscription-Token", b.resolved_key()}});
        if (!result)
            throw BackendError("web_index", true,
                               "transport failure: " + httplib::to_string(result.error()));
        if (result->status == 429)
            throw BackendError("web_index", false, "quota exhausted");
        if (result->status != 200)
            throw BackendError("web_index", true, "status " + std::to_string(result->status));
        return result->body;
    }

    std::string database(const std::string& backend_id, const nlohmann::json& request) {
        const BackendConfig& b = backend(backend_id);
        std::string target = b.endpoint;
        if (request.contains("id"))
            target += "?id=" + url_encode(request["id"].get<std::string>());
        else
            target += "?url=" + url_encode(request.value("url", ""));
        if (!b.resolved_key().empty()) target += "&api_key=" + url_encode(b.resolved_key());
        auto result = do_get(target, {{"Accept", "application/json"}});
        if (!result)
            throw BackendError(backend_id, true,
                               "transport failure: " + httplib::to_string(result.error()));
        if (result->status != 200)
            throw BackendError(backend_id, true, "status " + std::to_string(result->status));
        return result->body;
    }

    std::string post_json(const std::string& backend_id, const nlohmann::json& request) {
        const BackendConfig& b = backend(backend_id);
        SplitUrl split = split_url(b.endpoint);
        httplib::Client client(split.origin);
        client.set_connection_timeout(20);
        client.set_read_timeout(300);
        httplib::Headers headers = {{"Authorization", "Bearer " + b.resolved_key()}};
        auto result = client.Post(split.path, headers, request.dump(), "application/json");
        if (!result)
            throw BackendError(backend_id, true,
                               "transport failure: " + httplib::to_string(result.error()));
        if (result->status == 429 || result->status == 402)
            throw BackendError(backend_id, false,
                               "quota exhausted (status " + std::to_string(result->status) + ")");
        if (result->status != 200)
            throw BackendError(backend_id, true, "status " + std::to_string(result->status));
        return result->body;
    }

    RunConfig config_;
};

}  // namespace

std::string base64_encode(const std::string& bytes) {
    static const char* alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 2 < bytes.size()) {
        unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                     (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                     static_cast<unsigned char>(bytes[i + 2]);
        out.push_back(alphabet[(v >> 18) & 63]);
        out.push_back(alphabet[(v >> 12) & 63]);
        out.push_back(alphabet[(v >> 6) & 63]);
        out.push_back(alphabet[v & 63]);
        i += 3;
    }
    if (i + 1 == bytes.size()) {
        unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
        out.push_back(alphabet[(v >> 18) & 63]);
        out.push_back(alphabet[(v >> 12) & 63]);
        out += "==";
    } else if (i + 2 == bytes.size()) {
        unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                     (static_cast<unsigned char>(bytes[i + 1]) << 8);
        out.push_back(alphabet[(v >> 18) & 63]);
        out.push_back(alphabet[(v >> 12) & 63]);
        out.push_back(alphabet[(v >> 6) & 63]);
        out += "=";
    }
    return out;
}

std::shared_ptr<Transport> make_live_transport(const RunConfig& config) {
    return std::make_shared<LiveTransport>(config);
}

std::shared_ptr<Transport> make_transport_stack(const RunConfig& config) {
    std::shared_ptr<Transport> base;
    RetryingTransport::Sleeper sleeper;
    if (config.replay_mode()) {
        base = std::make_shared<ReplayTransport>(FixtureStore::load(*config.replay_dir));
    } else {
        base = make_live_transport(config);
        sleeper = [](int ms) { std::this_thread::sleep_for(std::chrono::milliseconds(ms)); };
        std::map<std::string, int> limits;
        for (const auto& [backend_id, backend] : config.backends)
            limits[backend_id] = backend.rate_limit;
        if (!limits.empty()) base = std::make_shared<ThrottlingTransport>(base, limits);
    }
    if (config.record_dir) base = std::make_shared<RecordingTransport>(base, *config.record_dir);
    return std::make_shared<RetryingTransport>(base, 3, 250, sleeper);
}

}  // namespace ctopen
