#include "ctopen/transport.hpp"

#include <condition_variable>
#include <filesystem>
#include <fstream>

#include "ctopen/sha256.hpp"

namespace ctopen {

std::string request_digest(const std::string& backend_id, const nlohmann::json& request) {
    Sha256 h;
    h.update(backend_id);
    h.update("\n");
    h.update(request.dump());
    return h.hex_digest();
}

std::string FixtureStore::fixture_file(const std::string& dir) {
    return dir + "/fixtures.jsonl";
}

FixtureStore FixtureStore::load(const std::string& dir) {
    FixtureStore store;
    std::ifstream in(fixture_file(dir));
    if (!in) throw std::runtime_error("fixture file not found: " + fixture_file(dir));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        store.add(j.at("backend").get<std::string>(), j.at("request_digest").get<std::string>(),
                  j.at("response").get<std::string>());
    }
    return store;
}

std::optional<std::string> FixtureStore::lookup(const std::string& backend_id,
                                                const std::string& digest) const {
    auto it = index_.find(backend_id + "\n" + digest);
    if (it == index_.end()) return std::nullopt;
    return entries_[it->second].payload;
}

void FixtureStore::add(const std::string& backend_id, const std::string& digest,
                       std::string payload) {
    std::string key = backend_id + "\n" + digest;
    auto it = index_.find(key);
    if (it != index_.end()) {
        entries_[it->second].payload = std::move(payload);
        return;
    }
    index_[key] = entries_.size();
    entries_.push_back({backend_id, digest, std::move(payload)});
}

void FixtureStore::save(const std::string& dir) const {
    std::filesystem::create_directories(dir);
    std::ofstream out(fixture_file(dir), std::ios::trunc);
    for (const auto& e : entries_) {
        nlohmann::json j;
        j["backend"] = e.backend_id;
        j["request_digest"] = e.digest;
        j["response"] = e.payload;
        out << j.dump() << "\n";
    }
}

std::map<std::string, std::size_t> FixtureStore::per_backend_counts() const {
    std::map<std::string, std::size_t> counts;
    for (const auto& e : entries_) ++counts[e.backend_id];
    return counts;
}

std::string ReplayTransport::call(const std::string& backend_id, const nlohmann::json& request) {
    auto found = store_.lookup(backend_id, request_digest(backend_id, request));
    if (!found) {
        throw BackendError(backend_id, false,
                           "no recorded response for request digest " +
                               request_digest(backend_id, request).substr(0, 12) +
                               " (replay mode performs no network access)");
    }
    return *found;
}

RecordingTransport::~RecordingTransport() {
    try {
        save();
    } catch (...) {
        // destructor must not throw; an explicit save() surfaces IO errors
    }
}

std::string RecordingTransport::call(const std::string& backend_id,
                                     const nlohmann::json& request) {
    std::string payload = inner_->call(backend_id, request);
    std::lock_guard<std::mutex> lock(mutex_);
    store_.add(backend_id, request_digest(backend_id, request), payload);
    return payload;
}

void RecordingTransport::save() {
    std::lock_guard<std::mutex> lock(mutex_);
    store_.save(dir_);
}

RetryingTransport::RetryingTransport(std::shared_ptr<Transport> inner, int attempts,
                                     int base_delay_ms, Sleeper sleeper)
    : inner_(std::move(inner)),
      attempts_(attempts),
      base_delay_ms_(base_delay_ms),
      sleeper_(std::move(sleeper)) {}

std::string RetryingTransport::call(const std::string& backend_id,
                                    const nlohmann::json& request) {
    int delay = base_delay_ms_;
    for (int attempt = 1;; ++attempt) {
        try {
            return inner_->call(backend_id, request);
        } catch (const BackendError& e) {
            if (!e.retriable() || attempt >= attempts_) throw;
            if (sleeper_) sleeper_(delay);
            delay *= 2;
        }
    }
}

class ThrottlingTransport::Slot {
  public:
    explicit Slot(int limit) : available_(limit > 0 ? limit : 1) {}

    void acquire() {
        std::unique_lock<std::mutex> lock(mutex_);
        cv_.wait(lock, [&] { return available_ > 0; });
        --available_;
    }

    void release() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            ++available_;
        }
        cv_.notify_one();
    }

  private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int available_;
};

ThrottlingTransport::ThrottlingTransport(std::shared_ptr<Transport> inner,
                                         std::map<std::string, int> limits)
    : inner_(std::move(inner)) {
    for (const auto& [backend_id, limit] : limits)
        slots_[backend_id] = std::make_shared<Slot>(limit);
}

std::string ThrottlingTransport::call(const std::string& backend_id,
                                      const nlohmann::json& request) {
    auto it = slots_.find(backend_id);
    if (it == slots_.end()) return inner_->call(backend_id, request);
    it->second->acquire();
    try {
        std::string payload = inner_->call(backend_id, request);
        it->second->release();
        return payload;
    } catch (...) {
        it->second->release();
        throw;
    }
}

std::string CallLoggingTransport::call(const std::string& backend_id,
                                       const nlohmann::json& request) {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        calls_.push_back({backend_id, request});
    }
    return inner_->call(backend_id, request);
}

std::vector<CallLoggingTransport::Call> CallLoggingTransport::calls() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return calls_;
}

std::size_t CallLoggingTransport::count_for(const std::string& backend_id) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::size_t n = 0;
    for (const auto& c : calls_)
        if (c.backend_id == backend_id) ++n;
    return n;
}

}  // namespace ctopen
