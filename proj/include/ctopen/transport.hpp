#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace ctopen {

// External-service failure. Retriable transport faults (timeouts, 5xx) are
// distinct from non-retriable ones (quota exhaustion, missing fixtures).
class BackendError : public std::runtime_error {
  public:
    BackendError(std::string backend_id, bool retriable, const std::string& message)
        : std::runtime_error(backend_id + ": " + message),
          backend_id_(std::move(backend_id)),
          retriable_(retriable) {}

    const std::string& backend_id() const { return backend_id_; }
    bool retriable() const { return retriable_; }

  private:
    std::string backend_id_;
    bool retriable_;
};

// One outbound call: canonical JSON request -> opaque response payload.
// Every external interaction (LLM search, judge, web index, databases,
// fetches, OCR) goes through this seam so runs can be recorded and replayed.
class Transport {
  public:
    virtual ~Transport() = default;
    virtual std::string call(const std::string& backend_id, const nlohmann::json& request) = 0;
};

std::string request_digest(const std::string& backend_id, const nlohmann::json& request);

// Line-delimited fixture records of (backend id, request digest, response
// payload), the shared record/replay format for all backends.
class FixtureStore {
  public:
    static FixtureStore load(const std::string& dir);

    std::optional<std::string> lookup(const std::string& backend_id,
                                      const std::string& digest) const;
    void add(const std::string& backend_id, const std::string& digest, std::string payload);
    void save(const std::string& dir) const;

    std::map<std::string, std::size_t> per_backend_counts() const;
    std::size_t size() const { return entries_.size(); }

    static std::string fixture_file(const std::string& dir);

  private:
    struct Entry {
        std::string backend_id;
        std::string digest;
        std::string payload;
    };
    std::vector<Entry> entries_;
    std::map<std::string, std::size_t> index_;  // backend\n digest -> entry
};

// Replay mode never performs network access: a request without a recorded
// response is an error, not a live call.
class ReplayTransport : public Transport {
  public:
    explicit ReplayTransport(FixtureStore store) : store_(std::move(store)) {}
    std::string call(const std::string& backend_id, const nlohmann::json& request) override;

  private:
    FixtureStore store_;
};

class RecordingTransport : public Transport {
  public:
    RecordingTransport(std::shared_ptr<Transport> inner, std::string dir)
        : inner_(std::move(inner)), dir_(std::move(dir)) {}
    ~RecordingTransport();

    std::string call(const std::string& backend_id, const nlohmann::json& request) override;
    void save();

  private:
    std::shared_ptr<Transport> inner_;
    std::string dir_;
    FixtureStore store_;
    std::mutex mutex_;
};

// 3 attempts with exponential backoff for retriable errors; the sleeper is
// injectable so tests do not wait.
class RetryingTransport : public Transport {
  public:
    using Sleeper = std::function<void(int milliseconds)>;

    RetryingTransport(std::shared_ptr<Transport> inner, int attempts = 3,
                      int base_delay_ms = 250, Sleeper sleeper = nullptr);
    std::string call(const std::string& backend_id, const nlohmann::json& request) override;

  private:
    std::shared_ptr<Transport> inner_;
    int attempts_;
    int base_delay_ms_;
    Sleeper sleeper_;
};

// Caps in-flight calls per backend to the configured rate limit.
class ThrottlingTransport : public Transport {
  public:
    ThrottlingTransport(std::shared_ptr<Transport> inner, std::map<std::string, int> limits);
    std::string call(const std::string& backend_id, const nlohmann::json& request) override;

  private:
    class Slot;
    std::shared_ptr<Transport> inner_;
    std::map<std::string, std::shared_ptr<Slot>> slots_;
};

// Test/audit observer: which backends were called, with which requests.
class CallLoggingTransport : public Transport {
  public:
    struct Call {
        std::string backend_id;
        nlohmann::json request;
    };

    explicit CallLoggingTransport(std::shared_ptr<Transport> inner) : inner_(std::move(inner)) {}
    std::string call(const std::string& backend_id, const nlohmann::json& request) override;

    std::vector<Call> calls() const;
    std::size_t count_for(const std::string& backend_id) const;

  private:
    std::shared_ptr<Transport> inner_;
    mutable std::mutex mutex_;
    std::vector<Call> calls_;
};

}  // namespace ctopen
