#pragma once

#include <condition_variable>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ctopen {

// Counting limiter for the global concurrency ceiling.
class ConcurrencyLimiter {
  public:
    explicit ConcurrencyLimiter(int limit) : available_(limit > 0 ? limit : 1) {}

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

    class Guard {
      public:
        explicit Guard(ConcurrencyLimiter& limiter) : limiter_(limiter) { limiter_.acquire(); }
        ~Guard() { limiter_.release(); }
        Guard(const Guard&) = delete;
        Guard& operator=(const Guard&) = delete;

      private:
        ConcurrencyLimiter& limiter_;
    };

  private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int available_;
};

// Runs fn(i) for i in [0, count) on up to max_workers threads. Results are
// aggregated by index, so output order never depends on scheduling. The
// first exception is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t count, int max_workers, Fn&& fn) {
    if (count == 0) return;
    std::size_t workers = static_cast<std::size_t>(max_workers > 0 ? max_workers : 1);
    if (workers > count) workers = count;
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }

    std::mutex mutex;
    std::size_t next = 0;
    std::exception_ptr error;
    auto body = [&]() {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard<std::mutex> lock(mutex);
                if (next >= count || error) return;
                i = next++;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(body);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace ctopen
