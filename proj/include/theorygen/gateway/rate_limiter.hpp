#pragma once

#include <chrono>
#include <condition_variable>
#include <mutex>

namespace theorygen {

/// Token-bucket rate limiter. acquire() blocks until a token is available;
/// safe to call from many threads.
class RateLimiter {
public:
    /// rate <= 0 disables limiting entirely.
    RateLimiter(double requests_per_second, double burst);

    void acquire();

    /// Non-blocking variant, for tests.
    bool try_acquire();

private:
    double refill_locked();

    double rate_;
    double burst_;
    double tokens_;
    std::chrono::steady_clock::time_point last_refill_;
    std::mutex mutex_;
};

}  // namespace theorygen
