#include "theorygen/gateway/rate_limiter.hpp"

#include <algorithm>
#include <thread>

namespace theorygen {

RateLimiter::RateLimiter(double requests_per_second, double burst)
    : rate_(requests_per_second),
      burst_(std::max(burst, 1.0)),
      tokens_(std::max(burst, 1.0)),
      last_refill_(std::chrono::steady_clock::now()) {}

double RateLimiter::refill_locked() {
    auto now = std::chrono::steady_clock::now();
    double elapsed = std::chrono::duration<double>(now - last_refill_).count();
    last_refill_ = now;
    tokens_ = std::min(burst_, tokens_ + elapsed * rate_);
    return tokens_;
}

void RateLimiter::acquire() {
    if (rate_ <= 0.0) return;
    while (true) {
        double wait_s = 0.0;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            if (refill_locked() >= 1.0) {
                tokens_ -= 1.0;
                return;
            }
            wait_s = (1.0 - tokens_) / rate_;
        }
        std::this_thread::sleep_for(std::chrono::duration<double>(wait_s));
    }
}

bool RateLimiter::try_acquire() {
    if (rate_ <= 0.0) return true;
    std::lock_guard<std::mutex> lock(mutex_);
    if (refill_locked() >= 1.0) {
        tokens_ -= 1.0;
        return true;
    }
    return false;
}

}  // namespace theorygen
