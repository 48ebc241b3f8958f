#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>

namespace autonoma {

// Milliseconds since the UNIX epoch (system clock) or since an arbitrary
// origin (logical clock). Events and audit records store this value.
using TimestampMs = std::int64_t;

class Clock {
public:
    virtual ~Clock() = default;
    virtual TimestampMs now_ms() const = 0;
};

class SystemClock final : public Clock {
public:
    TimestampMs now_ms() const override {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::system_clock::now().time_since_epoch())
            .count();
    }
};

// Manually advanced clock for deterministic runs.
class ManualClock final : public Clock {
public:
    explicit ManualClock(TimestampMs start = 0) : now_(start) {}

    TimestampMs now_ms() const override { return now_.load(std::memory_order_acquire); }
    void set(TimestampMs t) { now_.store(t, std::memory_order_release); }
    void advance(TimestampMs delta) { now_.fetch_add(delta, std::memory_order_acq_rel); }

private:
    std::atomic<TimestampMs> now_;
};

}  // namespace autonoma
