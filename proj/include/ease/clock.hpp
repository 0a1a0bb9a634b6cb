#pragma once

#include <chrono>
#include <memory>

namespace ease {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Duration = std::chrono::milliseconds;

/// Time source for a task loop. Tasks never read the system clock directly:
/// fully scripted seeded tasks run on a VirtualClock so their exports are
/// reproducible byte for byte.
class Clock {
public:
    virtual ~Clock() = default;
    virtual Timestamp now() const = 0;
    /// Advances virtual time; no-op on the real clock.
    virtual void advance(Duration) {}
    virtual bool is_virtual() const { return false; }
};

class SystemClock final : public Clock {
public:
    Timestamp now() const override {
        return std::chrono::time_point_cast<Duration>(std::chrono::system_clock::now());
    }
};

/// Starts at the Unix epoch and moves only when advance() is called.
class VirtualClock final : public Clock {
public:
    VirtualClock() = default;
    explicit VirtualClock(Timestamp start) : now_(start) {}

    Timestamp now() const override { return now_; }
    void advance(Duration d) override { now_ += d; }
    bool is_virtual() const override { return true; }

private:
    Timestamp now_{};
};

}  // namespace ease
