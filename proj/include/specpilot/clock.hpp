#pragma once

#include <cstdint>
#include <memory>
#include <string>

namespace specpilot {

/// Injected time source. Timestamps are epoch seconds (UTC); artifacts
/// render them via iso_utc / compact_utc. Deterministic runs use a
/// FixedClock so byte-identical artifact trees are reproducible.
class Clock {
  public:
    virtual ~Clock() = default;

    virtual std::int64_t now() = 0;

    /// Independent cursor for work unit `index`. Work units draw their
    /// timestamps from their own lane, so per-unit artifacts do not
    /// depend on scheduling order.
    virtual std::unique_ptr<Clock> lane(int index) = 0;
};

class SystemClock final : public Clock {
  public:
    std::int64_t now() override;
    std::unique_ptr<Clock> lane(int index) override;
};

/// Starts at `start` and advances by `step` seconds per call. Each lane
/// starts one hour block after the previous one.
class FixedClock final : public Clock {
  public:
    explicit FixedClock(std::int64_t start, std::int64_t step = 1)
        : start_(start), step_(step)
    {}

    std::int64_t now() override { return start_ + step_ * counter_++; }

    std::unique_ptr<Clock> lane(int index) override
    {
        return std::make_unique<FixedClock>(start_ + 3600 * (static_cast<std::int64_t>(index) + 1), step_);
    }

  private:
    std::int64_t start_;
    std::int64_t step_;
    std::int64_t counter_ = 0;
};

/// "2026-01-01T00:00:00Z"
std::string iso_utc(std::int64_t epoch_seconds);

/// "20260101T000000Z"
std::string compact_utc(std::int64_t epoch_seconds);

/// Inverse of iso_utc; throws InvalidArgumentError on malformed input.
std::int64_t parse_iso_utc(const std::string& text);

}  // namespace specpilot
