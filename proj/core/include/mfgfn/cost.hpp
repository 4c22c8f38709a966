#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace mfgfn {

/// Oracle-query cost as a fixed-point value in micro-units (1e-6).
/// Ledger sums are exact integer arithmetic: thousands of accumulated
/// queries cannot drift the way repeated double addition can.
class Cost {
public:
    constexpr Cost() = default;

    static constexpr Cost from_micros(std::int64_t micros) {
        Cost c;
        c.micros_ = micros;
        return c;
    }

    /// Parse a decimal literal ("0.125", "20"). Throws ConfigError when the
    /// text is not a decimal number or needs more than six fractional digits.
    static Cost parse(std::string_view text);

    /// Round a double to the nearest micro-unit.
    static Cost from_double(double value);

    constexpr std::int64_t micros() const { return micros_; }
    double value() const { return static_cast<double>(micros_) * 1e-6; }

    /// Shortest decimal text that parses back to the same value ("4.2", "20").
    std::string str() const;

    Cost& operator+=(Cost other) {
        micros_ += other.micros_;
        return *this;
    }
    friend constexpr Cost operator+(Cost a, Cost b) { return from_micros(a.micros_ + b.micros_); }
    friend constexpr Cost operator-(Cost a, Cost b) { return from_micros(a.micros_ - b.micros_); }
    friend constexpr Cost operator*(Cost a, std::int64_t k) { return from_micros(a.micros_ * k); }
    friend constexpr auto operator<=>(Cost a, Cost b) = default;

private:
    std::int64_t micros_ = 0;
};

}  // namespace mfgfn
