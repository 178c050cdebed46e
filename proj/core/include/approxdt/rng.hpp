#pragma once

#include <cstdint>
#include <string_view>

namespace approxdt {

/// Counter-based, splittable generator built on the SplitMix64 finalizer.
///
/// The n-th draw of a stream is mix(key + n * gamma), so a stream is fully
/// described by (key, counter) and produces the same sequence on every
/// platform. `split` derives an independent child stream from a label,
/// which lets separate pipeline stages share one user-facing seed.
class CounterRng {
public:
    explicit constexpr CounterRng(std::uint64_t seed) noexcept : key_(mix(seed)) {}

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept
    {
        z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31U);
    }

    constexpr std::uint64_t next() noexcept
    {
        ++counter_;
        return mix(key_ + counter_ * kGamma);
    }

    /// Uniform real in [0, 1) with 53 random bits.
    constexpr double uniform() noexcept
    {
        return static_cast<double>(next() >> 11U) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound). Rejection sampling keeps it unbiased.
    constexpr std::uint64_t below(std::uint64_t bound) noexcept
    {
        if (bound <= 1) {
            return 0;
        }
        std::uint64_t const limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x = next();
        while (x >= limit) {
            x = next();
        }
        return x % bound;
    }

    /// Uniform integer in [lo, hi].
    constexpr std::int64_t between(std::int64_t lo, std::int64_t hi) noexcept
    {
        auto const span = static_cast<std::uint64_t>(hi - lo) + 1U;
        return lo + static_cast<std::int64_t>(below(span));
    }

    /// Independent stream keyed by this stream's key and `stream_id`.
    /// Does not advance the parent.
    [[nodiscard]] constexpr CounterRng split(std::uint64_t stream_id) const noexcept
    {
        CounterRng child{0};
        child.key_ = mix(key_ ^ mix(stream_id + kGamma));
        return child;
    }

    [[nodiscard]] constexpr CounterRng split(std::string_view label) const noexcept
    {
        // FNV-1a over the label
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (char c : label) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        return split(h);
    }

    [[nodiscard]] constexpr std::uint64_t counter() const noexcept { return counter_; }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace approxdt
