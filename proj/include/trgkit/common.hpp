#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace trgkit {

// Error categories map 1:1 onto CLI exit codes.
enum class errc : int {
    config = 2,
    input = 3,
    internal = 4,
};

// Carries a stable machine-readable kind ("TruncatedRecord", "DimMismatch", ...)
// next to the human message. `detail` holds an optional count (e.g. records
// parsed before a truncated tail).
class Error : public std::runtime_error {
public:
    Error(errc category, std::string kind, const std::string& message, int64_t detail = -1)
        : std::runtime_error(kind + ": " + message),
          category_(category),
          kind_(std::move(kind)),
          detail_(detail) {}

    errc category() const { return category_; }
    const std::string& kind() const { return kind_; }
    int64_t detail() const { return detail_; }

private:
    errc category_;
    std::string kind_;
    int64_t detail_;
};

// --- deterministic hashing --------------------------------------------------

// splitmix64 finalizer; stable across platforms.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t seed, uint64_t v) {
    return mix64(seed ^ mix64(v));
}

inline uint64_t hash_str(std::string_view s, uint64_t seed = 0) {
    uint64_t h = mix64(seed ^ 0x632b9a3fb0a1becdULL);
    for (unsigned char c : s) h = mix64(h ^ c);
    return h;
}

// --- deterministic RNG -------------------------------------------------------

// xoshiro-free deterministic generator: splitmix64 stream. The standard
// distributions are implementation-defined, so all draws go through the
// helpers below.
class DetRng {
public:
    explicit DetRng(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, n)
    uint64_t bounded(uint64_t n) {
        return n ? next() % n : 0;
    }

    // uniform in [0, 1)
    double real() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // uniform in [lo, hi)
    double real(double lo, double hi) {
        return lo + (hi - lo) * real();
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t state_;
};

// --- hex ---------------------------------------------------------------------

inline std::string hex_encode(const std::vector<uint8_t>& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

inline std::vector<uint8_t> hex_decode(std::string_view s) {
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    if (s.size() % 2 != 0) throw Error(errc::input, "BadHex", "odd-length hex string");
    std::vector<uint8_t> out(s.size() / 2);
    for (size_t i = 0; i < out.size(); ++i) {
        int hi = nib(s[2 * i]), lo = nib(s[2 * i + 1]);
        if (hi < 0 || lo < 0) throw Error(errc::input, "BadHex", "non-hex character");
        out[i] = static_cast<uint8_t>((hi << 4) | lo);
    }
    return out;
}

constexpr const char* kToolVersion = "0.1.0";

}  // namespace trgkit
