#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace byzlink {

inline constexpr std::string_view kVersion = "0.1.0";

/// Domain error: invalid inputs, violated preconditions, malformed files.
/// The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// FNV-1a over a byte string. Used for the config hashes embedded in run
/// manifests; must stay stable across platforms and runs.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v);

}  // namespace byzlink
