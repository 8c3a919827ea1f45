#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "ridepulse/errors.hpp"

namespace ridepulse {

/// FNV-1a 64-bit over a byte string, rendered as 16 hex digits.
/// Provenance digest only; not cryptographic.
inline std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static const char* kHex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
        h >>= 4;
    }
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::file_unreadable, path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string file_digest(const std::string& path) {
    return fnv1a64_hex(read_file(path));
}

} // namespace ridepulse
