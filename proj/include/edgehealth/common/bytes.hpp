#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace edgehealth {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Thrown when a byte string cannot be decoded into the structure it claims to hold.
class MalformedEncoding : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Bytes to_bytes(std::string_view text);
std::string to_string(ByteView bytes);

std::string to_hex(ByteView bytes);
Bytes from_hex(std::string_view hex);

void append(Bytes& out, ByteView tail);
void put_u32_be(Bytes& out, std::uint32_t value);
void put_u64_be(Bytes& out, std::uint64_t value);

// Readers throw MalformedEncoding when the input is too short.
std::uint32_t read_u32_be(ByteView in, std::size_t offset);
std::uint64_t read_u64_be(ByteView in, std::size_t offset);

inline Bytes u64_be(std::uint64_t value) {
    Bytes out;
    put_u64_be(out, value);
    return out;
}

}  // namespace edgehealth
