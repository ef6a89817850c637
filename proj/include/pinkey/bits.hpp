#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pinkey {

/// A bit string stored one bit per byte (values 0 or 1). Index 0 is the
/// most significant bit when the string is read as an integer.
using BitString = std::vector<std::uint8_t>;

BitString bits_from_string(std::string_view text);
std::string bits_to_string(std::span<const std::uint8_t> bits);

/// Big-endian integer value of at most 64 bits.
std::uint64_t bits_to_uint(std::span<const std::uint8_t> bits);
BitString uint_to_bits(std::uint64_t value, std::size_t width);

/// XOR of the two strings over the length of the shorter one.
BitString xor_prefix(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

BitString concat(std::span<const BitString> parts);

/// Packs bits MSB-first into bytes and renders lowercase hex. The final byte
/// is zero-padded on the right.
std::string bits_to_hex(std::span<const std::uint8_t> bits);
BitString bits_from_hex(std::string_view hex, std::size_t bit_count);

/// FNV-1a, used for config and transcript digests.
std::uint64_t fnv1a64(std::string_view data);
std::string digest_hex(std::uint64_t digest);

}  // namespace pinkey
