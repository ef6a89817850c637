#include "pinkey/bits.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace pinkey {

BitString bits_from_string(std::string_view text) {
  BitString out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == '0' || c == '1') {
      out.push_back(static_cast<std::uint8_t>(c - '0'));
    } else {
      throw std::invalid_argument("bit string contains a character other than 0/1");
    }
  }
  return out;
}

std::string bits_to_string(std::span<const std::uint8_t> bits) {
  std::string out;
  out.reserve(bits.size());
  for (auto b : bits) out.push_back(b ? '1' : '0');
  return out;
}

std::uint64_t bits_to_uint(std::span<const std::uint8_t> bits) {
  if (bits.size() > 64) throw std::length_error("bit string longer than 64 bits");
  std::uint64_t v = 0;
  for (auto b : bits) v = (v << 1) | (b & 1u);
  return v;
}

BitString uint_to_bits(std::uint64_t value, std::size_t width) {
  if (width > 64) throw std::length_error("width exceeds 64 bits");
  BitString out(width);
  for (std::size_t i = 0; i < width; ++i) {
    out[width - 1 - i] = static_cast<std::uint8_t>((value >> i) & 1u);
  }
  return out;
}

BitString xor_prefix(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  const std::size_t len = std::min(a.size(), b.size());
  BitString out(len);
  for (std::size_t i = 0; i < len; ++i) out[i] = static_cast<std::uint8_t>((a[i] ^ b[i]) & 1u);
  return out;
}

BitString concat(std::span<const BitString> parts) {
  BitString out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::string bits_to_hex(std::span<const std::uint8_t> bits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < bits.size(); i += 8) {
    unsigned byte = 0;
    for (std::size_t j = 0; j < 8; ++j) {
      byte <<= 1;
      if (i + j < bits.size()) byte |= bits[i + j] & 1u;
    }
    out.push_back(kDigits[byte >> 4]);
    out.push_back(kDigits[byte & 0xF]);
  }
  return out;
}

BitString bits_from_hex(std::string_view hex, std::size_t bit_count) {
  if (hex.size() * 4 < bit_count) throw std::invalid_argument("hex payload shorter than bit count");
  BitString out;
  out.reserve(bit_count);
  for (char c : hex) {
    unsigned nibble = 0;
    if (c >= '0' && c <= '9') nibble = static_cast<unsigned>(c - '0');
    else if (c >= 'a' && c <= 'f') nibble = static_cast<unsigned>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F') nibble = static_cast<unsigned>(c - 'A' + 10);
    else throw std::invalid_argument("invalid hex digit");
    for (int j = 3; j >= 0 && out.size() < bit_count; --j) {
      out.push_back(static_cast<std::uint8_t>((nibble >> j) & 1u));
    }
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest_hex(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

}  // namespace pinkey
