#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "pinkey/bits.hpp"

namespace pinkey {

/// Largest message product space the codebook will enumerate, in bits.
inline constexpr unsigned kCodebookBudgetBits = 24;

/// Thrown when a desk-scale enumeration would exceed its budget.
class BudgetExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Bin index k (the private key) and position k_tilde inside the bin, both
/// 1-based.
struct KeyIndex {
  std::uint64_t k = 1;
  std::uint64_t k_tilde = 1;

  friend bool operator==(const KeyIndex&, const KeyIndex&) = default;
};

/// Random-binning private-key codebook over W_1 x ... x W_M.
///
/// A message tuple is packed into one integer by concatenating the messages
/// W_1 W_2 ... W_M as a big-endian bit string. The codebook stores the
/// bijection between packed tuples and slots; slot s belongs to bin
/// s / bin_size and sits at offset s % bin_size.
class RbCodebook {
 public:
  /// Uniformly random equal-size partition drawn from `seed`.
  static RbCodebook build(std::vector<unsigned> message_bits, unsigned key_bits, std::uint64_t seed);

  /// Codebook from an explicit partition. Every bin must hold the same number
  /// of packed tuples and together they must cover the product space once.
  static RbCodebook from_bins(std::vector<unsigned> message_bits,
                              const std::vector<std::vector<std::uint64_t>>& bins);

  const std::vector<unsigned>& message_bits() const { return message_bits_; }
  unsigned total_bits() const { return total_bits_; }
  unsigned key_bits() const { return key_bits_; }
  std::uint64_t num_bins() const { return std::uint64_t{1} << key_bits_; }
  std::uint64_t bin_size() const { return std::uint64_t{1} << (total_bits_ - key_bits_); }
  std::uint64_t space_size() const { return std::uint64_t{1} << total_bits_; }
  std::uint64_t seed() const { return seed_; }

  KeyIndex index_of(std::uint64_t packed) const;
  std::uint64_t tuple_at(KeyIndex index) const;

  /// Packs per-relay messages; throws std::out_of_range on a length mismatch.
  std::uint64_t pack(std::span<const BitString> messages) const;
  std::vector<BitString> unpack(std::uint64_t packed) const;

  /// Bits [offset, offset + message_bits[i]) of the packed tuple hold W_i,
  /// counted from the most significant end.
  std::uint64_t message_value(std::uint64_t packed, std::size_t relay) const;

  /// True when bins are disjoint, equal-size and cover the space.
  bool is_valid_partition() const;

  nlohmann::json to_json() const;
  static RbCodebook from_json(const nlohmann::json& j);

 private:
  RbCodebook(std::vector<unsigned> message_bits, unsigned key_bits, std::uint64_t seed);

  std::vector<unsigned> message_bits_;
  unsigned total_bits_ = 0;
  unsigned key_bits_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<std::uint32_t> slot_of_;   // packed tuple -> slot
  std::vector<std::uint32_t> tuple_of_;  // slot -> packed tuple
};

/// Maps the common messages to their (bin, offset) pair; the bin number is
/// the private key.
KeyIndex distill(const RbCodebook& codebook, std::span<const BitString> common_messages);

/// The key as a key_bits-wide bit string (k - 1 in binary).
BitString key_bits_of(const RbCodebook& codebook, KeyIndex index);

/// XOR baseline: concatenates W_1^W_2, W_3^W_4, ...; each XOR is cut to the
/// shorter message and an unpaired last relay is dropped.
BitString xor_distill(std::span<const BitString> common_messages);

}  // namespace pinkey
