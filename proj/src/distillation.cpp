#include "pinkey/distillation.hpp"

#include <numeric>
#include <stdexcept>

#include "pinkey/model.hpp"
#include "pinkey/rng.hpp"

namespace pinkey {

namespace {

unsigned sum_bits(const std::vector<unsigned>& bits) {
  return std::accumulate(bits.begin(), bits.end(), 0u);
}

}  // namespace

RbCodebook::RbCodebook(std::vector<unsigned> message_bits, unsigned key_bits, std::uint64_t seed)
    : message_bits_(std::move(message_bits)), key_bits_(key_bits), seed_(seed) {
  if (message_bits_.empty()) throw ConfigError("codebook needs at least one message");
  total_bits_ = sum_bits(message_bits_);
  if (key_bits_ > total_bits_) {
    throw ConfigError("key_bits " + std::to_string(key_bits_) + " exceeds the " +
                      std::to_string(total_bits_) + " message bits available");
  }
  if (total_bits_ > kCodebookBudgetBits) {
    throw BudgetExceeded("message product space of 2^" + std::to_string(total_bits_) +
                         " tuples exceeds the 2^" + std::to_string(kCodebookBudgetBits) +
                         " enumeration budget");
  }
}

RbCodebook RbCodebook::build(std::vector<unsigned> message_bits, unsigned key_bits, std::uint64_t seed) {
  RbCodebook cb(std::move(message_bits), key_bits, seed);
  cb.tuple_of_.resize(cb.space_size());
  std::iota(cb.tuple_of_.begin(), cb.tuple_of_.end(), 0u);
  CounterRng rng(seed, 0xc0debeefULL);
  shuffle(std::span<std::uint32_t>(cb.tuple_of_), rng);
  cb.slot_of_.resize(cb.space_size());
  for (std::uint32_t s = 0; s < cb.tuple_of_.size(); ++s) cb.slot_of_[cb.tuple_of_[s]] = s;
  return cb;
}

RbCodebook RbCodebook::from_bins(std::vector<unsigned> message_bits,
                                 const std::vector<std::vector<std::uint64_t>>& bins) {
  const std::size_t count = bins.size();
  if (count == 0 || (count & (count - 1)) != 0) {
    throw ConfigError("bin count must be a power of two");
  }
  unsigned key_bits = 0;
  while ((std::size_t{1} << key_bits) < count) ++key_bits;
  RbCodebook cb(std::move(message_bits), key_bits, 0);
  const std::uint64_t size = cb.space_size();
  cb.slot_of_.assign(size, UINT32_MAX);
  cb.tuple_of_.reserve(size);
  for (const auto& bin : bins) {
    if (bin.size() != cb.bin_size()) throw ConfigError("bins must all hold bin_size tuples");
    for (auto tuple : bin) {
      if (tuple >= size) throw ConfigError("tuple outside the message product space");
      if (cb.slot_of_[tuple] != UINT32_MAX) throw ConfigError("tuple assigned to two bins");
      cb.slot_of_[tuple] = static_cast<std::uint32_t>(cb.tuple_of_.size());
      cb.tuple_of_.push_back(static_cast<std::uint32_t>(tuple));
    }
  }
  return cb;
}

KeyIndex RbCodebook::index_of(std::uint64_t packed) const {
  if (packed >= space_size()) throw std::out_of_range("packed tuple outside the message space");
  const std::uint64_t slot = slot_of_[packed];
  return {slot / bin_size() + 1, slot % bin_size() + 1};
}

std::uint64_t RbCodebook::tuple_at(KeyIndex index) const {
  if (index.k < 1 || index.k > num_bins() || index.k_tilde < 1 || index.k_tilde > bin_size()) {
    throw std::out_of_range("key index outside the codebook");
  }
  return tuple_of_[(index.k - 1) * bin_size() + (index.k_tilde - 1)];
}

std::uint64_t RbCodebook::pack(std::span<const BitString> messages) const {
  if (messages.size() != message_bits_.size()) {
    throw std::out_of_range("expected " + std::to_string(message_bits_.size()) + " common messages");
  }
  std::uint64_t packed = 0;
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (messages[i].size() != message_bits_[i]) {
      throw std::out_of_range("common message " + std::to_string(i + 1) + " has " +
                              std::to_string(messages[i].size()) + " bits, codebook expects " +
                              std::to_string(message_bits_[i]));
    }
    for (auto b : messages[i]) {
      if (b > 1) throw std::out_of_range("message bit out of range");
      packed = (packed << 1) | b;
    }
  }
  return packed;
}

std::vector<BitString> RbCodebook::unpack(std::uint64_t packed) const {
  std::vector<BitString> out;
  out.reserve(message_bits_.size());
  for (std::size_t i = 0; i < message_bits_.size(); ++i) {
    out.push_back(uint_to_bits(message_value(packed, i), message_bits_[i]));
  }
  return out;
}

std::uint64_t RbCodebook::message_value(std::uint64_t packed, std::size_t relay) const {
  unsigned below = 0;
  for (std::size_t j = relay + 1; j < message_bits_.size(); ++j) below += message_bits_[j];
  const unsigned width = message_bits_.at(relay);
  return (packed >> below) & ((std::uint64_t{1} << width) - 1);
}

bool RbCodebook::is_valid_partition() const {
  if (slot_of_.size() != space_size() || tuple_of_.size() != space_size()) return false;
  std::vector<std::uint8_t> seen(space_size(), 0);
  for (std::uint64_t s = 0; s < tuple_of_.size(); ++s) {
    const auto t = tuple_of_[s];
    if (t >= space_size() || seen[t]) return false;
    seen[t] = 1;
    if (slot_of_[t] != s) return false;
  }
  return true;
}

nlohmann::json RbCodebook::to_json() const {
  return {{"message_bits", message_bits_},
          {"key_bits", key_bits_},
          {"seed", seed_},
          {"num_bins", num_bins()},
          {"bin_size", bin_size()},
          {"slots", tuple_of_}};
}

RbCodebook RbCodebook::from_json(const nlohmann::json& j) {
  RbCodebook cb(j.at("message_bits").get<std::vector<unsigned>>(), j.at("key_bits").get<unsigned>(),
                j.at("seed").get<std::uint64_t>());
  cb.tuple_of_ = j.at("slots").get<std::vector<std::uint32_t>>();
  if (cb.tuple_of_.size() != cb.space_size()) throw ConfigError("codebook dump has the wrong slot count");
  cb.slot_of_.assign(cb.space_size(), UINT32_MAX);
  for (std::uint32_t s = 0; s < cb.tuple_of_.size(); ++s) {
    const auto t = cb.tuple_of_[s];
    if (t >= cb.space_size() || cb.slot_of_[t] != UINT32_MAX) throw ConfigError("codebook dump is not a bijection");
    cb.slot_of_[t] = s;
  }
  return cb;
}

KeyIndex distill(const RbCodebook& codebook, std::span<const BitString> common_messages) {
  return codebook.index_of(codebook.pack(common_messages));
}

BitString key_bits_of(const RbCodebook& codebook, KeyIndex index) {
  return uint_to_bits(index.k - 1, codebook.key_bits());
}

BitString xor_distill(std::span<const BitString> common_messages) {
  BitString key;
  for (std::size_t j = 0; j + 1 < common_messages.size(); j += 2) {
    const BitString part = xor_prefix(common_messages[j], common_messages[j + 1]);
    key.insert(key.end(), part.begin(), part.end());
  }
  return key;
}

}  // namespace pinkey
