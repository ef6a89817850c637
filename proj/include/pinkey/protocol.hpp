#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pinkey/bits.hpp"
#include "pinkey/model.hpp"

namespace pinkey {

enum class SenderKind { Relay, Alice, Bob };

/// A public-channel speaker. `relay` is the 0-based relay index; the
/// round-robin law numbers relays from 1, so relay index i speaks in rounds
/// with l mod (M+2) == i+1.
struct Sender {
  SenderKind kind = SenderKind::Alice;
  std::size_t relay = 0;

  static Sender relay_node(std::size_t index) { return {SenderKind::Relay, index}; }
  static Sender alice() { return {SenderKind::Alice, 0}; }
  static Sender bob() { return {SenderKind::Bob, 0}; }

  friend bool operator==(const Sender&, const Sender&) = default;
};

std::string to_string(const Sender& s);
Sender sender_from_string(std::string_view label);

/// Who may speak in round l (1-based) of a network with m relays.
Sender scheduled_sender(std::uint64_t l, std::size_t m);

enum class MessageKind { SyndromeAlice, SyndromeBob, XorPayload };

std::string to_string(MessageKind k);
MessageKind message_kind_from_string(std::string_view label);

struct Round {
  std::uint64_t l = 0;
  Sender sender;
  MessageKind kind = MessageKind::XorPayload;
  BitString payload;
};

/// Everything sent over the public channel, which is also Eve's full view.
class Transcript {
 public:
  Transcript() = default;
  Transcript(std::size_t m, std::uint64_t n) : m_(m), n_(n) {}

  /// Places the message in the first round after the last logged one in which
  /// `sender` is scheduled. Rounds in between carry nothing.
  const Round& append(Sender sender, MessageKind kind, BitString payload);

  const std::vector<Round>& rounds() const { return rounds_; }
  std::size_t relays() const { return m_; }
  std::uint64_t n() const { return n_; }

  /// Per-round rate payload_bits / n, one entry per logged round.
  std::vector<double> rate_log() const;

  /// True when every logged round obeys the round-robin law.
  bool schedule_consistent() const;

  /// Finds the single message of the given kind sent by relay i.
  const Round* find(std::size_t relay, MessageKind kind) const;

  /// One JSON object per round: {"l", "sender", "kind", "bits", "payload"}.
  std::string to_jsonl() const;
  static Transcript from_jsonl(std::string_view text, std::size_t m, std::uint64_t n);

  std::uint64_t digest() const;

 private:
  std::size_t m_ = 0;
  std::uint64_t n_ = 0;
  std::vector<Round> rounds_;
};

/// Pairwise keys after key agreement. w_a / w_b are the relay's copies; the
/// terminals hold alice_w_a / bob_w_b, which differ only after an undetected
/// reconciliation error.
struct PairwiseKeys {
  std::vector<BitString> w_a;
  std::vector<BitString> w_b;
  std::vector<BitString> alice_w_a;
  std::vector<BitString> bob_w_b;
  std::vector<BitString> w_common;
  std::vector<double> rates;
};

/// The common message is the shorter pairwise key; on equal length it is
/// Alice's key.
bool common_is_bob_key(std::size_t len_a, std::size_t len_b);

class BlockUncorrectable : public std::runtime_error {
 public:
  explicit BlockUncorrectable(std::size_t block)
      : std::runtime_error("reconciliation block " + std::to_string(block) + " is uncorrectable"),
        block_(block) {}
  std::size_t block() const { return block_; }

 private:
  std::size_t block_;
};

class ReconciliationFailure : public std::runtime_error {
 public:
  ReconciliationFailure(std::size_t pair, SenderKind terminal, std::size_t block)
      : std::runtime_error("reconciliation failed for relay " + std::to_string(pair + 1) +
                           (terminal == SenderKind::Alice ? " (Alice link)" : " (Bob link)") +
                           " at block " + std::to_string(block)),
        pair_(pair),
        terminal_(terminal) {}
  std::size_t pair() const { return pair_; }
  SenderKind terminal() const { return terminal_; }

 private:
  std::size_t pair_;
  SenderKind terminal_;
};

/// Syndrome reconciliation over 7-bit blocks.
///
/// The relay publishes, per block, the 3-bit Hamming(7,4) syndrome followed by
/// the block parity. The terminal corrects one error when the syndrome
/// difference is nonzero and the parity differs; any other nonzero
/// combination means at least two errors and raises BlockUncorrectable. Both
/// sides keep the data positions 3, 5, 6, 7 of the relay's block, then a public
/// Toeplitz hash shortens the result by the disclosed parity bit plus
/// ceil(7 h2(crossover) / 4) bits per block.
struct Reconciliation {
  BitString terminal_key;
  BitString relay_key;
  BitString public_message;
  std::size_t corrected_blocks = 0;
  std::size_t raw_key_bits = 0;
};

Reconciliation reconcile_pair(const BitString& seq_terminal, const BitString& seq_relay,
                              double crossover, std::uint64_t hash_seed = 0);

/// Key bits kept per 7-bit block after compression.
unsigned reconciled_bits_per_block(double crossover);

/// Toeplitz universal hash from in.size() bits to out_len bits; the matrix is
/// drawn from `seed`.
BitString toeplitz_hash(const BitString& in, std::size_t out_len, std::uint64_t seed);

struct KeyAgreement {
  PairwiseKeys keys;
  Transcript transcript;
};

/// Step 1 first half: every relay agrees on a pairwise key with each terminal.
/// IdealCommon links need no public discussion. DsbsPair links run
/// reconcile_pair and log the syndromes in the relay's rounds.
/// Throws ReconciliationFailure when a block cannot be corrected.
KeyAgreement agree_keys(const SourceRealization& realization, const PinInstance& instance);

/// Step 1 second half: relay i broadcasts prefix(W_{A,i}) xor prefix(W_{B,i})
/// over the shorter key's length.
Transcript xor_broadcast(const PairwiseKeys& keys, Transcript transcript);

/// The common messages as reconstructed by `terminal` (Alice or Bob) from
/// their own pairwise keys and the public XOR payloads.
std::vector<BitString> reconstruct_common(const PairwiseKeys& keys, const Transcript& transcript,
                                          SenderKind terminal);

}  // namespace pinkey
