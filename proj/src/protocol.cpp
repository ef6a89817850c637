#include "pinkey/protocol.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "pinkey/rng.hpp"

namespace pinkey {

using nlohmann::json;

std::string to_string(const Sender& s) {
  switch (s.kind) {
    case SenderKind::Relay:
      return "relay:" + std::to_string(s.relay + 1);
    case SenderKind::Alice:
      return "alice";
    case SenderKind::Bob:
      return "bob";
  }
  return "?";
}

Sender sender_from_string(std::string_view label) {
  if (label == "alice") return Sender::alice();
  if (label == "bob") return Sender::bob();
  if (label.starts_with("relay:")) {
    const auto number = std::stoul(std::string(label.substr(6)));
    if (number == 0) throw std::invalid_argument("relay numbers start at 1");
    return Sender::relay_node(number - 1);
  }
  throw std::invalid_argument("unknown sender label: " + std::string(label));
}

Sender scheduled_sender(std::uint64_t l, std::size_t m) {
  const std::uint64_t r = l % (m + 2);
  if (r == 0) return Sender::bob();
  if (r == m + 1) return Sender::alice();
  return Sender::relay_node(static_cast<std::size_t>(r - 1));
}

std::string to_string(MessageKind k) {
  switch (k) {
    case MessageKind::SyndromeAlice:
      return "syndrome_a";
    case MessageKind::SyndromeBob:
      return "syndrome_b";
    case MessageKind::XorPayload:
      return "xor";
  }
  return "?";
}

MessageKind message_kind_from_string(std::string_view label) {
  if (label == "syndrome_a") return MessageKind::SyndromeAlice;
  if (label == "syndrome_b") return MessageKind::SyndromeBob;
  if (label == "xor") return MessageKind::XorPayload;
  throw std::invalid_argument("unknown message kind: " + std::string(label));
}

const Round& Transcript::append(Sender sender, MessageKind kind, BitString payload) {
  std::uint64_t l = rounds_.empty() ? 1 : rounds_.back().l + 1;
  while (!(scheduled_sender(l, m_) == sender)) ++l;
  rounds_.push_back({l, sender, kind, std::move(payload)});
  return rounds_.back();
}

std::vector<double> Transcript::rate_log() const {
  std::vector<double> out;
  out.reserve(rounds_.size());
  for (const auto& r : rounds_) {
    out.push_back(static_cast<double>(r.payload.size()) / static_cast<double>(n_));
  }
  return out;
}

bool Transcript::schedule_consistent() const {
  std::uint64_t prev = 0;
  for (const auto& r : rounds_) {
    if (r.l <= prev) return false;
    if (!(scheduled_sender(r.l, m_) == r.sender)) return false;
    prev = r.l;
  }
  return true;
}

const Round* Transcript::find(std::size_t relay, MessageKind kind) const {
  for (const auto& r : rounds_) {
    if (r.sender.kind == SenderKind::Relay && r.sender.relay == relay && r.kind == kind) return &r;
  }
  return nullptr;
}

std::string Transcript::to_jsonl() const {
  std::string out;
  for (const auto& r : rounds_) {
    json rec = {{"l", r.l},
                {"sender", to_string(r.sender)},
                {"kind", to_string(r.kind)},
                {"bits", r.payload.size()},
                {"payload", bits_to_hex(r.payload)}};
    out += rec.dump();
    out += '\n';
  }
  return out;
}

Transcript Transcript::from_jsonl(std::string_view text, std::size_t m, std::uint64_t n) {
  Transcript t(m, n);
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto rec = json::parse(line);
    Round r;
    r.l = rec.at("l").get<std::uint64_t>();
    r.sender = sender_from_string(rec.at("sender").get<std::string>());
    r.kind = message_kind_from_string(rec.at("kind").get<std::string>());
    r.payload = bits_from_hex(rec.at("payload").get<std::string>(), rec.at("bits").get<std::size_t>());
    t.rounds_.push_back(std::move(r));
  }
  return t;
}

std::uint64_t Transcript::digest() const { return fnv1a64(to_jsonl()); }

bool common_is_bob_key(std::size_t len_a, std::size_t len_b) { return len_b < len_a; }

namespace {

constexpr std::size_t kBlock = 7;
constexpr std::array<std::size_t, 4> kDataPositions = {3, 5, 6, 7};

struct BlockCheck {
  unsigned syndrome = 0;  // XOR of the 1-based positions holding a one
  unsigned parity = 0;
};

BlockCheck block_check(const BitString& seq, std::size_t block) {
  BlockCheck c;
  for (std::size_t pos = 1; pos <= kBlock; ++pos) {
    if (seq[block * kBlock + pos - 1] & 1u) {
      c.syndrome ^= static_cast<unsigned>(pos);
      c.parity ^= 1u;
    }
  }
  return c;
}

BitString data_bits(const BitString& seq) {
  BitString out;
  out.reserve(seq.size() / kBlock * kDataPositions.size());
  for (std::size_t b = 0; b < seq.size() / kBlock; ++b) {
    for (auto pos : kDataPositions) out.push_back(seq[b * kBlock + pos - 1]);
  }
  return out;
}

}  // namespace

unsigned reconciled_bits_per_block(double crossover) {
  const auto dropped = 1 + static_cast<unsigned>(std::ceil(7.0 * binary_entropy(crossover) / 4.0 - 1e-12));
  return dropped >= kDataPositions.size() ? 0u : static_cast<unsigned>(kDataPositions.size()) - dropped;
}

BitString toeplitz_hash(const BitString& in, std::size_t out_len, std::uint64_t seed) {
  if (in.empty() || out_len == 0) return BitString(out_len, 0);
  CounterRng rng(seed);
  BitString diag(out_len + in.size() - 1);
  for (auto& b : diag) b = rng.bit();
  BitString out(out_len, 0);
  for (std::size_t j = 0; j < out_len; ++j) {
    std::uint8_t acc = 0;
    for (std::size_t k = 0; k < in.size(); ++k) acc ^= diag[j + in.size() - 1 - k] & in[k];
    out[j] = acc;
  }
  return out;
}

Reconciliation reconcile_pair(const BitString& seq_terminal, const BitString& seq_relay,
                              double crossover, std::uint64_t hash_seed) {
  if (seq_terminal.size() != seq_relay.size()) {
    throw std::invalid_argument("reconcile_pair: sequences differ in length");
  }
  if (seq_terminal.size() % kBlock != 0) {
    throw std::invalid_argument("reconcile_pair: length must be a multiple of 7");
  }
  const std::size_t blocks = seq_terminal.size() / kBlock;
  Reconciliation out;
  BitString corrected = seq_terminal;
  out.public_message.reserve(blocks * 4);
  for (std::size_t b = 0; b < blocks; ++b) {
    const BlockCheck relay = block_check(seq_relay, b);
    for (int j = 2; j >= 0; --j) out.public_message.push_back(static_cast<std::uint8_t>((relay.syndrome >> j) & 1u));
    out.public_message.push_back(static_cast<std::uint8_t>(relay.parity));

    const BlockCheck own = block_check(seq_terminal, b);
    const unsigned syndrome = own.syndrome ^ relay.syndrome;
    const unsigned parity = own.parity ^ relay.parity;
    if (syndrome == 0 && parity == 0) continue;
    if (syndrome == 0 || parity == 0) throw BlockUncorrectable(b);
    corrected[b * kBlock + syndrome - 1] ^= 1u;
    ++out.corrected_blocks;
  }
  const BitString raw_terminal = data_bits(corrected);
  const BitString raw_relay = data_bits(seq_relay);
  out.raw_key_bits = raw_relay.size();
  const std::size_t key_len = blocks * reconciled_bits_per_block(crossover);
  out.terminal_key = toeplitz_hash(raw_terminal, key_len, hash_seed);
  out.relay_key = toeplitz_hash(raw_relay, key_len, hash_seed);
  return out;
}

KeyAgreement agree_keys(const SourceRealization& realization, const PinInstance& instance) {
  instance.validate();
  const std::size_t m = instance.m;
  const std::uint64_t n = instance.params.n;
  KeyAgreement out{{}, Transcript(m, n)};
  auto& keys = out.keys;
  keys.w_a.resize(m);
  keys.w_b.resize(m);
  keys.alice_w_a.resize(m);
  keys.bob_w_b.resize(m);

  for (std::size_t i = 0; i < m; ++i) {
    const auto& pair = instance.pairs[i];
    if (pair.mode == SourceMode::IdealCommon) {
      keys.w_a[i] = realization.x_relays[i].from_alice;
      keys.w_b[i] = realization.x_relays[i].from_bob;
      keys.alice_w_a[i] = realization.x_a[i];
      keys.bob_w_b[i] = realization.x_b[i];
      continue;
    }
    // Hash matrices are public: derived from the configured seed.
    const CounterRng hashes(instance.params.seed, 0x7e5b11a2ULL + i);
    Reconciliation ra;
    Reconciliation rb;
    try {
      ra = reconcile_pair(realization.x_a[i], realization.x_relays[i].from_alice, pair.crossover_a,
                          hashes.substream(0).key());
    } catch (const BlockUncorrectable& e) {
      throw ReconciliationFailure(i, SenderKind::Alice, e.block());
    }
    try {
      rb = reconcile_pair(realization.x_b[i], realization.x_relays[i].from_bob, pair.crossover_b,
                          hashes.substream(1).key());
    } catch (const BlockUncorrectable& e) {
      throw ReconciliationFailure(i, SenderKind::Bob, e.block());
    }
    out.transcript.append(Sender::relay_node(i), MessageKind::SyndromeAlice, std::move(ra.public_message));
    out.transcript.append(Sender::relay_node(i), MessageKind::SyndromeBob, std::move(rb.public_message));
    keys.w_a[i] = std::move(ra.relay_key);
    keys.alice_w_a[i] = std::move(ra.terminal_key);
    keys.w_b[i] = std::move(rb.relay_key);
    keys.bob_w_b[i] = std::move(rb.terminal_key);
  }

  keys.w_common.resize(m);
  keys.rates.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    keys.w_common[i] = common_is_bob_key(keys.w_a[i].size(), keys.w_b[i].size()) ? keys.w_b[i] : keys.w_a[i];
    keys.rates[i] = static_cast<double>(keys.w_common[i].size()) / static_cast<double>(n);
  }
  return out;
}

Transcript xor_broadcast(const PairwiseKeys& keys, Transcript transcript) {
  for (std::size_t i = 0; i < keys.w_a.size(); ++i) {
    transcript.append(Sender::relay_node(i), MessageKind::XorPayload, xor_prefix(keys.w_a[i], keys.w_b[i]));
  }
  return transcript;
}

std::vector<BitString> reconstruct_common(const PairwiseKeys& keys, const Transcript& transcript,
                                          SenderKind terminal) {
  if (terminal == SenderKind::Relay) throw std::invalid_argument("only Alice or Bob reconstruct");
  const bool alice = terminal == SenderKind::Alice;
  const std::size_t m = alice ? keys.alice_w_a.size() : keys.bob_w_b.size();
  std::vector<BitString> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Round* round = transcript.find(i, MessageKind::XorPayload);
    if (round == nullptr) throw std::logic_error("missing XOR payload for relay " + std::to_string(i + 1));
    const bool bob_key = common_is_bob_key(keys.w_a[i].size(), keys.w_b[i].size());
    const BitString& own = alice ? keys.alice_w_a[i] : keys.bob_w_b[i];
    // Alice owns W_{A,i}; she needs the payload only when W_{B,i} is common.
    if (alice != bob_key) {
      out[i] = own;
    } else {
      out[i] = xor_prefix(round->payload, own);
    }
  }
  return out;
}

}  // namespace pinkey
