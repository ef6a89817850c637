#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "pinkey/distillation.hpp"

namespace pinkey {

/// An information measure came out negative beyond numerical dust.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline constexpr std::size_t kPmfBudget = std::size_t{1} << 24;
inline constexpr double kNegativeClamp = 1e-9;

/// Dense joint probability table. Variable 0 is the slowest-varying index.
class JointPmf {
 public:
  /// Validates non-negativity, normalization (1e-12) and the size budget.
  JointPmf(std::vector<std::size_t> alphabet_sizes, std::vector<double> table);

  /// Normalizes non-negative counts.
  static JointPmf from_counts(std::vector<std::size_t> alphabet_sizes, std::span<const double> counts);

  std::size_t arity() const { return sizes_.size(); }
  const std::vector<std::size_t>& alphabet_sizes() const { return sizes_; }
  const std::vector<double>& table() const { return table_; }

  /// Marginal over `vars`, laid out in the order given.
  std::vector<double> marginal(std::span<const std::size_t> vars) const;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<double> table_;
};

double entropy_of(std::span<const double> probabilities);

/// H of the listed variables, in bits.
double exact_entropy(const JointPmf& pmf, std::span<const std::size_t> vars);
double exact_entropy(const JointPmf& pmf, std::initializer_list<std::size_t> vars);

/// I(A;B) = H(A) + H(B) - H(A,B). Rejects empty or overlapping sets.
double exact_mi(const JointPmf& pmf, std::span<const std::size_t> a, std::span<const std::size_t> b);
double exact_mi(const JointPmf& pmf, std::initializer_list<std::size_t> a, std::initializer_list<std::size_t> b);

/// I(A;B|C).
double exact_conditional_mi(const JointPmf& pmf, std::span<const std::size_t> a,
                            std::span<const std::size_t> b, std::span<const std::size_t> c);

/// Clamps values in (-1e-9, 0) to zero and throws InvariantViolation below.
double clamp_information(double value);

/// Lengths of the two pairwise keys at one relay.
struct PairKeyLengths {
  unsigned alice = 0;
  unsigned bob = 0;
};

/// Exact secrecy audit for one relay m under uniform, independent pairwise
/// keys.
///
/// The public transcript is the XOR payload per relay, F_i = W_i xor U_i with
/// U_i the overlapping prefix of the longer key. When the enumeration of
/// (W^M, U) fits kJointAuditBits the joint law of (K, W_m, F) is built and
/// I(K; W_m, F) is exact. Otherwise the transcript term is replaced by its
/// upper bound I(W^M; F) = sum_i I(W_i; F_i), computed exactly per relay, and
/// `joint_exact` is false; the two coincide when that bound is zero.
struct LeakageAudit {
  std::size_t relay = 0;
  std::uint64_t codebook_seed = 0;
  double leakage = 0.0;             // I(K; W_m, F)
  double leakage_message = 0.0;     // I(K; W_m)
  double transcript_term = 0.0;     // I(K; F | W_m)
  double transcript_leakage = 0.0;  // I(W^M; F)
  double h_message = 0.0;           // H(W_m)
  double h_tuple_given_key = 0.0;   // H(W^M | K)
  double h_tuple_given_message_key = 0.0;  // H(W^M | W_m, K)
  double h_key = 0.0;               // H(K)
  double bin_slack = 0.0;           // H(W^M | W_m, K) - (max_i b_i - b_m)
  bool joint_exact = false;

  nlohmann::json to_json() const;
};

inline constexpr unsigned kJointAuditBits = 20;

/// Deterministic key map on packed message tuples, returning a value below
/// `key_alphabet`.
struct KeyMap {
  std::uint64_t key_alphabet = 1;
  std::function<std::uint64_t(std::uint64_t packed)> key_of;
};

LeakageAudit audit_key_map(const std::vector<unsigned>& message_bits, const KeyMap& map,
                           std::size_t relay, std::span<const PairKeyLengths> key_lengths);

/// Audit of an RB codebook. Without explicit key lengths each pair is taken to
/// have two equal-length keys of the message size.
LeakageAudit leakage_audit(const RbCodebook& codebook, std::size_t relay);
LeakageAudit leakage_audit(const RbCodebook& codebook, std::size_t relay,
                           std::span<const PairKeyLengths> key_lengths);

/// H(K | C) under uniform common messages, by enumerating the codebook.
double key_entropy(const RbCodebook& codebook);

/// Same audit for the XOR baseline key.
LeakageAudit xor_leakage_audit(const std::vector<unsigned>& message_bits, std::size_t relay);

/// I(W_i; F_i) for one relay's XOR payload with uniform independent keys.
double transcript_leakage(PairKeyLengths lengths);

struct EmpiricalMiConfig {
  std::size_t bootstrap = 1000;
  double confidence = 0.95;
  std::uint64_t seed = 0;
  bool miller_madow = true;
};

struct EmpiricalMi {
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t samples = 0;
  /// Joint alphabet over sample count exceeded 0.1.
  bool unreliable = false;
};

/// Plug-in MI from paired symbol sequences with optional Miller-Madow
/// correction and a percentile bootstrap interval. Needs at least 1000 pairs.
EmpiricalMi empirical_mi(std::span<const std::uint32_t> x, std::span<const std::uint32_t> y,
                         const EmpiricalMiConfig& config = {});

}  // namespace pinkey
