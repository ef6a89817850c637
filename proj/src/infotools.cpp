#include "pinkey/infotools.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pinkey/model.hpp"
#include "pinkey/protocol.hpp"
#include "pinkey/rng.hpp"

namespace pinkey {

JointPmf::JointPmf(std::vector<std::size_t> alphabet_sizes, std::vector<double> table)
    : sizes_(std::move(alphabet_sizes)), table_(std::move(table)) {
  if (sizes_.empty()) throw ConfigError("joint pmf needs at least one variable");
  std::size_t expected = 1;
  for (auto s : sizes_) {
    if (s == 0) throw ConfigError("alphabet sizes must be positive");
    if (expected > kPmfBudget / s) throw BudgetExceeded("joint pmf exceeds the 2^24 entry budget");
    expected *= s;
  }
  if (table_.size() != expected) throw ConfigError("pmf table size does not match the alphabets");
  double total = 0.0;
  for (double p : table_) {
    if (!(p >= 0.0)) throw ConfigError("pmf entries must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("pmf does not sum to one");
}

JointPmf JointPmf::from_counts(std::vector<std::size_t> alphabet_sizes, std::span<const double> counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (!(total > 0.0)) throw ConfigError("counts must have positive mass");
  std::vector<double> table(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) table[i] = counts[i] / total;
  // Rounding can leave the sum a few ulps off; push the residue into the largest cell.
  const double sum = std::accumulate(table.begin(), table.end(), 0.0);
  auto it = std::max_element(table.begin(), table.end());
  *it += 1.0 - sum;
  return JointPmf(std::move(alphabet_sizes), std::move(table));
}

std::vector<double> JointPmf::marginal(std::span<const std::size_t> vars) const {
  std::vector<std::size_t> strides(sizes_.size());
  std::size_t stride = 1;
  for (std::size_t v = sizes_.size(); v-- > 0;) {
    strides[v] = stride;
    stride *= sizes_[v];
  }
  std::size_t out_size = 1;
  std::vector<std::size_t> out_strides(vars.size());
  for (std::size_t j = vars.size(); j-- > 0;) {
    if (vars[j] >= sizes_.size()) throw std::out_of_range("variable index out of range");
    out_strides[j] = out_size;
    out_size *= sizes_[vars[j]];
  }
  std::vector<double> out(out_size, 0.0);
  for (std::size_t idx = 0; idx < table_.size(); ++idx) {
    if (table_[idx] == 0.0) continue;
    std::size_t o = 0;
    for (std::size_t j = 0; j < vars.size(); ++j) {
      o += ((idx / strides[vars[j]]) % sizes_[vars[j]]) * out_strides[j];
    }
    out[o] += table_[idx];
  }
  return out;
}

double entropy_of(std::span<const double> probabilities) {
  double h = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double exact_entropy(const JointPmf& pmf, std::span<const std::size_t> vars) {
  if (vars.empty()) throw std::invalid_argument("entropy of an empty variable set");
  return entropy_of(pmf.marginal(vars));
}

double exact_entropy(const JointPmf& pmf, std::initializer_list<std::size_t> vars) {
  return exact_entropy(pmf, std::span<const std::size_t>(vars.begin(), vars.size()));
}

double clamp_information(double value) {
  if (value >= 0.0) return value;
  if (value > -kNegativeClamp) return 0.0;
  throw InvariantViolation("information measure is negative: " + std::to_string(value));
}

namespace {

std::vector<std::size_t> join(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  std::vector<std::size_t> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

bool overlaps(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  for (auto x : a) {
    if (std::find(b.begin(), b.end(), x) != b.end()) return true;
  }
  return false;
}

}  // namespace

double exact_mi(const JointPmf& pmf, std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("mutual information needs nonempty sets");
  if (overlaps(a, b)) throw std::invalid_argument("mutual information sets overlap");
  return clamp_information(exact_entropy(pmf, a) + exact_entropy(pmf, b) - exact_entropy(pmf, join(a, b)));
}

double exact_mi(const JointPmf& pmf, std::initializer_list<std::size_t> a, std::initializer_list<std::size_t> b) {
  return exact_mi(pmf, std::span<const std::size_t>(a.begin(), a.size()),
                  std::span<const std::size_t>(b.begin(), b.size()));
}

double exact_conditional_mi(const JointPmf& pmf, std::span<const std::size_t> a,
                            std::span<const std::size_t> b, std::span<const std::size_t> c) {
  if (c.empty()) return exact_mi(pmf, a, b);
  if (a.empty() || b.empty()) throw std::invalid_argument("mutual information needs nonempty sets");
  if (overlaps(a, b) || overlaps(a, c) || overlaps(b, c)) {
    throw std::invalid_argument("conditional mutual information sets overlap");
  }
  const auto ac = join(a, c);
  const auto bc = join(b, c);
  const auto abc = join(ac, b);
  return clamp_information(exact_entropy(pmf, ac) + exact_entropy(pmf, bc) - exact_entropy(pmf, abc) -
                           exact_entropy(pmf, c));
}

nlohmann::json LeakageAudit::to_json() const {
  return {{"relay", relay + 1},
          {"codebook_seed", codebook_seed},
          {"leakage", leakage},
          {"leakage_message", leakage_message},
          {"transcript_term", transcript_term},
          {"transcript_leakage", transcript_leakage},
          {"h_message", h_message},
          {"h_tuple_given_key", h_tuple_given_key},
          {"h_tuple_given_message_key", h_tuple_given_message_key},
          {"h_key", h_key},
          {"bin_slack", bin_slack},
          {"joint_exact", joint_exact}};
}

namespace {

std::uint64_t low_mask(unsigned width) {
  return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

// Right-shift amounts locating each message inside a packed tuple.
std::vector<unsigned> message_shifts(const std::vector<unsigned>& bits) {
  std::vector<unsigned> shifts(bits.size());
  unsigned below = 0;
  for (std::size_t i = bits.size(); i-- > 0;) {
    shifts[i] = below;
    below += bits[i];
  }
  return shifts;
}

}  // namespace

namespace {

// I(W; W xor U) for w_bits-wide uniform W and independent uniform U.
double prefix_xor_leakage(unsigned w_bits) {
  const std::size_t side = std::size_t{1} << w_bits;
  std::vector<double> counts(side * side, 0.0);
  for (std::uint64_t w = 0; w < side; ++w) {
    for (std::uint64_t u = 0; u < side; ++u) counts[w * side + (w ^ u)] += 1.0;
  }
  const JointPmf pmf = JointPmf::from_counts({side, side}, counts);
  return exact_mi(pmf, {0}, {1});
}

}  // namespace

double transcript_leakage(PairKeyLengths lengths) {
  // Only the overlapping prefixes enter the payload, and the common message
  // is the shorter key, so the law lives on 2 * overlap bits. Disjoint bit
  // positions are independent; wide keys are enumerated in 12-bit chunks.
  const unsigned overlap = std::min(lengths.alice, lengths.bob);
  const unsigned chunk = kCodebookBudgetBits / 2;
  double total = 0.0;
  for (unsigned done = 0; done < overlap; done += chunk) total += prefix_xor_leakage(std::min(chunk, overlap - done));
  return total;
}

LeakageAudit audit_key_map(const std::vector<unsigned>& message_bits, const KeyMap& map,
                           std::size_t relay, std::span<const PairKeyLengths> key_lengths) {
  const std::size_t m = message_bits.size();
  if (relay >= m) throw std::out_of_range("relay index out of range");
  if (key_lengths.size() != m) throw ConfigError("need one key-length pair per relay");
  for (std::size_t i = 0; i < m; ++i) {
    if (std::min(key_lengths[i].alice, key_lengths[i].bob) != message_bits[i]) {
      throw ConfigError("common message length must equal the shorter pairwise key at relay " +
                        std::to_string(i + 1));
    }
  }
  const unsigned total = std::accumulate(message_bits.begin(), message_bits.end(), 0u);
  if (total > kCodebookBudgetBits) throw BudgetExceeded("message tuple space exceeds the enumeration budget");
  const auto shifts = message_shifts(message_bits);
  const unsigned bm = message_bits[relay];
  const std::size_t wm_size = std::size_t{1} << bm;
  const std::uint64_t space = std::uint64_t{1} << total;

  LeakageAudit out;
  out.relay = relay;

  // (K, W_m) under uniform W^M.
  {
    std::vector<double> counts(map.key_alphabet * wm_size, 0.0);
    for (std::uint64_t packed = 0; packed < space; ++packed) {
      const std::uint64_t wm = (packed >> shifts[relay]) & low_mask(bm);
      counts[map.key_of(packed) * wm_size + wm] += 1.0;
    }
    const JointPmf pmf = JointPmf::from_counts({map.key_alphabet, wm_size}, counts);
    out.h_key = exact_entropy(pmf, {0});
    out.h_message = exact_entropy(pmf, {1});
    const double h_joint = exact_entropy(pmf, {0, 1});
    out.leakage_message = exact_mi(pmf, {0}, {1});
    const double h_tuple = static_cast<double>(total);
    out.h_tuple_given_key = h_tuple - out.h_key;
    out.h_tuple_given_message_key = h_tuple - h_joint;
    const unsigned max_bits = *std::max_element(message_bits.begin(), message_bits.end());
    out.bin_slack = out.h_tuple_given_message_key - static_cast<double>(max_bits - bm);
  }

  for (const auto& len : key_lengths) out.transcript_leakage += transcript_leakage(len);

  const bool joint_fits = total * 2 <= kJointAuditBits &&
                          map.key_alphabet * wm_size <= (kPmfBudget >> total);
  if (joint_fits) {
    // Full joint of (K, W_m, F_1..F_M) with F_i = W_i xor U_i.
    std::vector<std::size_t> sizes = {map.key_alphabet, wm_size};
    for (auto b : message_bits) sizes.push_back(std::size_t{1} << b);
    std::size_t table = 1;
    for (auto s : sizes) table *= s;
    std::vector<double> counts(table, 0.0);
    for (std::uint64_t packed = 0; packed < space; ++packed) {
      const std::uint64_t key = map.key_of(packed);
      const std::uint64_t wm = (packed >> shifts[relay]) & low_mask(bm);
      const std::uint64_t head = key * wm_size + wm;
      for (std::uint64_t u = 0; u < space; ++u) {
        // u packs the overlapping prefixes U_i with the same layout as W^M,
        // so the whole payload vector is packed ^ u.
        counts[(head << total) | (packed ^ u)] += 1.0;
      }
    }
    const JointPmf pmf = JointPmf::from_counts(std::move(sizes), counts);
    std::vector<std::size_t> observed = {1};
    std::vector<std::size_t> payloads;
    for (std::size_t i = 0; i < m; ++i) {
      observed.push_back(2 + i);
      payloads.push_back(2 + i);
    }
    const std::size_t key_var[] = {0};
    const std::size_t message_var[] = {1};
    out.leakage = exact_mi(pmf, key_var, observed);
    out.transcript_term = exact_conditional_mi(pmf, key_var, payloads, message_var);
    out.joint_exact = true;
  } else {
    // I(K; F | W_m) <= I(W^M; F | W_m) <= I(W^M; F).
    out.transcript_term = out.transcript_leakage;
    out.leakage = out.leakage_message + out.transcript_term;
    out.joint_exact = out.transcript_leakage == 0.0;
  }
  return out;
}

namespace {

std::vector<PairKeyLengths> equal_lengths(const std::vector<unsigned>& bits) {
  std::vector<PairKeyLengths> out;
  out.reserve(bits.size());
  for (auto b : bits) out.push_back({b, b});
  return out;
}

}  // namespace

LeakageAudit leakage_audit(const RbCodebook& codebook, std::size_t relay) {
  const auto lengths = equal_lengths(codebook.message_bits());
  return leakage_audit(codebook, relay, lengths);
}

LeakageAudit leakage_audit(const RbCodebook& codebook, std::size_t relay,
                           std::span<const PairKeyLengths> key_lengths) {
  const KeyMap map{codebook.num_bins(),
                   [&codebook](std::uint64_t packed) { return codebook.index_of(packed).k - 1; }};
  LeakageAudit out = audit_key_map(codebook.message_bits(), map, relay, key_lengths);
  out.codebook_seed = codebook.seed();
  return out;
}

double key_entropy(const RbCodebook& codebook) {
  std::vector<double> counts(codebook.num_bins(), 0.0);
  for (std::uint64_t packed = 0; packed < codebook.space_size(); ++packed) {
    counts[codebook.index_of(packed).k - 1] += 1.0;
  }
  const JointPmf pmf = JointPmf::from_counts({counts.size()}, counts);
  return exact_entropy(pmf, {0});
}

LeakageAudit xor_leakage_audit(const std::vector<unsigned>& message_bits, std::size_t relay) {
  const auto shifts = message_shifts(message_bits);
  unsigned key_width = 0;
  for (std::size_t j = 0; j + 1 < message_bits.size(); j += 2) {
    key_width += std::min(message_bits[j], message_bits[j + 1]);
  }
  if (key_width > kCodebookBudgetBits) throw BudgetExceeded("XOR key exceeds the enumeration budget");
  const KeyMap map{std::uint64_t{1} << key_width, [&](std::uint64_t packed) {
                     std::uint64_t key = 0;
                     for (std::size_t j = 0; j + 1 < message_bits.size(); j += 2) {
                       const unsigned bj = message_bits[j];
                       const unsigned bk = message_bits[j + 1];
                       const unsigned width = std::min(bj, bk);
                       const std::uint64_t wj = (packed >> shifts[j]) & low_mask(bj);
                       const std::uint64_t wk = (packed >> shifts[j + 1]) & low_mask(bk);
                       key = (key << width) | ((wj >> (bj - width)) ^ (wk >> (bk - width)));
                     }
                     return key;
                   }};
  const auto lengths = equal_lengths(message_bits);
  return audit_key_map(message_bits, map, relay, lengths);
}

namespace {

double plugin_mi(std::span<const double> joint, std::size_t nx, std::size_t ny, double n, bool miller_madow) {
  std::vector<double> px(nx, 0.0);
  std::vector<double> py(ny, 0.0);
  double hxy = 0.0;
  std::size_t kxy = 0;
  for (std::size_t a = 0; a < nx; ++a) {
    for (std::size_t b = 0; b < ny; ++b) {
      const double c = joint[a * ny + b];
      if (c <= 0.0) continue;
      px[a] += c;
      py[b] += c;
      const double p = c / n;
      hxy -= p * std::log2(p);
      ++kxy;
    }
  }
  auto h_and_support = [n](const std::vector<double>& counts) {
    double h = 0.0;
    std::size_t k = 0;
    for (double c : counts) {
      if (c <= 0.0) continue;
      const double p = c / n;
      h -= p * std::log2(p);
      ++k;
    }
    return std::pair{h, k};
  };
  const auto [hx, kx] = h_and_support(px);
  const auto [hy, ky] = h_and_support(py);
  double mi = hx + hy - hxy;
  if (miller_madow) {
    const double kx_d = static_cast<double>(kx);
    const double ky_d = static_cast<double>(ky);
    const double kxy_d = static_cast<double>(kxy);
    mi += ((kx_d - 1.0) + (ky_d - 1.0) - (kxy_d - 1.0)) / (2.0 * n * std::log(2.0));
  }
  return mi;
}

}  // namespace

EmpiricalMi empirical_mi(std::span<const std::uint32_t> x, std::span<const std::uint32_t> y,
                         const EmpiricalMiConfig& config) {
  if (x.size() != y.size()) throw std::invalid_argument("empirical_mi: sequences differ in length");
  if (x.size() < 1000) throw ConfigError("empirical_mi needs at least 1000 samples");
  const std::size_t nx = *std::max_element(x.begin(), x.end()) + std::size_t{1};
  const std::size_t ny = *std::max_element(y.begin(), y.end()) + std::size_t{1};
  if (nx > kPmfBudget / ny) throw BudgetExceeded("empirical joint alphabet exceeds the budget");
  const double n = static_cast<double>(x.size());

  std::vector<double> joint(nx * ny, 0.0);
  for (std::size_t t = 0; t < x.size(); ++t) joint[x[t] * ny + y[t]] += 1.0;

  EmpiricalMi out;
  out.samples = x.size();
  out.unreliable = static_cast<double>(nx * ny) / n > 0.1;
  out.estimate = plugin_mi(joint, nx, ny, n, config.miller_madow);

  if (config.bootstrap == 0) {
    out.ci_low = out.ci_high = out.estimate;
    return out;
  }
  CounterRng rng(config.seed, 0xb0075712ULL);
  std::vector<double> estimates;
  estimates.reserve(config.bootstrap);
  std::vector<double> resampled(joint.size());
  for (std::size_t r = 0; r < config.bootstrap; ++r) {
    std::fill(resampled.begin(), resampled.end(), 0.0);
    for (std::size_t t = 0; t < x.size(); ++t) {
      const auto j = static_cast<std::size_t>(rng.below(x.size()));
      resampled[x[j] * ny + y[j]] += 1.0;
    }
    estimates.push_back(plugin_mi(resampled, nx, ny, n, config.miller_madow));
  }
  std::sort(estimates.begin(), estimates.end());
  const double tail = (1.0 - config.confidence) / 2.0;
  const auto at = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(estimates.size() - 1)));
    return estimates[std::min(idx, estimates.size() - 1)];
  };
  out.ci_low = at(tail);
  out.ci_high = at(1.0 - tail);
  return out;
}

}  // namespace pinkey
