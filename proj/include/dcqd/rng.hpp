#pragma once

#include <cstdint>
#include <vector>

namespace dcqd {

// Counter-based generator built on the splitmix64 finalizer. Outputs depend
// only on (key, counter), so streams keyed per (seed, config id, time index)
// are reproducible independent of evaluation order, platform, or thread count.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ 0x51afd7ed558ccd25ULL) ^ splitmix64(b);
}

inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix_key(mix_key(a, b), c);
}

inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                             std::uint64_t d) {
  return mix_key(mix_key(a, b, c), d);
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Multinomial draw by per-shot inverse-CDF walk. Probabilities need not be
// exactly normalized; the walk uses the running total as its scale.
inline std::vector<std::int64_t> multinomial_sample(const std::vector<double>& probs,
                                                    std::int64_t n_shots,
                                                    CounterRng& rng) {
  const std::size_t k = probs.size();
  std::vector<double> cdf(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    total += probs[i] > 0.0 ? probs[i] : 0.0;
    cdf[i] = total;
  }
  std::vector<std::int64_t> counts(k, 0);
  for (std::int64_t s = 0; s < n_shots; ++s) {
    const double u = rng.uniform() * total;
    std::size_t lo = 0;
    while (lo + 1 < k && cdf[lo] <= u) ++lo;
    ++counts[lo];
  }
  return counts;
}

}  // namespace dcqd
