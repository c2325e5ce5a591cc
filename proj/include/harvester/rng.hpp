#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace harvester {

/// Seeded normal-variate stream. Named sub-streams are derived from one
/// scenario seed so that independent consumers never share draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t seed, std::string_view name) { return Rng(derive_seed(seed, name)); }

  double normal(double sigma = 1.0) {
    if (sigma == 0.0) return 0.0;
    return sigma * std_normal_(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

  static std::uint64_t derive_seed(std::uint64_t seed, std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
    for (char c : name) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ull;
    }
    return splitmix64(seed ^ h);
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
  std::normal_distribution<double> std_normal_{0.0, 1.0};
};

}  // namespace harvester
