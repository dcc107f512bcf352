#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace baycausal {

// One step of the splitmix64 generator; used to expand seeds and to derive
// independent substreams from a (seed, path...) tuple.
constexpr std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic seed for the substream addressed by `path`, e.g.
// {replicate, chain} or {sweep, observation}. Different paths give
// statistically independent streams; the same path always gives the same one.
std::uint64_t derive_seed(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> path);

// xoshiro256** engine. Cheap to construct, so per-observation substreams can
// be created inside parallel loops without measurable cost.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0x5eed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();

  // Child stream; does not advance this generator.
  Rng substream(std::initializer_list<std::uint64_t> path) const;

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_{};
  std::normal_distribution<double> normal_;  // keeps the spare variate
};

}  // namespace baycausal
