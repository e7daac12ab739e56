#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace adagmrf {

// Random stream owned by exactly one chain / worker. All samplers in the
// library take one of these by reference and are deterministic functions of
// its state.
class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream for worker `index` derived from a master seed.
  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    return Rng(mix(seed ^ mix(index + 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return normal_(engine_); }

  // Gamma with the given shape and rate (mean shape / rate).
  double gamma(double shape, double rate) {
    std::gamma_distribution<double> g(shape, 1.0 / rate);
    return g(engine_);
  }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    std::uniform_int_distribution<std::uint64_t> d(0, n - 1);
    return d(engine_);
  }

  engine_type& engine() { return engine_; }

  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  engine_type engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace adagmrf
