#ifndef CESR_RNG_HPP
#define CESR_RNG_HPP

#include <cstdint>
#include <random>

namespace cesr {

constexpr std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Mixes a salt into a base seed. Used for per-run and per-stream seeds.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt)
{
  return splitmix64(base ^ splitmix64(salt + 0x632be59bd9b4e019ULL));
}

/// Seeded random stream. Counts engine draws so callers can pin
/// consumption contracts in tests.
class Rng
{
public:
  explicit Rng(std::uint64_t seed)
    : engine_{seed}
  {}

  /// Uniform in [0, 1), exactly one engine draw.
  double uniform()
  {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal draw (engine consumption varies per call).
  double gaussian() { return normal_(engine_); }

  std::uint64_t draws() const { return engine_.count; }

private:
  struct CountingEngine
  {
    using result_type = std::mt19937_64::result_type;
    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()()
    {
      ++count;
      return inner();
    }

    explicit CountingEngine(std::uint64_t seed)
      : inner(seed)
    {}

    std::mt19937_64 inner;
    std::uint64_t count = 0;
  };

  CountingEngine engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace cesr

#endif // CESR_RNG_HPP
