#include "zenolab/random.hpp"

namespace zenolab {

namespace {
constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

CounterRng::CounterRng(std::uint64_t seed, std::string_view stream)
    : key_(splitmix64(splitmix64(seed) ^ fnv1a64(stream))) {}

CounterRng::result_type CounterRng::operator()() {
  const std::uint64_t n = counter_++;
  return splitmix64(key_ + (n + 1) * kGoldenGamma);
}

double CounterRng::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

CounterRng CounterRng::substream(std::uint64_t index) const {
  return CounterRng(splitmix64(key_ ^ splitmix64(index + kGoldenGamma)));
}

CounterRng CounterRng::substream(std::string_view name) const {
  return CounterRng(splitmix64(key_ ^ fnv1a64(name)));
}

}  // namespace zenolab
