#include "ipdrl/random.hpp"

namespace ipdrl {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::mt19937_64 seeded_engine(std::uint64_t key) {
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(mix64(key)),
                    static_cast<std::uint32_t>(mix64(key) >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t key) : engine_(seeded_engine(key)) {}

std::uint64_t Rng::below(std::uint64_t n) {
  // Reject the top partial block so the modulo is unbiased.
  const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

Rng seed_stream(std::uint64_t master, std::initializer_list<std::uint64_t> indices) {
  std::uint64_t key = mix64(master);
  std::uint64_t j = 0;
  for (std::uint64_t idx : indices) {
    key = mix64(key ^ mix64(idx + (++j)));
  }
  return Rng(key);
}

}  // namespace ipdrl
