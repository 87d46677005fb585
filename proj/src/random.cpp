#include "smp/random.hpp"

#include <cmath>
#include <numbers>

namespace smp {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ (mix64(b) + 0x632be59bd9b4e019ULL + (a << 6) + (a >> 2)));
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
  // FNV-1a over the label.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return hash_combine(mix64(base), h);
}

double counter_uniform(std::uint64_t key, std::uint64_t counter) {
  const std::uint64_t bits = hash_combine(key, counter);
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

double counter_normal(std::uint64_t key, std::uint64_t counter) {
  // Box-Muller on two independent counter draws.
  const double u1 = counter_uniform(key, 2 * counter);
  const double u2 = counter_uniform(key, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace smp
