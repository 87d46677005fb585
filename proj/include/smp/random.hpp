#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace smp {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b);

// Child seed for a named component. Streams for different labels are
// unrelated, so adding a new consumer never shifts an existing one.
std::uint64_t derive_seed(std::uint64_t base, std::string_view label);

// Counter-based draws: a pure function of (key, counter).
double counter_uniform(std::uint64_t key, std::uint64_t counter);  // in (0, 1]
double counter_normal(std::uint64_t key, std::uint64_t counter);   // N(0, 1)

}  // namespace smp
