#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace hivmob {

/// splitmix64 finaliser.
std::uint64_t mix64(std::uint64_t x);

/// Derives an independent stream seed from a root seed and an entity key
/// (e.g. {purpose tag, user index}). Same inputs, same seed, on every run.
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> key);

using Engine = std::mt19937_64;

Engine make_stream(std::uint64_t root, std::initializer_list<std::uint64_t> key);

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(Engine& e);

/// Uniform integer in [0, n); n > 0. Unbiased (rejection).
std::uint64_t uniform_index(Engine& e, std::uint64_t n);

/// Portable samplers: the standard library's distributions are implementation-defined,
/// which would tie generated datasets to one toolchain.
double standard_normal(Engine& e);  // Box-Muller, one value per call
std::int64_t poisson(Engine& e, double mean);  // inversion below 12, PTRS above
std::uint64_t binomial(Engine& e, std::uint64_t n, double p);  // sum of Bernoulli draws
/// Index drawn with probability proportional to weights (non-negative, positive sum).
std::size_t weighted_index(Engine& e, std::span<const double> weights);

/// Stream purpose tags; keep values stable, they are part of the output contract.
namespace stream_tag {
inline constexpr std::uint64_t world = 1;
inline constexpr std::uint64_t plan = 2;
inline constexpr std::uint64_t cdr_link = 3;
inline constexpr std::uint64_t user = 4;
inline constexpr std::uint64_t truth = 5;
inline constexpr std::uint64_t survey = 6;
inline constexpr std::uint64_t permutation = 7;
inline constexpr std::uint64_t contribution = 8;
}  // namespace stream_tag

}  // namespace hivmob
