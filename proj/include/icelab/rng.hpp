#pragma once

#include <cstdint>
#include <random>

namespace icelab {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of the generator used for stage `stage` of a schedule drawn with
/// `seed`. Stages draw from separate streams so they can be built in any
/// order (or concurrently) with identical results.
std::uint64_t stage_seed(std::uint64_t seed, std::uint64_t stage) noexcept;

using Engine = std::mt19937_64;

Engine stage_engine(std::uint64_t seed, std::uint64_t stage);

/// Uniform integer in [0, bound) by rejection. Unlike
/// std::uniform_int_distribution the output sequence is fixed by the engine
/// sequence alone, so it is identical across standard library vendors.
std::uint64_t uniform_below(Engine& engine, std::uint64_t bound);

}  // namespace icelab
