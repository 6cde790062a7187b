#include "icelab/rng.hpp"

#include "icelab/error.hpp"

namespace icelab {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Range: return "range error";
        case ErrorKind::Config: return "configuration error";
        case ErrorKind::Precondition: return "precondition error";
        case ErrorKind::Parameter: return "parameter error";
        case ErrorKind::Mode: return "mode error";
        case ErrorKind::ClassViolation: return "class violation";
        case ErrorKind::Resource: return "resource error";
    }
    return "error";
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stage_seed(std::uint64_t seed, std::uint64_t stage) noexcept {
    return splitmix64(splitmix64(seed) ^ splitmix64(stage + 0x5851f42d4c957f2dULL));
}

Engine stage_engine(std::uint64_t seed, std::uint64_t stage) {
    return Engine(stage_seed(seed, stage));
}

std::uint64_t uniform_below(Engine& engine, std::uint64_t bound) {
    if (bound == 0) fail(ErrorKind::Range, "uniform_below: empty range");
    // Largest multiple of bound representable; draws above it are rejected.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
    std::uint64_t x = engine();
    while (x > limit) x = engine();
    return x % bound;
}

}  // namespace icelab
