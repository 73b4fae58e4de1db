#ifndef HDMANOVA_RNG_HPP
#define HDMANOVA_RNG_HPP

#include <cstdint>
#include <random>

namespace hdmanova {

// splitmix64 step; used to derive independent sub-seeds from (seed, index)
// so that work can be sharded across threads without changing the results.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(splitmix64(base) ^ splitmix64(index + 0x12d1f5e9a3c2b871ULL));
}

// An extra stream tag keeps e.g. H0 and H1 replication streams independent
// even when they share a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
    return derive_seed(derive_seed(base, stream), index);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

}  // namespace hdmanova

#endif
