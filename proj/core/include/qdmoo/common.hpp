#ifndef QDMOO_COMMON_HPP
#define QDMOO_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qdmoo {

/// Invalid configuration (bad key, bad value, inconsistent sizes). CLI maps
/// this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Runtime evaluation failure (non-finite input, domain violation,
/// non-finite gradient). CLI maps this to exit code 1.
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// splitmix64 step; used to derive independent seed streams from one base
/// seed so that adding a consumer never shifts another consumer's stream.
inline std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream)
{
    std::uint64_t s = base ^ (0x2545f4914f6cdd1dULL * (stream + 1));
    return splitmix64(s);
}

/// Serialize a double with 17 significant digits (lossless round-trip).
std::string fmt_g17(double v);

/// FNV-1a 64-bit over a byte string.
std::uint64_t fnv1a64(const std::string& bytes);

} // namespace qdmoo

#endif
