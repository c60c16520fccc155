#include "evrng/cbrng.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace evrng {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline Block philox_round(const Block& c, const PhiloxKey& k) noexcept
{
    const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
}

} // namespace

Block philox4x32_10(const Counter128& counter, const PhiloxKey& key) noexcept
{
    Block x = counter.words;
    PhiloxKey k = key;
    x = philox_round(x, k);
    for (int r = 1; r < 10; ++r) {
        k[0] += kWeyl0;
        k[1] += kWeyl1;
        x = philox_round(x, k);
    }
    return x;
}

Block philox_block(const Key128& key, const Counter128& counter) noexcept
{
    Counter128 c = counter;
    c.words[2] ^= static_cast<std::uint32_t>(key.hi);
    c.words[3] ^= static_cast<std::uint32_t>(key.hi >> 32);
    return philox4x32_10(c, {static_cast<std::uint32_t>(key.lo), static_cast<std::uint32_t>(key.lo >> 32)});
}

UnitUniform::UnitUniform(double value)
    : value_(value)
{
    if (!(value >= 0.0 && value < 1.0)) {
        throw std::out_of_range("UnitUniform outside [0, 1): " + std::to_string(value));
    }
}

UnitUniform to_unit_uniform(std::uint64_t w) noexcept
{
    // Keep at most 53 significant bits so the integer -> double conversion is
    // exact; scaling by 2^-64 is then exact as well.
    const int width = std::bit_width(w);
    if (width > 53) {
        const int drop = width - 53;
        w = (w >> drop) << drop;
    }
    return UnitUniform(std::ldexp(static_cast<double>(w), -64));
}

UnitUniform to_unit_uniform(std::uint32_t hi, std::uint32_t lo) noexcept
{
    return to_unit_uniform((std::uint64_t{hi} << 32) | lo);
}

UnitUniform block_uniform(const Block& block) noexcept
{
    return to_unit_uniform(block[3], block[2]);
}

void validate(const Distribution& dist)
{
    struct Check {
        void operator()(const Bernoulli& d) const
        {
            if (!(d.p >= 0.0 && d.p <= 1.0))
                throw std::invalid_argument("Bernoulli p must lie in [0, 1]");
        }
        void operator()(const Exponential& d) const
        {
            if (!(d.rate > 0.0) || !std::isfinite(d.rate))
                throw std::invalid_argument("Exponential rate must be positive and finite");
        }
        void operator()(const DiscreteUniform& d) const
        {
            if (d.n < 1)
                throw std::invalid_argument("DiscreteUniform n must be at least 1");
        }
        void operator()(const Geometric& d) const
        {
            if (!(d.p > 0.0 && d.p <= 1.0))
                throw std::invalid_argument("Geometric p must lie in (0, 1]");
        }
    };
    std::visit(Check{}, dist);
}

double sample_fixed(const Distribution& dist, UnitUniform u)
{
    validate(dist);
    const double x = u.value();
    struct Transform {
        double x;
        double operator()(const Bernoulli& d) const { return x < d.p ? 1.0 : 0.0; }
        double operator()(const Exponential& d) const { return -std::log1p(-x) / d.rate; }
        double operator()(const DiscreteUniform& d) const
        {
            const auto k = static_cast<std::uint64_t>(std::floor(x * static_cast<double>(d.n)));
            return static_cast<double>(k < d.n ? k : d.n - 1);
        }
        double operator()(const Geometric& d) const
        {
            if (d.p == 1.0)
                return 0.0;
            return std::floor(std::log1p(-x) / std::log1p(-d.p));
        }
    };
    return std::visit(Transform{x}, dist);
}

} // namespace evrng
