#pragma once

// Counter-based generation: Philox4x32-10, the 64-bit -> [0,1) conversion and
// inverse-CDF samplers that consume exactly one uniform per call.

#include <array>
#include <compare>
#include <cstdint>
#include <string_view>
#include <variant>

namespace evrng {

inline constexpr std::string_view kGeneratorId = "philox4x32-10";

/// 128-bit generator key. `lo` keys Philox (two 32-bit words, low word first);
/// `hi` is XORed into counter words 2 and 3. With hi == 0 philox_block is
/// exactly the published Philox4x32-10.
struct Key128 {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    friend constexpr bool operator==(const Key128&, const Key128&) = default;
    friend constexpr auto operator<=>(const Key128&, const Key128&) = default;
};

/// Four 32-bit words, word 0 least significant.
struct Counter128 {
    std::array<std::uint32_t, 4> words{};

    friend constexpr bool operator==(const Counter128&, const Counter128&) = default;
};

using Block = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// The raw published primitive: 10 rounds, 64-bit key.
Block philox4x32_10(const Counter128& counter, const PhiloxKey& key) noexcept;

Block philox_block(const Key128& key, const Counter128& counter) noexcept;

/// A real in [0, 1). Construction outside the range throws.
class UnitUniform {
public:
    explicit UnitUniform(double value);

    [[nodiscard]] double value() const noexcept { return value_; }

    friend bool operator==(const UnitUniform&, const UnitUniform&) = default;

private:
    double value_;
};

/// w * 2^-64 for w = (hi << 32) | lo, rounded toward zero to binary64, so the
/// result is always strictly below 1.
UnitUniform to_unit_uniform(std::uint32_t hi, std::uint32_t lo) noexcept;
UnitUniform to_unit_uniform(std::uint64_t w) noexcept;

/// Uses the high 64 bits (words 3, 2) of a generator block.
UnitUniform block_uniform(const Block& block) noexcept;

struct Bernoulli {
    double p;
};
struct Exponential {
    double rate;
};
/// Values 0 .. n-1.
struct DiscreteUniform {
    std::uint64_t n;
};
/// Failures before the first success, success probability p in (0, 1].
struct Geometric {
    double p;
};

using Distribution = std::variant<Bernoulli, Exponential, DiscreteUniform, Geometric>;

/// Throws std::invalid_argument when parameters are outside their domain.
void validate(const Distribution& dist);

/// Inverse-CDF transform of a single uniform. Bernoulli returns [u < p].
double sample_fixed(const Distribution& dist, UnitUniform u);

} // namespace evrng
