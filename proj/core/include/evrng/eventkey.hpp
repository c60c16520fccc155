#pragma once

// Stable event identifiers and the (seed, event) -> uniform mapping.
//
// Key derivation recipe (normative; any reimplementation must match it bit
// for bit):
//
//   1. msg = serialize_event(e)
//   2. append zero bytes until (len + 8) % 16 == 0, then len(msg) as an
//      8-byte big-endian integer
//   3. split into 16-byte blocks; block word w = big-endian uint32 at 4w
//   4. S = philox_block(seed, kChainInit)
//      for each block B: S = philox_block(Key128{0, S[1]:S[0]}, B ^ S)
//   5. key     = Key128{hi = S[3]:S[2], lo = S[1]:S[0]}
//      counter = philox_block(Key128{0, key.lo}, S ^ kFinalize)
//
// event_uniform(seed, e) = block_uniform(philox_block(key, counter)).

#include "evrng/cbrng.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace evrng {

inline constexpr Counter128 kChainInit{{0x6A09E667, 0xBB67AE85, 0x3C6EF372, 0xA54FF53A}};
inline constexpr Counter128 kFinalize{{0x510E527F, 0x9B05688C, 0x1F83D9AB, 0x5BE0CD19}};

inline constexpr std::size_t kMaxLabelBytes = 64;
inline constexpr std::size_t kMaxComponents = 16;

/// Selects one exogenous world.
struct WorldSeed {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    [[nodiscard]] Key128 key() const noexcept { return {hi, lo}; }

    /// Exactly 32 hex characters, most significant first. Throws on anything else.
    static WorldSeed from_hex(std::string_view hex);
    [[nodiscard]] std::string to_hex() const;

    friend constexpr bool operator==(const WorldSeed&, const WorldSeed&) = default;
    friend constexpr auto operator<=>(const WorldSeed&, const WorldSeed&) = default;
};

inline constexpr WorldSeed kIdDerivationSeed{0x243F6A8885A308D3, 0x13198A2E03707344};
inline constexpr WorldSeed kDigestSeed{0xA4093822299F31D0, 0x082EFA98EC4E6C89};

struct EventId {
    std::string label;
    std::vector<std::uint64_t> components;
    std::uint64_t draw_index = 0;

    /// Human-readable canonical form, e.g. "infection(2)" or "infection(2)#1".
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const EventId&, const EventId&) = default;
};

std::ostream& operator<<(std::ostream& os, const EventId& e);

/// 2-byte BE label length | label | 1-byte count | 8-byte BE components | 8-byte BE draw index.
/// Throws std::invalid_argument past kMaxLabelBytes or kMaxComponents.
std::vector<std::uint8_t> serialize_event(const EventId& e);

/// Steps 2-4 of the recipe over arbitrary bytes.
Block compress(const WorldSeed& seed, std::span<const std::uint8_t> bytes) noexcept;

struct EventKey {
    Key128 key;
    Counter128 counter;

    friend bool operator==(const EventKey&, const EventKey&) = default;
};

EventKey event_key(const WorldSeed& seed, const EventId& e);

class DuplicateEventError : public std::logic_error {
public:
    explicit DuplicateEventError(const EventId& e);

    [[nodiscard]] const EventId& event() const noexcept { return event_; }

private:
    EventId event_;
};

/// Records every EventId queried during one scenario run. In strict mode a
/// second query of the same event throws DuplicateEventError.
class EventLedger {
public:
    explicit EventLedger(bool strict = false)
        : strict_(strict)
    {
    }

    void record(const EventId& e);

    [[nodiscard]] bool strict() const noexcept { return strict_; }
    [[nodiscard]] bool contains(const EventId& e) const;
    [[nodiscard]] std::uint64_t count(const EventId& e) const;
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

    /// Lines `label,components,draw_index,count`, components joined with ';',
    /// ordered by serialized bytes.
    void dump(std::ostream& os) const;

private:
    struct Entry {
        EventId event;
        std::uint64_t count = 0;
    };

    bool strict_;
    std::map<std::vector<std::uint8_t>, Entry> entries_;
};

UnitUniform event_uniform(const WorldSeed& seed, const EventId& e, EventLedger* ledger = nullptr);

/// World seed for the index-th member of a named family derived from `stream`.
WorldSeed derive_seed(const WorldSeed& stream, std::string_view label, std::uint64_t index);

/// 128-bit content digest of arbitrary bytes, as 32 hex characters.
std::string digest_hex(std::string_view bytes);

struct AgentId {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    [[nodiscard]] std::string to_hex() const;

    friend constexpr bool operator==(const AgentId&, const AgentId&) = default;
    friend constexpr auto operator<=>(const AgentId&, const AgentId&) = default;
};

AgentId founder_id(std::uint64_t index, std::string_view cohort_label = "founder");

/// k-th offspring of `parent`. Depends on (parent, k) only.
AgentId child_id(const AgentId& parent, std::uint64_t k);

} // namespace evrng
