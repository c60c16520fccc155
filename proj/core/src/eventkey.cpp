#include "evrng/eventkey.hpp"

#include <array>
#include <cstdio>
#include <sstream>

namespace evrng {

namespace {

void put_be(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes)
{
    for (int i = bytes - 1; i >= 0; --i)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_be32(const std::uint8_t* p) noexcept
{
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

std::uint64_t join(std::uint32_t lo, std::uint32_t hi) noexcept
{
    return (std::uint64_t{hi} << 32) | lo;
}

std::string hex128(std::uint64_t hi, std::uint64_t lo)
{
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(hi),
                  static_cast<unsigned long long>(lo));
    return buf;
}

int hex_digit(char c)
{
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}

} // namespace

WorldSeed WorldSeed::from_hex(std::string_view hex)
{
    if (hex.size() != 32)
        throw std::invalid_argument("seed must be exactly 32 hex characters, got " + std::to_string(hex.size()));
    WorldSeed s;
    for (std::size_t i = 0; i < 32; ++i) {
        const int d = hex_digit(hex[i]);
        if (d < 0)
            throw std::invalid_argument("seed contains a non-hex character: '" + std::string(hex) + "'");
        auto& word = i < 16 ? s.hi : s.lo;
        word = (word << 4) | static_cast<std::uint64_t>(d);
    }
    return s;
}

std::string WorldSeed::to_hex() const
{
    return hex128(hi, lo);
}

std::string AgentId::to_hex() const
{
    return hex128(hi, lo);
}

std::string EventId::to_string() const
{
    std::string s = label;
    s += '(';
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (i)
            s += ',';
        s += std::to_string(components[i]);
    }
    s += ')';
    if (draw_index != 0) {
        s += '#';
        s += std::to_string(draw_index);
    }
    return s;
}

std::ostream& operator<<(std::ostream& os, const EventId& e)
{
    return os << e.to_string();
}

std::vector<std::uint8_t> serialize_event(const EventId& e)
{
    if (e.label.size() > kMaxLabelBytes)
        throw std::invalid_argument("event label longer than 64 bytes: " + e.label);
    if (e.components.size() > kMaxComponents)
        throw std::invalid_argument("event '" + e.label + "' has more than 16 components");

    std::vector<std::uint8_t> out;
    out.reserve(2 + e.label.size() + 1 + 8 * e.components.size() + 8);
    put_be(out, e.label.size(), 2);
    out.insert(out.end(), e.label.begin(), e.label.end());
    out.push_back(static_cast<std::uint8_t>(e.components.size()));
    for (auto c : e.components)
        put_be(out, c, 8);
    put_be(out, e.draw_index, 8);
    return out;
}

Block compress(const WorldSeed& seed, std::span<const std::uint8_t> bytes) noexcept
{
    const std::size_t n = bytes.size();
    const std::size_t padded = n + ((16 - (n + 8) % 16) % 16) + 8;

    Block s = philox_block(seed.key(), kChainInit);
    std::array<std::uint8_t, 16> chunk{};
    for (std::size_t off = 0; off < padded; off += 16) {
        for (std::size_t i = 0; i < 16; ++i) {
            const std::size_t pos = off + i;
            if (pos < n)
                chunk[i] = bytes[pos];
            else if (pos + 8 >= padded)
                chunk[i] = static_cast<std::uint8_t>(static_cast<std::uint64_t>(n) >> (8 * (padded - 1 - pos)));
            else
                chunk[i] = 0;
        }
        Counter128 c;
        for (int w = 0; w < 4; ++w)
            c.words[w] = get_be32(chunk.data() + 4 * w) ^ s[w];
        s = philox_block(Key128{0, join(s[0], s[1])}, c);
    }
    return s;
}

EventKey event_key(const WorldSeed& seed, const EventId& e)
{
    const auto bytes = serialize_event(e);
    const Block s = compress(seed, bytes);
    EventKey k;
    k.key = Key128{join(s[2], s[3]), join(s[0], s[1])};
    Counter128 fin;
    for (int w = 0; w < 4; ++w)
        fin.words[w] = s[w] ^ kFinalize.words[w];
    k.counter.words = philox_block(Key128{0, k.key.lo}, fin);
    return k;
}

DuplicateEventError::DuplicateEventError(const EventId& e)
    : std::logic_error("event queried twice in one scenario run: " + e.to_string())
    , event_(e)
{
}

void EventLedger::record(const EventId& e)
{
    auto [it, inserted] = entries_.try_emplace(serialize_event(e), Entry{e, 0});
    if (!inserted && strict_)
        throw DuplicateEventError(e);
    ++it->second.count;
}

bool EventLedger::contains(const EventId& e) const
{
    return entries_.count(serialize_event(e)) != 0;
}

std::uint64_t EventLedger::count(const EventId& e) const
{
    auto it = entries_.find(serialize_event(e));
    return it == entries_.end() ? 0 : it->second.count;
}

void EventLedger::dump(std::ostream& os) const
{
    for (const auto& [bytes, entry] : entries_) {
        os << entry.event.label << ',';
        for (std::size_t i = 0; i < entry.event.components.size(); ++i) {
            if (i)
                os << ';';
            os << entry.event.components[i];
        }
        os << ',' << entry.event.draw_index << ',' << entry.count << '\n';
    }
}

UnitUniform event_uniform(const WorldSeed& seed, const EventId& e, EventLedger* ledger)
{
    if (ledger)
        ledger->record(e);
    const auto k = event_key(seed, e);
    return block_uniform(philox_block(k.key, k.counter));
}

WorldSeed derive_seed(const WorldSeed& stream, std::string_view label, std::uint64_t index)
{
    const auto k = event_key(stream, EventId{std::string(label), {index}, 0});
    return WorldSeed{k.key.hi, k.key.lo};
}

std::string digest_hex(std::string_view bytes)
{
    const Block s = compress(kDigestSeed, {reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()});
    return hex128(join(s[2], s[3]), join(s[0], s[1]));
}

AgentId founder_id(std::uint64_t index, std::string_view cohort_label)
{
    const auto k = event_key(kIdDerivationSeed, EventId{std::string(cohort_label), {index}, 0});
    return {k.key.hi, k.key.lo};
}

AgentId child_id(const AgentId& parent, std::uint64_t k)
{
    // TODO: birth timing could enter the components here for models that key
    // offspring by (parent, time) instead of birth order.
    const auto key = event_key(kIdDerivationSeed, EventId{"offspring", {parent.hi, parent.lo, k}, 0});
    return {key.key.hi, key.key.lo};
}

} // namespace evrng
