#include "evrng/cbrng.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace evrng;

namespace {

struct Kat {
    Counter128 ctr;
    PhiloxKey key;
    Block out;
};

std::vector<Kat> load_kats()
{
    std::ifstream in(std::string(EVRNG_TEST_DATA_DIR) + "/fixtures/philox4x32_10_kat.txt");
    std::vector<Kat> kats;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ss(line);
        Kat k;
        ss >> std::hex;
        for (auto& w : k.ctr.words)
            ss >> w;
        ss >> k.key[0] >> k.key[1];
        for (auto& w : k.out)
            ss >> w;
        kats.push_back(k);
    }
    return kats;
}

} // namespace

TEST(Philox, KnownAnswerVectors)
{
    const auto kats = load_kats();
    ASSERT_EQ(kats.size(), 3u);
    for (const auto& k : kats) {
        EXPECT_EQ(philox4x32_10(k.ctr, k.key), k.out);
        const Key128 key{0, (std::uint64_t{k.key[1]} << 32) | k.key[0]};
        EXPECT_EQ(philox_block(key, k.ctr), k.out);
    }
}

TEST(Philox, HighKeyWordActsAsCounterTweak)
{
    const Counter128 c{{1, 2, 3, 4}};
    const Key128 k{0x0123456789abcdefULL, 0xfedcba9876543210ULL};
    const Counter128 tweaked{{1, 2, 3 ^ 0x89abcdefu, 4 ^ 0x01234567u}};
    EXPECT_EQ(philox_block(k, c), philox_block(Key128{0, k.lo}, tweaked));
    EXPECT_NE(philox_block(k, c), philox_block(Key128{0, k.lo}, c));
}

TEST(Philox, Purity)
{
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        const Key128 k{rng(), rng()};
        const Counter128 c{{static_cast<std::uint32_t>(rng()), static_cast<std::uint32_t>(rng()),
                            static_cast<std::uint32_t>(rng()), static_cast<std::uint32_t>(rng())}};
        EXPECT_EQ(philox_block(k, c), philox_block(k, c));
    }
}

TEST(Philox, AvalancheOnSingleBitFlips)
{
    std::mt19937_64 rng(11);
    const int n = 20000;
    double flipped = 0.0;
    for (int i = 0; i < n; ++i) {
        const Key128 k{rng(), rng()};
        Counter128 c{{static_cast<std::uint32_t>(rng()), static_cast<std::uint32_t>(rng()),
                      static_cast<std::uint32_t>(rng()), static_cast<std::uint32_t>(rng())}};
        const Block a = philox_block(k, c);
        const int bit = static_cast<int>(rng() % 256);
        Block b;
        if (bit < 128) {
            c.words[bit / 32] ^= 1u << (bit % 32);
            b = philox_block(k, c);
        }
        else {
            Key128 k2 = k;
            (bit < 192 ? k2.lo : k2.hi) ^= std::uint64_t{1} << (bit % 64);
            b = philox_block(k2, c);
        }
        int d = 0;
        for (int w = 0; w < 4; ++w)
            d += std::popcount(a[w] ^ b[w]);
        flipped += d;
        ASSERT_GE(d, 32) << "weak diffusion at sample " << i;
    }
    EXPECT_NEAR(flipped / n / 128.0, 0.5, 0.01);
}

TEST(UnitUniformConversion, Boundaries)
{
    EXPECT_EQ(to_unit_uniform(0u, 0u).value(), 0.0);
    EXPECT_EQ(to_unit_uniform(0x80000000u, 0u).value(), 0.5);
    const double top = to_unit_uniform(0xffffffffu, 0xffffffffu).value();
    EXPECT_LT(top, 1.0);
    EXPECT_EQ(top, 1.0 - std::ldexp(1.0, -53));
    EXPECT_EQ(to_unit_uniform(std::uint64_t{1}).value(), std::ldexp(1.0, -64));
}

TEST(UnitUniformConversion, RangeOverRandomWords)
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100000; ++i) {
        const double u = to_unit_uniform(rng()).value();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(UnitUniformConversion, UsesHighWordsOfBlock)
{
    const Block b{0x11111111u, 0x22222222u, 0x00000000u, 0x80000000u};
    EXPECT_EQ(block_uniform(b).value(), 0.5);
}

TEST(UnitUniformConversion, RejectsOutOfRange)
{
    EXPECT_THROW(UnitUniform(1.0), std::out_of_range);
    EXPECT_THROW(UnitUniform(-0.1), std::out_of_range);
    EXPECT_THROW(UnitUniform(std::nan("")), std::out_of_range);
}

TEST(SampleFixed, Examples)
{
    EXPECT_EQ(sample_fixed(Bernoulli{0.3}, UnitUniform(0.1)), 1.0);
    EXPECT_EQ(sample_fixed(Bernoulli{0.3}, UnitUniform(0.3)), 0.0);
    EXPECT_NEAR(sample_fixed(Exponential{1.0}, UnitUniform(0.5)), 0.6931471805599453, 1e-12);
    EXPECT_EQ(sample_fixed(DiscreteUniform{6}, UnitUniform(0.0)), 0.0);
    EXPECT_EQ(sample_fixed(DiscreteUniform{6}, UnitUniform(0.5)), 3.0);
    EXPECT_EQ(sample_fixed(DiscreteUniform{6}, UnitUniform(1.0 - std::ldexp(1.0, -53))), 5.0);
    EXPECT_EQ(sample_fixed(Geometric{1.0}, UnitUniform(0.9)), 0.0);
    EXPECT_EQ(sample_fixed(Geometric{0.5}, UnitUniform(0.7)), 1.0);
}

TEST(SampleFixed, RejectsParametersOutsideDomain)
{
    EXPECT_THROW(sample_fixed(Bernoulli{1.5}, UnitUniform(0.1)), std::invalid_argument);
    EXPECT_THROW(sample_fixed(Bernoulli{-0.1}, UnitUniform(0.1)), std::invalid_argument);
    EXPECT_THROW(sample_fixed(Exponential{0.0}, UnitUniform(0.1)), std::invalid_argument);
    EXPECT_THROW(sample_fixed(Exponential{-1.0}, UnitUniform(0.1)), std::invalid_argument);
    EXPECT_THROW(sample_fixed(DiscreteUniform{0}, UnitUniform(0.1)), std::invalid_argument);
    EXPECT_THROW(sample_fixed(Geometric{0.0}, UnitUniform(0.1)), std::invalid_argument);
}

TEST(SampleFixed, BernoulliMatchesIndicatorEverywhere)
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 10000; ++i) {
        const double p = to_unit_uniform(rng()).value();
        const double u = to_unit_uniform(rng()).value();
        ASSERT_EQ(sample_fixed(Bernoulli{p}, UnitUniform(u)), u < p ? 1.0 : 0.0);
    }
}
