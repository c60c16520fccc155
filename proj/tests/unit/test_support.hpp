#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <string>

namespace evrng::test {

inline const nlohmann::json& oracle()
{
    static const nlohmann::json j = [] {
        std::ifstream in(std::string(EVRNG_TEST_DATA_DIR) + "/oracle/expected.json");
        return nlohmann::json::parse(in);
    }();
    return j;
}

inline std::uint64_t hex64(const std::string& s)
{
    return std::stoull(s, nullptr, 16);
}

} // namespace evrng::test
