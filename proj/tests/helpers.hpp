#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rwre/philox.hpp"

namespace rwre::test {

inline std::filesystem::path data_dir() { return RWRE_TEST_DATA_DIR; }

inline const nlohmann::json& golden() {
    static const nlohmann::json g = [] {
        std::ifstream in(data_dir() / "golden.json");
        return nlohmann::json::parse(in);
    }();
    return g;
}

// Hand-rolled generator for property tests, driven by the keyed test stream.
class Gen {
public:
    explicit Gen(std::uint64_t seed, std::uint32_t substream = 0) : u_(seed, Stream::test, substream) {}

    double uniform() { return u_(next_++); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
    bool coin(double p = 0.5) { return uniform() < p; }

    // Random simplex point with every coordinate >= floor.
    std::vector<double> weights(std::size_t n, double floor = 0.02) {
        std::vector<double> w(n);
        double sum = 0.0;
        for (auto& x : w) sum += (x = uniform() + 1e-3);
        for (auto& x : w) x = floor + (1.0 - floor * static_cast<double>(n)) * x / sum;
        return w;
    }

private:
    KeyedUniform u_;
    std::uint64_t next_ = 0;
};

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("rwre_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

} // namespace rwre::test
