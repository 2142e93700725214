#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "helpers.hpp"
#include "rwre/environment.hpp"
#include "rwre/errors.hpp"
#include "rwre/observation_io.hpp"
#include "rwre/philox.hpp"

using namespace rwre;
using rwre::test::golden;

namespace {

const MeasureSpec kTwoAtom = MeasureSpec::create({{0.3, 0.25}, {0.7, 0.75}});
const MeasureSpec kSixtyForty = MeasureSpec::create({{0.3, 0.6}, {0.7, 0.4}});

std::vector<double> doubles(const nlohmann::json& j) { return j.get<std::vector<double>>(); }

} // namespace

TEST_CASE("philox known-answer vectors") {
    for (const auto& v : golden()["kat"]) {
        const auto c = v["counter"].get<std::vector<std::uint32_t>>();
        const auto k = v["key"].get<std::vector<std::uint32_t>>();
        const auto want = v["output"].get<std::vector<std::uint32_t>>();
        const auto got = Philox4x32(k[0], k[1])({c[0], c[1], c[2], c[3]});
        CHECK(std::vector<std::uint32_t>(got.begin(), got.end()) == want);
    }
    // constexpr evaluation gives the same block
    static_assert(Philox4x32(0u, 0u)({0, 0, 0, 0})[0] == 0x6627E8D5);
}

TEST_CASE("keyed uniforms match the reference script") {
    const auto& env = golden()["environment_seed1"];
    const auto sites = env["sites"].get<std::vector<Site>>();
    const auto u = doubles(env["uniforms"]);
    const KeyedUniform ku(1, Stream::environment);
    for (std::size_t i = 0; i < sites.size(); ++i) CHECK(ku(static_cast<std::uint64_t>(sites[i])) == u[i]);

    const auto walk = doubles(golden()["walk_seed7_uniforms"]);
    const KeyedUniform kw(7, Stream::walk);
    for (std::size_t n = 0; n < walk.size(); ++n) CHECK(kw(n) == walk[n]);
}

TEST_CASE("environment values match the golden vectors") {
    const auto& env = golden()["environment_seed1"];
    const auto sites = env["sites"].get<std::vector<Site>>();
    const auto two = doubles(env["two_atom"]);
    const auto sf = doubles(env["sixty_forty"]);
    const auto uni = doubles(env["uniform_0.2_0.8"]);
    const auto u28 = MeasureSpec::uniform(0.2, 0.8);
    for (std::size_t i = 0; i < sites.size(); ++i) {
        CHECK(Environment::compute(kTwoAtom, 1, sites[i]) == two[i]);
        CHECK(Environment::compute(kSixtyForty, 1, sites[i]) == sf[i]);
        CHECK(Environment::compute(u28, 1, sites[i]) == doctest::Approx(uni[i]).epsilon(1e-15));
    }
}

TEST_CASE("environment is order independent and constant for a dirac") {
    const Environment a(kSixtyForty, 99), b(kSixtyForty, 99);
    const double a5 = a.value(5), am3 = a.value(-3);
    const double bm3 = b.value(-3), b5 = b.value(5);
    CHECK(a5 == b5);
    CHECK(am3 == bm3);

    const Environment far(kSixtyForty, 99);
    CHECK(far.value(10'000'000) == Environment::compute(kSixtyForty, 99, 10'000'000));
    CHECK(far.value(3) == a.value(3));

    const Environment d(MeasureSpec::dirac(0.9), 5);
    for (Site z = -50; z <= 50; ++z) CHECK(d.value(z) == 0.9);
}

TEST_CASE("environment values lie in (0,1) and copies agree") {
    const Environment e(MeasureSpec::uniform(0.01, 0.99), 3);
    for (Site z = -1000; z <= 1000; ++z) {
        const double v = e.value(z);
        REQUIRE(v > 0.0);
        REQUIRE(v < 1.0);
    }
    const Environment copy(e);
    for (Site z = -1000; z <= 1000; z += 7) CHECK(copy.value(z) == e.value(z));
}

TEST_CASE("simulation matches the reference script for seed 7") {
    for (const auto* key : {"simulation_seed7_h20_two_atom", "simulation_seed7_h20_sixty_forty"}) {
        const auto& g = golden()[key];
        const auto& spec = std::string(key).ends_with("two_atom") ? kTwoAtom : kSixtyForty;
        const auto sim = run_simulation(spec, 7, 20, true);
        CHECK(sim.observations == doubles(g["observations"]));
        REQUIRE(sim.trajectory);
        CHECK(sim.trajectory->positions == g["positions"].get<std::vector<Site>>());
    }
}

TEST_CASE("simulation without ground truth hides the trajectory") {
    const auto sim = run_simulation(kTwoAtom, 7, 100, false);
    CHECK(sim.observations.size() == 101);
    CHECK_FALSE(sim.trajectory);
    CHECK_FALSE(sim.environment);
    CHECK_THROWS_AS(run_simulation(kTwoAtom, 7, 0, false), std::invalid_argument);
}

TEST_CASE("simulation is deterministic") {
    const auto spec = MeasureSpec::create({{0.5, 0.5}}, {{0.6, 0.8, 0.5}});
    const auto a = run_simulation(spec, 42, 50'000, true);
    const auto b = run_simulation(spec, 42, 50'000, true);
    CHECK(a.observations == b.observations);
    CHECK(a.trajectory->positions == b.trajectory->positions);
    CHECK(a.environment->values == b.environment->values);
    const auto c = run_simulation(spec, 43, 50'000, false);
    CHECK(a.observations != c.observations);
}

TEST_CASE("dirac environment gives a constant stream") {
    const auto sim = run_simulation(MeasureSpec::dirac(0.9), 3, 1000, false);
    for (double v : sim.observations) CHECK(v == 0.9);
}

TEST_CASE("ground truth: xi equals omega at X, unit steps, window spans the range") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto sim = run_simulation(MeasureSpec::uniform(0.35, 0.65), seed, 100'000, true);
        const auto& x = sim.trajectory->positions;
        const auto& w = *sim.environment;
        REQUIRE(x.front() == 0);
        const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
        CHECK(w.first_site == *lo);
        CHECK(w.last_site() == *hi);
        for (std::size_t n = 0; n < x.size(); ++n) {
            REQUIRE(sim.observations[n] == w.at(x[n]));
            if (n) REQUIRE(std::abs(x[n] - x[n - 1]) == 1);
        }
    }
}

TEST_CASE("quenched transition frequency at the busiest site") {
    const auto sim = run_simulation(MeasureSpec::uniform(0.35, 0.65), 1, 1'000'000, true);
    const auto& x = sim.trajectory->positions;
    std::map<Site, std::pair<std::size_t, std::size_t>> moves; // departures, right steps
    for (std::size_t n = 0; n + 1 < x.size(); ++n) {
        auto& [dep, right] = moves[x[n]];
        ++dep;
        right += x[n + 1] == x[n] + 1;
    }
    const auto busiest = std::max_element(moves.begin(), moves.end(),
                                          [](const auto& a, const auto& b) { return a.second.first < b.second.first; });
    const auto [departures, right] = busiest->second;
    REQUIRE(departures >= 1000);
    const double w = sim.environment->at(busiest->first);
    const double frac = static_cast<double>(right) / static_cast<double>(departures);
    CHECK(std::abs(frac - w) <= 3.0 * std::sqrt(w * (1 - w) / static_cast<double>(departures)));
}

TEST_CASE("observation stream binary and text round trips") {
    const ObservationSeq xs{0.1, 0.7, 1.0 / 3.0, 0x1.fffffffffffffp-1, 5e-324};
    std::stringstream bin;
    write_observations(bin, xs);
    const auto bytes = bin.str();
    CHECK(bytes.substr(0, 8) == "RWREOBS1");
    CHECK(bytes.size() == 8 + 8 * xs.size());
    // little-endian: low byte of 0.1 = 0x9a
    CHECK(static_cast<unsigned char>(bytes[8]) == 0x9a);
    CHECK(read_observations(bin) == xs);

    std::stringstream txt;
    write_observations_text(txt, xs);
    CHECK(read_observations_text(txt) == xs);
}

TEST_CASE("observation stream rejects bad magic and truncation") {
    std::stringstream bad("RWREOBS2\0\0\0\0\0\0\0\0");
    CHECK_THROWS_AS(read_observations(bad), FormatError);

    std::stringstream good;
    write_observations(good, {0.25, 0.5});
    auto s = good.str();
    s.pop_back();
    std::stringstream cut(s);
    CHECK_THROWS_AS(read_observations(cut), FormatError);

    std::stringstream text("0.5\nzebra\n");
    CHECK_THROWS_AS(read_observations_text(text), FormatError);
}

TEST_CASE("ground-truth files round trip") {
    const auto dir = rwre::test::scratch_dir("gt_files");
    std::filesystem::create_directories(dir);
    const auto sim = run_simulation(kTwoAtom, 9, 500, true);
    write_trajectory(dir / "t.bin", *sim.trajectory);
    write_environment(dir / "e.bin", *sim.environment);
    CHECK(read_trajectory(dir / "t.bin").positions == sim.trajectory->positions);
    const auto env = read_environment(dir / "e.bin");
    CHECK(env.first_site == sim.environment->first_site);
    CHECK(env.values == sim.environment->values);
    CHECK_THROWS_AS(read_trajectory(dir / "e.bin"), FormatError);
    std::filesystem::remove_all(dir);
}
