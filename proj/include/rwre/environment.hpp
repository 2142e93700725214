#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <vector>

#include "rwre/measure.hpp"
#include "rwre/philox.hpp"

namespace rwre {

using Site = std::int64_t;

/// The stream xi(0), xi(1), ... of environment values seen by the walker.
using ObservationSeq = std::vector<double>;

/// An i.i.d. environment realized lazily: the value at a site is a pure
/// function of (seed, site, spec), so the access order never matters.
/// Concurrent reads are safe.
class Environment {
public:
    Environment(MeasureSpec spec, std::uint64_t seed);
    Environment(const Environment& other);
    Environment& operator=(const Environment&) = delete;

    const MeasureSpec& spec() const { return spec_; }
    std::uint64_t seed() const { return seed_; }

    double value(Site z) const;

    /// The uncached value at z; what `value` caches.
    static double compute(const MeasureSpec& spec, std::uint64_t seed, Site z);

private:
    static constexpr Site kMaxCacheGap = Site{1} << 22;

    MeasureSpec spec_;
    std::uint64_t seed_;
    mutable std::mutex mutex_;
    mutable std::vector<double> right_; // sites 0, 1, 2, ...
    mutable std::vector<double> left_;  // sites -1, -2, ...
};

inline double environment_value(const Environment& env, Site z) { return env.value(z); }

struct Trajectory {
    std::vector<Site> positions;
};

/// Environment values on the contiguous window [first_site, first_site + size).
struct EnvironmentWindow {
    Site first_site = 0;
    std::vector<double> values;

    Site last_site() const { return first_site + static_cast<Site>(values.size()) - 1; }
    bool covers(Site z) const { return z >= first_site && z <= last_site(); }
    double at(Site z) const { return values.at(static_cast<std::size_t>(z - first_site)); }
};

struct SimulationResult {
    ObservationSeq observations;
    std::optional<Trajectory> trajectory;
    std::optional<EnvironmentWindow> environment;
};

/// Runs the quenched walk for `horizon` steps and returns xi(0..horizon). In
/// ground-truth mode the trajectory and the environment on [min X, max X] are
/// returned as well.
SimulationResult run_simulation(const MeasureSpec& spec, std::uint64_t seed, std::uint64_t horizon,
                                bool ground_truth);

} // namespace rwre
