#include "rwre/environment.hpp"

#include <algorithm>
#include <stdexcept>

namespace rwre {

namespace {

// Sites are mapped to 64-bit counters by two's complement.
std::uint64_t site_counter(Site z) { return static_cast<std::uint64_t>(z); }

// Two-sided growable cache used by the simulation loop; single-threaded.
class SiteCache {
public:
    SiteCache(const MeasureSpec& spec, std::uint64_t seed) : spec_(spec), seed_(seed) {}

    double operator()(Site z) {
        if (z >= 0) {
            const auto i = static_cast<std::size_t>(z);
            while (right_.size() <= i) right_.push_back(Environment::compute(spec_, seed_, Site(right_.size())));
            return right_[i];
        }
        const auto i = static_cast<std::size_t>(-z - 1);
        while (left_.size() <= i) left_.push_back(Environment::compute(spec_, seed_, -Site(left_.size()) - 1));
        return left_[i];
    }

    EnvironmentWindow window(Site lo, Site hi) {
        EnvironmentWindow w;
        w.first_site = lo;
        w.values.reserve(static_cast<std::size_t>(hi - lo + 1));
        for (Site z = lo; z <= hi; ++z) w.values.push_back((*this)(z));
        return w;
    }

private:
    const MeasureSpec& spec_;
    std::uint64_t seed_;
    std::vector<double> right_;
    std::vector<double> left_;
};

} // namespace

Environment::Environment(MeasureSpec spec, std::uint64_t seed) : spec_(std::move(spec)), seed_(seed) {}

Environment::Environment(const Environment& other) : spec_(other.spec_), seed_(other.seed_) {
    std::lock_guard lock(other.mutex_);
    right_ = other.right_;
    left_ = other.left_;
}

double Environment::compute(const MeasureSpec& spec, std::uint64_t seed, Site z) {
    return spec.sample_value(KeyedUniform(seed, Stream::environment)(site_counter(z)));
}

double Environment::value(Site z) const {
    std::lock_guard lock(mutex_);
    auto& side = z >= 0 ? right_ : left_;
    const auto i = static_cast<std::size_t>(z >= 0 ? z : -z - 1);
    if (i < side.size()) return side[i];
    if (static_cast<Site>(i - side.size()) > kMaxCacheGap) return compute(spec_, seed_, z);
    while (side.size() <= i) {
        const auto k = static_cast<Site>(side.size());
        side.push_back(compute(spec_, seed_, z >= 0 ? k : -k - 1));
    }
    return side[i];
}

SimulationResult run_simulation(const MeasureSpec& spec, std::uint64_t seed, std::uint64_t horizon,
                                bool ground_truth) {
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    SiteCache omega(spec, seed);
    const KeyedUniform walk(seed, Stream::walk);

    SimulationResult out;
    out.observations.reserve(horizon + 1);
    std::vector<Site> positions;
    if (ground_truth) positions.reserve(horizon + 1);

    Site x = 0;
    Site lo = 0;
    Site hi = 0;
    double w = omega(x);
    for (std::uint64_t n = 0;; ++n) {
        out.observations.push_back(w);
        if (ground_truth) positions.push_back(x);
        if (n == horizon) break;
        x += walk(n) < w ? 1 : -1;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        w = omega(x);
    }
    if (ground_truth) {
        out.trajectory = Trajectory{std::move(positions)};
        out.environment = omega.window(lo, hi);
    }
    return out;
}

} // namespace rwre
