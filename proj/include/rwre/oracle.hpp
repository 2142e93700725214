#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "rwre/decoder.hpp"
#include "rwre/embedding.hpp"
#include "rwre/environment.hpp"
#include "rwre/measure.hpp"

namespace rwre {

/// Chain on interior states 0..k-1 entered at state 0: state i moves forward
/// with probability forward[i] (past k-1 is the far endpoint), backward with
/// probability backward[i] (before 0 is the near endpoint), and escapes
/// otherwise. Returns P(straight | far endpoint reached first) by solving the
/// absorbing chain augmented with a straight/bent flag.
double straight_crossing_probability(std::span<const double> forward, std::span<const double> backward);

/// R crossing a pattern set (partner, eta, eta, partner) where the inner label
/// has weight `lambda`. Should equal 1 - lambda^2 for every partner weight.
double exact_confined_crossing_prob(double lambda, double partner_weight);
inline double exact_confined_crossing_prob(double lambda) {
    return exact_confined_crossing_prob(lambda, 1.0 - lambda);
}

struct StraightXProbability {
    double positive = 0.0; // crossing toward increasing sites
    double negative = 0.0; // crossing toward decreasing sites
};

/// X crossing a 4-site block with values (eta0, eta, eta, eta0), solved once
/// per direction. Both should equal 1 - eta(1-eta).
StraightXProbability exact_straight_X_prob(double eta);

/// One scored indicator from a ground-truth run.
struct WSample {
    std::uint64_t seed = 0;
    int w = 0;
    std::size_t time_found = 0;
    Site z1 = 0; // site under v1 when T crossed
    Site z2 = 0; // site under v4
    bool positive_ray = false; // both sites >= 0
};

struct MonteCarloW {
    std::size_t n = 0;
    std::size_t successes = 0;
    double mean = 0.0;
    double ci_low = 0.0; // 99% Wilson interval
    double ci_high = 0.0;
    std::vector<WSample> samples; // seed order, then time order

    bool contains(double p) const { return ci_low <= p && p <= ci_high; }
    nlohmann::json to_json() const;
};

/// Ground-truth runs over `seeds`, one pattern family (outer, inner) scored on
/// each decoded stream, pooled in seed order. Throws Error("no data") when no
/// indicator is scored. Seeds run concurrently.
MonteCarloW mc_ground_truth_W(const MeasureSpec& spec, double outer, double inner, std::span<const std::uint64_t> seeds,
                              std::uint64_t horizon);

struct CensusSeries {
    std::uint64_t seed = 0;
    std::vector<std::size_t> counts; // root visits up to each checkpoint
    bool strictly_increasing() const;
    bool constant_from(std::size_t checkpoint_index) const;
};

struct CensusReport {
    std::size_t label_count = 0;
    std::vector<std::uint64_t> checkpoints;
    std::vector<CensusSeries> series;
    nlohmann::json to_json() const;
};

/// R simulated directly on the labeled tree: each step goes to the neighbor
/// with label i with probability weights[i]. Both time directions start at
/// the root; checkpoint k counts root visits within the first k steps of
/// either direction.
CensusReport root_visit_census(std::span<const double> weights, std::span<const std::uint64_t> checkpoints,
                               std::span<const std::uint64_t> seeds);

/// N = 2: positions on the line of R(0), ..., R(steps), labels drawn with weights (w0, w1).
std::vector<std::int64_t> simulate_R_line(double w0, double w1, std::uint64_t steps, std::uint64_t seed);

struct ProjectionCheck {
    std::size_t steps = 0;
    std::size_t plus = 0;
    double p_plus = 0.0;
};

/// Successive distinct multiples of 4 visited by an R-path on the line; the
/// fraction of +4 steps. Throws InsufficientDataError below 100 projected steps.
ProjectionCheck ssrw_projection_check(std::span<const std::int64_t> positions, std::size_t min_steps = 100);

/// Ground-truth view of one T-crossing.
struct GroundTruthCrossing {
    std::uint32_t m = 0;
    Site z1 = 0;
    Site z2 = 0;
    std::size_t t1 = 0; // time T stood on v1
    std::size_t t2 = 0; // time T stood on v4
    bool straight_t = false;
    bool straight_r = false;
    bool straight_x = false;
    bool r_crossing = false; // R avoids v1, v4 strictly between z1 and z2
    bool positive_time = false; // D: the R-crossing lies at positive sites
    int w = 0;
};

struct GroundTruthCheck {
    std::size_t decode_violations = 0;   // n with decode_T(xi)(n) != R(X(n))
    std::size_t label_violations = 0;    // n with phi(T(n)) != xi(n)
    std::size_t factorization_violations = 0;
    std::size_t straight_confined = 0;
    std::vector<GroundTruthCrossing> crossings;
    bool passed() const { return decode_violations == 0 && label_violations == 0 && factorization_violations == 0; }
};

/// Embeds the true environment, decodes xi blind, and compares. The crossings
/// are the scored indicators of every pattern family over ordered atom pairs.
GroundTruthCheck check_ground_truth(const SimulationResult& sim);

/// Sample lag-1 autocorrelation; 0 when the series is constant.
double lag1_autocorrelation(std::span<const int> w);

/// Lag-1 autocorrelation over several streams, each centred on its own mean;
/// lag pairs never straddle two streams.
double pooled_lag1_autocorrelation(std::span<const std::vector<int>> streams);

struct RayComparison {
    std::size_t n_positive = 0;
    std::size_t n_negative = 0;
    double mean_positive = 0.0;
    double mean_negative = 0.0;
    double pooled_se = 0.0;
    double z = 0.0;
};

RayComparison compare_rays(std::span<const WSample> samples);

} // namespace rwre
