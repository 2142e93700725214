#include "rwre/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include <Eigen/Dense>

#include "rwre/errors.hpp"
#include "rwre/parallel.hpp"
#include "rwre/philox.hpp"

namespace rwre {

double straight_crossing_probability(std::span<const double> forward, std::span<const double> backward) {
    const auto k = forward.size();
    if (k == 0 || backward.size() != k) throw std::invalid_argument("forward and backward must be nonempty and equal length");
    // State 2i + f: interior state i, f = 0 while no backward step was taken.
    const auto n = static_cast<Eigen::Index>(2 * k);
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, 2); // columns: straight arrival, bent arrival
    for (std::size_t i = 0; i < k; ++i) {
        for (int f = 0; f < 2; ++f) {
            const auto s = static_cast<Eigen::Index>(2 * i + f);
            if (i + 1 == k)
                b(s, f) += forward[i];
            else
                a(s, static_cast<Eigen::Index>(2 * (i + 1) + f)) -= forward[i];
            if (i > 0) a(s, static_cast<Eigen::Index>(2 * (i - 1) + 1)) -= backward[i];
        }
    }
    const Eigen::MatrixXd x = a.partialPivLu().solve(b);
    const double straight = x(0, 0);
    const double bent = x(0, 1);
    if (!(straight + bent > 0.0)) throw std::invalid_argument("far endpoint unreachable");
    return straight / (straight + bent);
}

double exact_confined_crossing_prob(double lambda, double partner_weight) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0,1)");
    if (!(partner_weight > 0.0 && lambda + partner_weight <= 1.0 + 1e-12))
        throw std::invalid_argument("partner weight must be positive with lambda + partner <= 1");
    // v2, v3: forward along the inner edge then out to v4; backward toward v1.
    const double forward[] = {lambda, partner_weight};
    const double backward[] = {partner_weight, lambda};
    return straight_crossing_probability(forward, backward);
}

StraightXProbability exact_straight_X_prob(double eta) {
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0,1)");
    const double right[] = {eta, eta};
    const double left[] = {1.0 - eta, 1.0 - eta};
    return {straight_crossing_probability(right, left), straight_crossing_probability(left, right)};
}

nlohmann::json MonteCarloW::to_json() const {
    return {{"n", n}, {"successes", successes}, {"mean", mean}, {"ci99", {ci_low, ci_high}}};
}

namespace {

std::vector<double> distinct_values(std::span<const double> values) {
    std::vector<double> out;
    std::unordered_set<std::uint64_t> seen;
    for (double v : values)
        if (seen.insert(std::bit_cast<std::uint64_t>(v)).second) out.push_back(v);
    return out;
}

Label draw_label(std::span<const double> weights, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return static_cast<Label>(i);
    }
    return static_cast<Label>(weights.size() - 1);
}

void check_weights(std::span<const double> weights) {
    if (weights.size() < 2) throw std::invalid_argument("need at least two labels");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("weights must be positive");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("weights must sum to 1");
}

} // namespace

MonteCarloW mc_ground_truth_W(const MeasureSpec& spec, double outer, double inner, std::span<const std::uint64_t> seeds,
                              std::uint64_t horizon) {
    if (!spec.purely_atomic()) throw std::invalid_argument("ground-truth W needs a purely atomic spec");
    if (spec.atom_count() < 2) throw std::invalid_argument("deterministic environment excluded");
    if (spec.atom_weight(outer) == 0.0 || spec.atom_weight(inner) == 0.0 || outer == inner)
        throw std::invalid_argument("pattern values must be two distinct atoms of the spec");

    std::vector<double> support;
    for (const auto& a : spec.atoms()) support.push_back(a.value);
    const LabelAlphabet alphabet(support);
    const LabelPair pair{alphabet.label_of(outer), alphabet.label_of(inner)};

    auto one = [&](std::uint64_t seed) {
        const auto sim = run_simulation(spec, seed, horizon, true);
        const auto& xs = sim.observations;
        const auto& x = sim.trajectory->positions;
        LabeledTree tree(alphabet.size(), alphabet.label_of(xs[0]));
        const auto decoded = decode_T(xs, alphabet, tree);
        const auto scanner = crossing_indicators(decoded, tree, {pair});
        std::vector<WSample> out;
        for (const auto& r : scanner.indicators()) {
            WSample s;
            s.seed = seed;
            s.w = r.w;
            s.time_found = r.time_found;
            s.z1 = x[r.i1];
            s.z2 = x[r.i2];
            s.positive_ray = std::min(s.z1, s.z2) >= 0;
            out.push_back(s);
        }
        return out;
    };

    MonteCarloW mc;
    for (auto& part : parallel_map(seeds, one)) mc.samples.insert(mc.samples.end(), part.begin(), part.end());
    mc.n = mc.samples.size();
    if (mc.n == 0) throw Error("no data");
    for (const auto& s : mc.samples) mc.successes += static_cast<std::size_t>(s.w);
    const double n = static_cast<double>(mc.n);
    mc.mean = static_cast<double>(mc.successes) / n;
    constexpr double z = 2.5758293035489004; // two-sided 99%
    const double denom = 1.0 + z * z / n;
    const double centre = (mc.mean + z * z / (2.0 * n)) / denom;
    const double half = z * std::sqrt(mc.mean * (1.0 - mc.mean) / n + z * z / (4.0 * n * n)) / denom;
    mc.ci_low = std::max(0.0, centre - half);
    mc.ci_high = std::min(1.0, centre + half);
    return mc;
}

bool CensusSeries::strictly_increasing() const {
    for (std::size_t i = 1; i < counts.size(); ++i)
        if (counts[i] <= counts[i - 1]) return false;
    return true;
}

bool CensusSeries::constant_from(std::size_t checkpoint_index) const {
    for (std::size_t i = checkpoint_index + 1; i < counts.size(); ++i)
        if (counts[i] != counts[checkpoint_index]) return false;
    return true;
}

nlohmann::json CensusReport::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : series) rows.push_back({{"seed", s.seed}, {"counts", s.counts}});
    return {{"labels", label_count}, {"checkpoints", checkpoints}, {"series", rows}};
}

CensusReport root_visit_census(std::span<const double> weights, std::span<const std::uint64_t> checkpoints,
                               std::span<const std::uint64_t> seeds) {
    check_weights(weights);
    if (checkpoints.empty() || !std::is_sorted(checkpoints.begin(), checkpoints.end()))
        throw std::invalid_argument("checkpoints must be nonempty and sorted");
    const auto horizon = checkpoints.back();
    const std::vector<double> w(weights.begin(), weights.end());

    auto one = [&](std::uint64_t seed) {
        const KeyedUniform root_u(seed, Stream::census, 0);
        LabeledTree tree(w.size(), draw_label(w, root_u(0)));
        // visits[s]: root visits at step s of either direction
        std::vector<std::uint8_t> visits(horizon + 1, 0);
        for (std::uint32_t dir = 1; dir <= 2; ++dir) {
            const KeyedUniform u(seed, Stream::census, dir);
            VertexId v = tree.root();
            for (std::uint64_t s = 1; s <= horizon; ++s) {
                v = tree.neighbor(v, draw_label(w, u(s)));
                if (tree.is_root(v)) ++visits[s];
            }
        }
        CensusSeries series{seed, {}};
        std::size_t total = 0;
        std::uint64_t s = 0;
        for (auto cp : checkpoints) {
            for (; s < cp; ) total += visits[++s];
            series.counts.push_back(total);
        }
        return series;
    };

    CensusReport report;
    report.label_count = w.size();
    report.checkpoints.assign(checkpoints.begin(), checkpoints.end());
    report.series = parallel_map(seeds, one);
    return report;
}

std::vector<std::int64_t> simulate_R_line(double w0, double w1, std::uint64_t steps, std::uint64_t seed) {
    const double weights[] = {w0, w1};
    check_weights(weights);
    const KeyedUniform u(seed, Stream::census, 3);
    LabeledTree tree(2, draw_label(weights, u(0)));
    std::vector<std::int64_t> positions;
    positions.reserve(steps + 1);
    VertexId v = tree.root();
    positions.push_back(0);
    for (std::uint64_t s = 1; s <= steps; ++s) {
        v = tree.neighbor(v, draw_label(weights, u(s)));
        positions.push_back(tree.line_position(v));
    }
    return positions;
}

ProjectionCheck ssrw_projection_check(std::span<const std::int64_t> positions, std::size_t min_steps) {
    ProjectionCheck out;
    std::optional<std::int64_t> current;
    for (auto p : positions) {
        if (((p % 4) + 4) % 4 != 0) continue;
        if (current && p != *current) {
            ++out.steps;
            if (p > *current) ++out.plus;
        }
        current = p;
    }
    if (out.steps < min_steps) throw InsufficientDataError("insufficient data");
    out.p_plus = static_cast<double>(out.plus) / static_cast<double>(out.steps);
    return out;
}

GroundTruthCheck check_ground_truth(const SimulationResult& sim) {
    if (!sim.trajectory || !sim.environment) throw std::invalid_argument("ground-truth run required");
    const auto& xs = sim.observations;
    const auto& x = sim.trajectory->positions;
    const LabelAlphabet alphabet(distinct_values(sim.environment->values));
    LabeledTree tree(alphabet.size(), alphabet.label_of(xs[0]));

    const auto r = embed_R(*sim.environment, alphabet, tree);
    const auto t_true = compose_T(r, *sim.trajectory);
    const auto t = decode_T(xs, alphabet, tree);

    GroundTruthCheck out;
    for (std::size_t n = 0; n < xs.size(); ++n) {
        if (t.vertices[n] != t_true.vertices[n]) ++out.decode_violations;
        if (std::bit_cast<std::uint64_t>(alphabet.value(tree.label(t.vertices[n]))) != std::bit_cast<std::uint64_t>(xs[n]))
            ++out.label_violations;
    }

    for (Label outer = 0; outer < alphabet.size(); ++outer) {
        for (Label inner = 0; inner < alphabet.size(); ++inner) {
            if (outer == inner) continue;
            const auto scanner = crossing_indicators(t, tree, {{outer, inner}});
            for (const auto& w : scanner.indicators()) {
                const auto& set = scanner.sets()[w.set_id];
                GroundTruthCrossing c;
                c.m = w.set_id;
                c.t1 = w.i1;
                c.t2 = w.i2;
                c.z1 = x[w.i1];
                c.z2 = x[w.i2];
                c.w = w.w;
                const auto dt = c.t1 > c.t2 ? c.t1 - c.t2 : c.t2 - c.t1;
                const auto dz = static_cast<std::uint64_t>(std::abs(c.z2 - c.z1));
                c.straight_t = dt == 3;
                c.straight_r = dz == 3;
                c.straight_x = dt == dz;
                c.positive_time = std::min(c.z1, c.z2) >= 0;
                c.r_crossing = true;
                for (Site z = std::min(c.z1, c.z2) + 1; z < std::max(c.z1, c.z2); ++z) {
                    const auto v = r.at(z);
                    if (v == set.vertices[0] || v == set.vertices[3]) c.r_crossing = false;
                }
                if (c.straight_t) ++out.straight_confined;
                if (!c.r_crossing || c.straight_t != (c.straight_r && c.straight_x) || c.straight_t != (c.w == 1))
                    ++out.factorization_violations;
                out.crossings.push_back(c);
            }
        }
    }
    return out;
}

double lag1_autocorrelation(std::span<const int> w) {
    if (w.size() < 2) throw std::invalid_argument("need at least two values");
    double mean = 0.0;
    for (int v : w) mean += v;
    mean /= static_cast<double>(w.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double d = w[i] - mean;
        den += d * d;
        if (i + 1 < w.size()) num += d * (w[i + 1] - mean);
    }
    return den > 0.0 ? num / den : 0.0;
}

double pooled_lag1_autocorrelation(std::span<const std::vector<int>> streams) {
    double num = 0.0, den = 0.0;
    for (const auto& w : streams) {
        if (w.empty()) continue;
        double mean = 0.0;
        for (int v : w) mean += v;
        mean /= static_cast<double>(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double d = w[i] - mean;
            den += d * d;
            if (i + 1 < w.size()) num += d * (w[i + 1] - mean);
        }
    }
    return den > 0.0 ? num / den : 0.0;
}

RayComparison compare_rays(std::span<const WSample> samples) {
    RayComparison c;
    std::size_t hits_pos = 0, hits_neg = 0;
    for (const auto& s : samples) {
        if (s.positive_ray) {
            ++c.n_positive;
            hits_pos += static_cast<std::size_t>(s.w);
        } else {
            ++c.n_negative;
            hits_neg += static_cast<std::size_t>(s.w);
        }
    }
    if (c.n_positive == 0 || c.n_negative == 0) throw InsufficientDataError("both rays need indicators");
    const double np = static_cast<double>(c.n_positive), nn = static_cast<double>(c.n_negative);
    c.mean_positive = static_cast<double>(hits_pos) / np;
    c.mean_negative = static_cast<double>(hits_neg) / nn;
    const double pooled = static_cast<double>(hits_pos + hits_neg) / (np + nn);
    c.pooled_se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / np + 1.0 / nn));
    c.z = c.pooled_se > 0.0 ? (c.mean_positive - c.mean_negative) / c.pooled_se : 0.0;
    return c;
}

} // namespace rwre
