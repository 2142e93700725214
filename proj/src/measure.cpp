#include "rwre/measure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>

namespace rwre {

namespace {

bool inside_unit(double x) { return x > 0.0 && x < 1.0; }

// Binary entropy in nats; the antiderivative of log((1-x)/x).
double entropy(double x) {
    return -(x * std::log(x) + (1.0 - x) * std::log1p(-x));
}

std::vector<double> sorted_copy(std::span<const double> xs) {
    std::vector<double> out(xs.begin(), xs.end());
    std::sort(out.begin(), out.end());
    return out;
}

double empirical_cdf(const std::vector<double>& sorted, double t) {
    auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

double grid_point(std::size_t j) {
    return (static_cast<double>(j) + 0.5) / static_cast<double>(kCdfGridPoints);
}

} // namespace

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::recurrent: return "recurrent";
    case Verdict::transient_right: return "transient_right";
    case Verdict::transient_left: return "transient_left";
    }
    return "unknown";
}

MeasureSpec MeasureSpec::create(std::vector<Atom> atoms, std::vector<UniformPiece> pieces) {
    double total = 0.0;
    for (const auto& a : atoms) {
        if (!inside_unit(a.value))
            throw std::invalid_argument("atom value outside (0,1)");
        if (!(a.weight > 0.0))
            throw std::invalid_argument("atom weight must be positive");
        total += a.weight;
    }
    for (std::size_t i = 0; i < atoms.size(); ++i)
        for (std::size_t j = i + 1; j < atoms.size(); ++j)
            if (atoms[i].value == atoms[j].value)
                throw std::invalid_argument("duplicate atom value");
    for (const auto& p : pieces) {
        if (!inside_unit(p.lo) || !inside_unit(p.hi))
            throw std::invalid_argument("piece endpoint outside (0,1)");
        if (!(p.lo < p.hi))
            throw std::invalid_argument("piece requires lo < hi");
        if (!(p.weight > 0.0))
            throw std::invalid_argument("piece weight must be positive");
        total += p.weight;
    }
    if (atoms.empty() && pieces.empty())
        throw std::invalid_argument("measure has no mass");
    if (std::abs(total - 1.0) > kWeightTolerance)
        throw std::invalid_argument("weights sum to " + std::to_string(total) + ", expected 1");

    MeasureSpec spec;
    spec.atoms_ = std::move(atoms);
    spec.pieces_ = std::move(pieces);
    spec.build_quantile_table();
    return spec;
}

MeasureSpec MeasureSpec::dirac(double value) { return create({{value, 1.0}}); }

MeasureSpec MeasureSpec::uniform(double lo, double hi) { return create({}, {{lo, hi, 1.0}}); }

void MeasureSpec::build_quantile_table() {
    // Cut the line at every atom and piece endpoint; between consecutive cuts
    // the density is constant.
    std::vector<double> cuts;
    for (const auto& a : atoms_) cuts.push_back(a.value);
    for (const auto& p : pieces_) {
        cuts.push_back(p.lo);
        cuts.push_back(p.hi);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    segments_.clear();
    double cum = 0.0;
    auto push = [&](double lo, double hi, double mass) {
        if (mass <= 0.0) return;
        cum += mass;
        segments_.push_back({lo, hi, mass, cum});
    };
    for (std::size_t k = 0; k < cuts.size(); ++k) {
        push(cuts[k], cuts[k], atom_weight(cuts[k]));
        if (k + 1 == cuts.size()) break;
        const double lo = cuts[k];
        const double hi = cuts[k + 1];
        double mass = 0.0;
        for (const auto& p : pieces_)
            if (p.lo <= lo && hi <= p.hi) mass += p.weight * (hi - lo) / (p.hi - p.lo);
        push(lo, hi, mass);
    }
}

double MeasureSpec::atom_weight(double value) const {
    for (const auto& a : atoms_)
        if (a.value == value) return a.weight;
    return 0.0;
}

double MeasureSpec::cdf(double x) const {
    double f = 0.0;
    for (const auto& a : atoms_)
        if (a.value <= x) f += a.weight;
    for (const auto& p : pieces_) {
        if (x >= p.hi)
            f += p.weight;
        else if (x > p.lo)
            f += p.weight * (x - p.lo) / (p.hi - p.lo);
    }
    return std::min(f, 1.0);
}

double MeasureSpec::sample_value(double u) const {
    auto it = std::upper_bound(segments_.begin(), segments_.end(), u,
                               [](double x, const Segment& s) { return x < s.cum_hi; });
    if (it == segments_.end()) --it; // u within rounding of the total mass
    if (it->hi == it->lo) return it->lo;
    const double below = it->cum_hi - it->mass;
    const double frac = std::clamp((u - below) / it->mass, 0.0, 1.0);
    const double x = it->lo + frac * (it->hi - it->lo);
    return std::clamp(x, it->lo, std::nextafter(it->hi, it->lo));
}

nlohmann::json MeasureSpec::to_json() const {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : atoms_) atoms.push_back({{"value", a.value}, {"weight", a.weight}});
    nlohmann::json pieces = nlohmann::json::array();
    for (const auto& p : pieces_) pieces.push_back({{"lo", p.lo}, {"hi", p.hi}, {"weight", p.weight}});
    return {{"atoms", atoms}, {"uniform_pieces", pieces}};
}

MeasureSpec MeasureSpec::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("measure must be a JSON object");
    std::vector<Atom> atoms;
    std::vector<UniformPiece> pieces;
    if (j.contains("atoms"))
        for (const auto& a : j.at("atoms"))
            atoms.push_back({a.at("value").get<double>(), a.at("weight").get<double>()});
    if (j.contains("uniform_pieces"))
        for (const auto& p : j.at("uniform_pieces"))
            pieces.push_back({p.at("lo").get<double>(), p.at("hi").get<double>(), p.at("weight").get<double>()});
    return create(std::move(atoms), std::move(pieces));
}

bool operator==(const MeasureSpec& a, const MeasureSpec& b) {
    auto same_atoms = std::equal(a.atoms_.begin(), a.atoms_.end(), b.atoms_.begin(), b.atoms_.end(),
                                 [](const Atom& x, const Atom& y) { return x.value == y.value && x.weight == y.weight; });
    auto same_pieces = std::equal(a.pieces_.begin(), a.pieces_.end(), b.pieces_.begin(), b.pieces_.end(),
                                  [](const UniformPiece& x, const UniformPiece& y) {
                                      return x.lo == y.lo && x.hi == y.hi && x.weight == y.weight;
                                  });
    return same_atoms && same_pieces;
}

double solomon_integral(const MeasureSpec& spec) {
    double sum = 0.0;
    for (const auto& a : spec.atoms()) sum += a.weight * std::log((1.0 - a.value) / a.value);
    for (const auto& p : spec.pieces())
        sum += p.weight * (entropy(p.hi) - entropy(p.lo)) / (p.hi - p.lo);
    return sum;
}

Verdict solomon_classify(const MeasureSpec& spec) {
    constexpr double kZeroBand = 1e-9;
    const double s = solomon_integral(spec);
    if (s < -kZeroBand) return Verdict::transient_right;
    if (s > kZeroBand) return Verdict::transient_left;
    return Verdict::recurrent;
}

double atomic_tv_distance(const MeasureSpec& a, const MeasureSpec& b) {
    if (!a.purely_atomic() || !b.purely_atomic())
        throw std::invalid_argument("atomic_tv_distance requires purely atomic measures");
    std::map<std::uint64_t, double> diff;
    for (const auto& x : a.atoms()) diff[std::bit_cast<std::uint64_t>(x.value)] += x.weight;
    for (const auto& x : b.atoms()) diff[std::bit_cast<std::uint64_t>(x.value)] -= x.weight;
    double sum = 0.0;
    for (const auto& [_, d] : diff) sum += std::abs(d);
    return std::clamp(0.5 * sum, 0.0, 1.0);
}

MeasureSpec reflected(const MeasureSpec& spec) {
    std::vector<Atom> atoms;
    for (const auto& a : spec.atoms()) atoms.push_back({1.0 - a.value, a.weight});
    std::vector<UniformPiece> pieces;
    for (const auto& p : spec.pieces()) pieces.push_back({1.0 - p.hi, 1.0 - p.lo, p.weight});
    return MeasureSpec::create(std::move(atoms), std::move(pieces));
}

double empirical_bl_distance(std::span<const double> samples, const MeasureSpec& spec) {
    if (samples.empty()) throw std::invalid_argument("empirical distance needs at least one sample");
    const auto sorted = sorted_copy(samples);
    double worst = 0.0;
    for (std::size_t j = 0; j < kCdfGridPoints; ++j) {
        const double t = grid_point(j);
        worst = std::max(worst, std::abs(empirical_cdf(sorted, t) - spec.cdf(t)));
    }
    return worst;
}

double grid_cdf_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("grid distance needs nonempty sample sets");
    const auto sa = sorted_copy(a);
    const auto sb = sorted_copy(b);
    double worst = 0.0;
    for (std::size_t j = 0; j < kCdfGridPoints; ++j) {
        const double t = grid_point(j);
        worst = std::max(worst, std::abs(empirical_cdf(sa, t) - empirical_cdf(sb, t)));
    }
    return worst;
}

} // namespace rwre
