#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace rwre {

struct Atom {
    double value = 0.0;
    double weight = 0.0;
};

/// Uniform density on (lo, hi) carrying total mass `weight`.
struct UniformPiece {
    double lo = 0.0;
    double hi = 0.0;
    double weight = 0.0;
};

enum class Verdict { recurrent, transient_right, transient_left };

std::string_view to_string(Verdict v);

/// A probability measure on (0,1): finitely many atoms plus a piecewise-uniform
/// non-atomic part. Instances are always valid; `create` throws
/// std::invalid_argument otherwise.
class MeasureSpec {
public:
    static constexpr double kWeightTolerance = 1e-12;

    static MeasureSpec create(std::vector<Atom> atoms, std::vector<UniformPiece> pieces = {});
    static MeasureSpec dirac(double value);
    static MeasureSpec uniform(double lo, double hi);

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<UniformPiece>& pieces() const { return pieces_; }

    bool purely_atomic() const { return pieces_.empty(); }
    std::size_t atom_count() const { return atoms_.size(); }

    /// Weight of the atom located exactly (bitwise) at `value`, 0 if none.
    double atom_weight(double value) const;

    /// mu((0, x]).
    double cdf(double x) const;

    /// Generalized inverse inf{x : F(x) > u} for u in [0,1).
    double sample_value(double u) const;

    nlohmann::json to_json() const;
    static MeasureSpec from_json(const nlohmann::json& j);

    friend bool operator==(const MeasureSpec& a, const MeasureSpec& b);

private:
    MeasureSpec() = default;
    void build_quantile_table();

    // One elementary piece of the quantile function, ordered by location.
    struct Segment {
        double lo;
        double hi;     // == lo for a point mass
        double mass;
        double cum_hi; // cumulative mass through this segment
    };

    std::vector<Atom> atoms_;
    std::vector<UniformPiece> pieces_;
    std::vector<Segment> segments_;
};

inline double sample_value(const MeasureSpec& spec, double u) { return spec.sample_value(u); }

/// Sign of E[log((1-w)/w)]: negative drifts right, positive drifts left.
Verdict solomon_classify(const MeasureSpec& spec);

/// E[log((1-w)/w)] with closed-form integrals on the uniform pieces.
double solomon_integral(const MeasureSpec& spec);

/// Image of the measure under x -> 1 - x.
MeasureSpec reflected(const MeasureSpec& spec);

/// Total variation between two purely atomic measures; atoms matched bitwise.
double atomic_tv_distance(const MeasureSpec& a, const MeasureSpec& b);

/// Number of evaluation points of the grid-CDF distance.
inline constexpr std::size_t kCdfGridPoints = 1024;

/// max_j |F_samples(t_j) - F_spec(t_j)| over t_j = (j + 1/2)/1024.
///
/// This is a Kolmogorov-type surrogate for the bounded-Lipschitz distance: it
/// bounds it from above up to a constant and is cheap and reproducible.
double empirical_bl_distance(std::span<const double> samples, const MeasureSpec& spec);

/// Same grid discrepancy between two sample sets.
double grid_cdf_distance(std::span<const double> a, std::span<const double> b);

} // namespace rwre
