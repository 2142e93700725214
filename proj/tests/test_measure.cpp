#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "helpers.hpp"
#include "rwre/measure.hpp"

using namespace rwre;
using rwre::test::Gen;

namespace {

MeasureSpec two_atoms(double w03) { return MeasureSpec::create({{0.3, w03}, {0.7, 1.0 - w03}}); }

// Midpoint rule on each uniform piece, exact sum over atoms.
double numeric_log_ratio(const MeasureSpec& spec) {
    double acc = 0.0;
    for (const auto& a : spec.atoms()) acc += a.weight * std::log((1.0 - a.value) / a.value);
    for (const auto& p : spec.pieces()) {
        constexpr int k = 200000;
        const double h = (p.hi - p.lo) / k;
        double s = 0.0;
        for (int i = 0; i < k; ++i) {
            const double x = p.lo + (i + 0.5) * h;
            s += std::log((1.0 - x) / x);
        }
        acc += p.weight * s / k;
    }
    return acc;
}

MeasureSpec random_atomic(Gen& g, std::size_t n) {
    const auto w = g.weights(n);
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < n; ++i) atoms.push_back({0.05 + 0.9 * (static_cast<double>(i) + g.uniform(0.1, 0.9)) / n, w[i]});
    return MeasureSpec::create(atoms);
}

} // namespace

TEST_CASE("measure construction rejects invalid specs") {
    CHECK_THROWS_AS(MeasureSpec::create({{0.3, 0.5}, {0.7, 0.4}}), std::invalid_argument);
    CHECK_THROWS_AS(MeasureSpec::create({{0.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(MeasureSpec::create({{1.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(MeasureSpec::create({{0.3, 0.5}, {0.3, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(MeasureSpec::create({{0.3, -0.5}, {0.7, 1.5}}), std::invalid_argument);
    CHECK_THROWS_AS(MeasureSpec::create({}, {{0.6, 0.4, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(MeasureSpec::create({}, {{0.0, 0.4, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(MeasureSpec::create({}, {}), std::invalid_argument);
    CHECK_NOTHROW(MeasureSpec::create({{0.3, 0.5}, {0.7, 0.5 + 5e-13}}));
}

TEST_CASE("sample_value examples") {
    CHECK(MeasureSpec::dirac(0.3).sample_value(0.0) == 0.3);
    CHECK(MeasureSpec::dirac(0.3).sample_value(0.999) == 0.3);
    CHECK(two_atoms(0.6).sample_value(0.75) == 0.7);
    CHECK(two_atoms(0.6).sample_value(0.59) == 0.3);
    CHECK(MeasureSpec::uniform(0.2, 0.8).sample_value(0.5) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("sample_value is monotone and pushes the uniform law to the spec") {
    const auto spec = MeasureSpec::create({{0.25, 0.2}, {0.5, 0.1}}, {{0.3, 0.45, 0.3}, {0.6, 0.9, 0.4}});
    constexpr int n = 100000;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = spec.sample_value((i + 0.5) / n);
    for (int i = 1; i < n; ++i) REQUIRE(xs[i - 1] <= xs[i]);

    Gen g(11);
    for (int trial = 0; trial < 200; ++trial) {
        double a = g.uniform(), b = g.uniform();
        if (a > b) std::swap(a, b);
        std::size_t hits = 0;
        for (double x : xs) hits += x > a && x <= b;
        const double want = spec.cdf(b) - spec.cdf(a);
        REQUIRE(std::abs(static_cast<double>(hits) / n - want) <= 1e-3);
    }
}

TEST_CASE("solomon_classify examples") {
    CHECK(solomon_classify(two_atoms(0.5)) == Verdict::recurrent);
    CHECK(solomon_classify(MeasureSpec::uniform(0.2, 0.8)) == Verdict::recurrent);
    CHECK(solomon_classify(two_atoms(0.25)) == Verdict::transient_right);
    CHECK(solomon_integral(two_atoms(0.25)) == doctest::Approx(-0.5 * std::log(7.0 / 3.0)).epsilon(1e-14));
    CHECK(solomon_classify(two_atoms(0.75)) == Verdict::transient_left);
    CHECK(solomon_classify(MeasureSpec::uniform(0.6, 0.9)) == Verdict::transient_right);
}

TEST_CASE("solomon integral matches numerical quadrature") {
    const MeasureSpec specs[] = {MeasureSpec::uniform(0.35, 0.65), MeasureSpec::uniform(0.6, 0.9),
                                 MeasureSpec::create({{0.5, 0.5}}, {{0.6, 0.8, 0.5}}),
                                 MeasureSpec::create({{0.1, 0.1}}, {{0.05, 0.2, 0.3}, {0.4, 0.95, 0.6}})};
    for (const auto& s : specs) CHECK(solomon_integral(s) == doctest::Approx(numeric_log_ratio(s)).epsilon(1e-8));
}

TEST_CASE("solomon_classify is relabeling invariant and recurrent under reflection symmetry") {
    Gen g(12);
    for (int trial = 0; trial < 100; ++trial) {
        const auto spec = random_atomic(g, 2 + g.below(4));
        auto atoms = spec.atoms();
        std::reverse(atoms.begin(), atoms.end());
        CHECK(solomon_classify(MeasureSpec::create(atoms)) == solomon_classify(spec));
        CHECK(solomon_integral(reflected(spec)) == doctest::Approx(-solomon_integral(spec)).epsilon(1e-12));

        // Symmetrize: half the mass on spec, half on its mirror.
        std::vector<Atom> sym;
        for (const auto& a : spec.atoms()) {
            sym.push_back({a.value, a.weight / 2});
            if (a.value != 0.5) sym.push_back({1.0 - a.value, a.weight / 2});
            else sym.back().weight = a.weight;
        }
        std::sort(sym.begin(), sym.end(), [](const Atom& x, const Atom& y) { return x.value < y.value; });
        std::vector<Atom> merged;
        for (const auto& a : sym) {
            if (!merged.empty() && merged.back().value == a.value) merged.back().weight += a.weight;
            else merged.push_back(a);
        }
        CHECK(solomon_classify(MeasureSpec::create(merged)) == Verdict::recurrent);
    }
}

TEST_CASE("reflected measure") {
    const auto spec = MeasureSpec::create({{0.3, 0.25}}, {{0.6, 0.9, 0.75}});
    const auto r = reflected(spec);
    CHECK(r.atom_weight(1.0 - 0.3) == 0.25);
    REQUIRE(r.pieces().size() == 1);
    CHECK(r.pieces()[0].lo == doctest::Approx(0.1));
    CHECK(r.pieces()[0].hi == doctest::Approx(0.4));
    CHECK(solomon_classify(r) == Verdict::transient_left);
}

TEST_CASE("atomic_tv_distance examples") {
    const auto mu = two_atoms(0.6);
    CHECK(atomic_tv_distance(mu, mu) == 0.0);
    CHECK(atomic_tv_distance(MeasureSpec::dirac(0.3), MeasureSpec::dirac(0.7)) == 1.0);
    CHECK(atomic_tv_distance(mu, two_atoms(0.5)) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK_THROWS_AS(atomic_tv_distance(mu, MeasureSpec::uniform(0.2, 0.8)), std::invalid_argument);
}

TEST_CASE("atomic_tv_distance is a metric on random triples") {
    Gen g(13);
    for (int trial = 0; trial < 300; ++trial) {
        // Shared grid of support points so supports overlap partially.
        auto pick = [&] {
            std::vector<Atom> atoms;
            const auto w = g.weights(3);
            const double grid[] = {0.1, 0.3, 0.5, 0.7, 0.9};
            std::size_t start = g.below(3);
            for (std::size_t i = 0; i < 3; ++i) atoms.push_back({grid[start + i], w[i]});
            return MeasureSpec::create(atoms);
        };
        const auto a = pick(), b = pick(), c = pick();
        const double ab = atomic_tv_distance(a, b), bc = atomic_tv_distance(b, c), ac = atomic_tv_distance(a, c);
        CHECK(ab == doctest::Approx(atomic_tv_distance(b, a)).epsilon(1e-15));
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0 + 1e-15);
        CHECK(ac <= ab + bc + 1e-12);
        CHECK(atomic_tv_distance(a, a) == 0.0);
    }
}

TEST_CASE("empirical_bl_distance examples") {
    const std::vector<double> same(7, 0.42);
    CHECK(empirical_bl_distance(same, MeasureSpec::dirac(0.42)) == 0.0);

    std::vector<double> mix(6, 0.3);
    mix.insert(mix.end(), 4, 0.7);
    CHECK(empirical_bl_distance(mix, two_atoms(0.6)) == doctest::Approx(0.0).epsilon(1e-15));

    Gen g(14);
    const auto u = MeasureSpec::uniform(0.2, 0.8);
    std::vector<double> draws(10000);
    for (auto& x : draws) x = u.sample_value(g.uniform());
    CHECK(empirical_bl_distance(draws, u) <= 0.03);

    CHECK_THROWS_AS(empirical_bl_distance(std::vector<double>{}, u), std::invalid_argument);
}

TEST_CASE("grid_cdf_distance between sample sets") {
    const std::vector<double> a{0.1, 0.2, 0.3, 0.4};
    CHECK(grid_cdf_distance(a, a) == 0.0);
    CHECK(grid_cdf_distance(std::vector<double>{0.2}, std::vector<double>{0.8}) == 1.0);
    CHECK(grid_cdf_distance(a, std::vector<double>{0.1, 0.2}) == doctest::Approx(0.5));
}

TEST_CASE("measure JSON round trip") {
    const auto spec = MeasureSpec::create({{0.5, 0.5}}, {{0.6, 0.8, 0.5}});
    const auto j = spec.to_json();
    CHECK(j.contains("atoms"));
    CHECK(j.contains("uniform_pieces"));
    CHECK(MeasureSpec::from_json(j) == spec);
    CHECK_THROWS(MeasureSpec::from_json(nlohmann::json::array()));
}
