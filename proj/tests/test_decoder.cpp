#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "rwre/crossing.hpp"
#include "rwre/decoder.hpp"
#include "rwre/embedding.hpp"
#include "rwre/errors.hpp"
#include "rwre/tree.hpp"

using namespace rwre;
using rwre::test::Gen;

namespace {

constexpr double e0 = 0.3; // eta_0
constexpr double e1 = 0.7; // eta_1

// Worked two-label example.
const std::vector<double> kOmega{e0, e0, e1, e0, e1, e1, e0, e0, e0, e1, e0};
const std::vector<Site> kX{0, 1, 2, 3, 4, 3, 4, 5, 6, 7, 6};
const std::vector<double> kXi{e0, e0, e1, e0, e1, e0, e1, e1, e0, e0, e0};
const std::vector<std::int64_t> kR{0, 1, 2, 1, 2, 3, 4, 5, 4, 3, 4};
const std::vector<std::int64_t> kT{0, 1, 2, 1, 2, 1, 2, 3, 4, 5, 4};

const double kAlpha[] = {e0, e1};

std::vector<std::int64_t> positions(const TreePath& p, const LabeledTree& tree) {
    std::vector<std::int64_t> out;
    for (auto v : p.vertices) out.push_back(tree.line_position(v));
    return out;
}

auto line_distance = [](std::int64_t a, std::int64_t b) { return static_cast<std::size_t>(std::abs(a - b)); };

bool has_crossing(const std::vector<CrossingRecord<std::int64_t>>& cs, std::size_t i1, std::size_t i2, bool straight) {
    for (const auto& c : cs)
        if (c.i1 == i1 && c.i2 == i2) return c.straight == straight;
    return false;
}

} // namespace

TEST_CASE("labeled tree neighbour rule") {
    LabeledTree tree(3, 1);
    const auto r = tree.root();
    CHECK(tree.label(r) == 1);
    CHECK_FALSE(tree.parent(r));
    const auto a = tree.neighbor(r, 1); // root has a child with its own label
    CHECK(tree.label(a) == 1);
    CHECK(tree.depth(a) == 1);
    CHECK(tree.neighbor(a, 1) == r); // parent carries label 1
    const auto b = tree.neighbor(a, 0);
    CHECK(tree.parent(b) == a);
    CHECK(tree.neighbor(b, 1) == a);
    CHECK(tree.neighbor(b, 0) != a);
    CHECK(tree.distance(r, b) == 2);
    CHECK(tree.distance(b, tree.neighbor(r, 2)) == 3);
    CHECK(tree.label_path(b) == std::vector<Label>{1, 0});
    CHECK(tree.branch(b) == 1);
    CHECK(tree.neighbor(r, 0) == tree.neighbor(r, 0)); // ids are canonical
}

TEST_CASE("two-label tree is the line with period-4 labels") {
    LabeledTree tree(2, 0);
    // Walk right: labels along positive positions are 0,0,1,1,0,0,1,1,...
    VertexId v = tree.root();
    const Label right[] = {0, 1, 1, 0, 0, 1, 1, 0};
    for (std::size_t i = 0; i < 8; ++i) {
        v = tree.neighbor(v, right[i]);
        CHECK(tree.line_position(v) == static_cast<std::int64_t>(i + 1));
    }
    v = tree.root();
    const Label left[] = {1, 1, 0, 0, 1, 1};
    for (std::size_t i = 0; i < 6; ++i) {
        v = tree.neighbor(v, left[i]);
        CHECK(tree.line_position(v) == -static_cast<std::int64_t>(i + 1));
    }
}

TEST_CASE("worked two-label example: embed_R, compose_T and decode_T") {
    const LabelAlphabet alpha(kAlpha);
    LabeledTree tree(2, alpha.label_of(kOmega[0]));
    const auto r = embed_R(EnvironmentWindow{0, kOmega}, alpha, tree);
    CHECK(positions(r, tree) == kR);

    const auto t = compose_T(r, Trajectory{kX});
    CHECK(positions(t, tree) == kT);

    const auto d = decode_T(kXi, alpha, tree);
    CHECK(d.vertices == t.vertices);
    for (std::size_t n = 0; n < d.vertices.size(); ++n) CHECK(alpha.value(tree.label(d.vertices[n])) == kXi[n]);
}

TEST_CASE("worked two-label example: crossings of R and T") {
    const auto r_cross = find_crossings<std::int64_t>(kR, 0, 3, line_distance);
    CHECK(has_crossing(r_cross, 0, 5, false));
    const auto r25 = find_crossings<std::int64_t>(kR, 2, 5, line_distance);
    CHECK(has_crossing(r25, 4, 7, true));
    const auto t25 = find_crossings<std::int64_t>(kT, 2, 5, line_distance);
    CHECK(has_crossing(t25, 6, 9, true));
    // Negative crossing: 5 at index 7 back to 3 at 9 is a crossing of (3,5) with i1 = 9.
    const auto r35 = find_crossings<std::int64_t>(kR, 3, 5, line_distance);
    REQUIRE(r35.size() == 2);
    CHECK(r35[1].i1 == 9);
    CHECK(r35[1].i2 == 7);
    CHECK(r35[1].sign == CrossingSign::negative);
    CHECK(r35[1].straight);
    CHECK(find_crossings<std::int64_t>(kR, 2, 2, line_distance).empty());
}

TEST_CASE("find_crossings confinement flag") {
    const std::vector<std::int64_t> path{0, 1, -1, 0, 1, 2, 3};
    auto inside = [](std::int64_t p) { return p >= 0 && p <= 3; };
    const auto cs = find_crossings<std::int64_t>(path, 0, 3, line_distance, inside);
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].i1 == 3);
    CHECK(cs[0].confined);
    CHECK(cs[0].straight);
    const std::vector<std::int64_t> detour{0, 1, 2, 5, 2, 3};
    const auto d = find_crossings<std::int64_t>(detour, 0, 3, line_distance, inside);
    REQUIRE(d.size() == 1);
    CHECK_FALSE(d[0].confined);
}

TEST_CASE("decode_T: immediate backtrack and support drift") {
    const LabelAlphabet alpha(kAlpha);
    LabeledTree tree(2, 0);
    const std::vector<double> xs{e0, e1, e0};
    const auto t = decode_T(xs, alpha, tree);
    CHECK(tree.line_position(t.vertices[1]) == -1);
    CHECK(t.vertices[2] == tree.root());

    LabeledTree t2(2, 0);
    const std::vector<double> drift{e0, e1, 0.5};
    CHECK_THROWS_AS(decode_T(drift, alpha, t2), SupportDriftError);
    LabeledTree t3(2, 1);
    CHECK_THROWS_AS(decode_T(xs, alpha, t3), std::invalid_argument);
}

TEST_CASE("embed_R rejects bad windows") {
    const LabelAlphabet alpha(kAlpha);
    LabeledTree tree(2, 0);
    CHECK_THROWS_AS(embed_R(EnvironmentWindow{0, {e0, 0.5}}, alpha, tree), SupportDriftError);
    CHECK_THROWS_AS(embed_R(EnvironmentWindow{0, {e1, e0}}, alpha, tree), std::invalid_argument);
    CHECK_THROWS_AS(embed_R(EnvironmentWindow{1, {e0, e0}}, alpha, tree), std::invalid_argument);
    const auto r = embed_R(EnvironmentWindow{0, {e0, e0}}, alpha, tree);
    CHECK(r.vertices.front() == tree.root());
    CHECK(tree.parent(r.vertices[1]) == tree.root());
    CHECK(tree.label(r.vertices[1]) == 0);
    CHECK_THROWS_AS(compose_T(r, Trajectory{{0, 1, 2}}), std::out_of_range);
}

TEST_CASE("property: random windows embed with matching labels and adjacent steps") {
    Gen g(21);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + g.below(4);
        std::vector<double> values;
        for (std::size_t i = 0; i < n; ++i) values.push_back(0.1 + 0.8 * static_cast<double>(i) / n);
        const LabelAlphabet alpha(values);
        const Site first = -static_cast<Site>(g.below(50));
        EnvironmentWindow w{first, {}};
        for (int k = 0; k < 120; ++k) w.values.push_back(values[g.below(n)]);
        LabeledTree tree(n, alpha.label_of(w.at(0)));
        const auto r = embed_R(w, alpha, tree);
        CHECK(r.first_index == first);
        CHECK(r.at(0) == tree.root());
        for (Site z = w.first_site; z <= w.last_site(); ++z) {
            REQUIRE(alpha.value(tree.label(r.at(z))) == w.at(z));
            if (z > w.first_site) REQUIRE(tree.distance(r.at(z - 1), r.at(z)) == 1);
        }
    }
}

TEST_CASE("property: decoded walk spells xi and moves to adjacent vertices") {
    Gen g(22);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + g.below(5);
        std::vector<double> values;
        for (std::size_t i = 0; i < n; ++i) values.push_back(0.05 + 0.9 * static_cast<double>(i) / n);
        const LabelAlphabet alpha(values);
        std::vector<double> xs;
        for (int k = 0; k < 2000; ++k) xs.push_back(values[g.below(n)]);
        LabeledTree tree(n, alpha.label_of(xs[0]));
        const auto t = decode_T(xs, alpha, tree);
        REQUIRE(t.vertices.size() == xs.size());
        for (std::size_t k = 0; k < xs.size(); ++k) {
            REQUIRE(alpha.value(tree.label(t.vertices[k])) == xs[k]);
            if (k) REQUIRE(tree.distance(t.vertices[k - 1], t.vertices[k]) == 1);
        }
    }
}

TEST_CASE("pattern sets on the line sit at arithmetic positions") {
    // T sweeps the line far in both directions.
    const LabelAlphabet alpha(kAlpha);
    LabeledTree tree(2, 0);
    std::vector<VertexId> walk{tree.root()};
    auto step_to = [&](std::int64_t target) {
        while (tree.line_position(walk.back()) != target) {
            const auto v = walk.back();
            const auto pos = tree.line_position(v);
            const std::int64_t next = pos + (target > pos ? 1 : -1);
            for (Label l : {0u, 1u}) {
                const auto w = tree.neighbor(v, l);
                if (tree.line_position(w) == next) {
                    walk.push_back(w);
                    break;
                }
            }
        }
    };
    step_to(40);
    step_to(-40);
    IndicatorScanner scan(tree, {{0, 1}});
    for (auto v : walk) scan.observe(v);

    std::vector<std::int64_t> pos_starts, neg_starts;
    for (const auto& s : scan.sets()) {
        const auto p1 = tree.line_position(s.vertices[0]);
        for (std::size_t r = 1; r < 4; ++r)
            CHECK(std::abs(tree.line_position(s.vertices[r])) == std::abs(p1) + static_cast<std::int64_t>(r));
        CHECK(tree.label(s.vertices[0]) == 0);
        CHECK(tree.label(s.vertices[1]) == 1);
        CHECK(tree.label(s.vertices[2]) == 1);
        CHECK(tree.label(s.vertices[3]) == 0);
        (p1 > 0 ? pos_starts : neg_starts).push_back(p1);
    }
    std::sort(pos_starts.begin(), pos_starts.end());
    std::sort(neg_starts.begin(), neg_starts.end(), std::greater<>());
    REQUIRE(pos_starts.size() >= 9);
    for (std::size_t m = 0; m < pos_starts.size(); ++m) CHECK(pos_starts[m] == static_cast<std::int64_t>(4 * m + 1));
    // The root is labeled eta_0 with no parent, so the negative ray starts at 0.
    REQUIRE(neg_starts.size() >= 9);
    for (std::size_t m = 0; m < neg_starts.size(); ++m) CHECK(neg_starts[m] == -static_cast<std::int64_t>(4 * m));
    CHECK(tree.line_position(scan.sets().front().vertices[0]) == 0);
}

TEST_CASE("worked two-label example: first confined crossing of the set at 1..4 is straight") {
    const LabelAlphabet alpha(kAlpha);
    LabeledTree tree(2, 0);
    const auto t = decode_T(kXi, alpha, tree);
    const auto scan = crossing_indicators(t, tree, {{0, 1}});
    const WRecord* w = nullptr;
    for (const auto& rec : scan.indicators())
        if (tree.line_position(scan.sets()[rec.set_id].vertices[0]) == 1) w = &rec;
    REQUIRE(w != nullptr);
    CHECK(w->i1 == 5);
    CHECK(w->i2 == 8);
    CHECK(w->w == 1);
    CHECK(w->time_found == 8);
    CHECK(w->sign == CrossingSign::positive);

    std::ostringstream csv;
    write_wstream_csv(csv, scan.indicators(), alpha);
    CHECK(csv.str().rfind("m,pair_eta_prime,pair_eta,w,time_found\n", 0) == 0);
    CHECK(csv.str().find(",0.3,0.7,1,8") != std::string::npos);
}

TEST_CASE("a bent confined crossing scores zero and an uncrossed set stays open") {
    const LabelAlphabet alpha(kAlpha);
    // Line positions 0,1,2,1,2,3,2,3,4.
    const std::vector<double> xs{e0, e0, e1, e0, e1, e1, e1, e1, e0};
    LabeledTree tree(2, 0);
    const auto scan = crossing_indicators(decode_T(xs, alpha, tree), tree, {{0, 1}});
    REQUIRE(scan.indicators().size() == 1);
    CHECK(scan.indicators()[0].i1 == 3);
    CHECK(scan.indicators()[0].i2 == 8);
    CHECK(scan.indicators()[0].w == 0);

    LabeledTree t2(2, 0);
    const std::vector<double> short_walk{e0, e0, e1};
    const auto open = crossing_indicators(decode_T(short_walk, alpha, t2), t2, {{0, 1}});
    CHECK(open.indicators().empty());
    CHECK_FALSE(open.sets().empty());
    for (const auto& s : open.sets()) CHECK(s.status == PatternSet::Status::open);
}

TEST_CASE("an unconfined crossing is ignored") {
    const LabelAlphabet alpha(std::vector<double>{0.2, 0.5, 0.8});
    LabeledTree tree(3, 0);
    // v1 = root, v2 = child 1, v3 = its child 1, v4 = its child 0; leave v2 sideways through label 2.
    std::vector<VertexId> walk{tree.root()};
    auto go = [&](Label l) { walk.push_back(tree.neighbor(walk.back(), l)); };
    go(1); go(2); go(1); go(1); go(0);
    IndicatorScanner scan(tree, {{0, 1}});
    for (auto v : walk) scan.observe(v);
    CHECK(scan.indicators().empty());
    // Back to v1 and straight across: now a confined straight crossing.
    go(1); go(1); go(0); go(1); go(1); go(0);
    for (std::size_t n = scan.steps(); n < walk.size(); ++n) scan.observe(walk[n]);
    REQUIRE(scan.indicators().size() == 1);
    CHECK(scan.indicators()[0].w == 1);
    CHECK(scan.indicators()[0].sign == CrossingSign::negative);
}

TEST_CASE("pattern registry is prefix stable") {
    Gen g(23);
    const std::vector<double> values{0.25, 0.5, 0.75};
    const LabelAlphabet alpha(values);
    std::vector<double> xs;
    for (int k = 0; k < 30000; ++k) xs.push_back(values[g.below(3)]);
    const std::size_t cut = 10000;

    LabeledTree ta(3, alpha.label_of(xs[0]));
    const auto short_run = crossing_indicators(decode_T(std::span(xs).first(cut), alpha, ta), ta, {{0, 1}, {2, 1}});
    LabeledTree tb(3, alpha.label_of(xs[0]));
    const auto long_run = crossing_indicators(decode_T(xs, alpha, tb), tb, {{0, 1}, {2, 1}});

    REQUIRE(long_run.sets().size() >= short_run.sets().size());
    for (std::size_t i = 0; i < short_run.sets().size(); ++i) {
        const auto& a = short_run.sets()[i];
        const auto& b = long_run.sets()[i];
        CHECK(a.pair == b.pair);
        CHECK(a.registered_at == b.registered_at);
        for (std::size_t r = 0; r < 4; ++r) CHECK(ta.label_path(a.vertices[r]) == tb.label_path(b.vertices[r]));
    }
    for (std::size_t i = 0; i < short_run.indicators().size(); ++i) {
        CHECK(short_run.indicators()[i].w == long_run.indicators()[i].w);
        CHECK(short_run.indicators()[i].time_found == long_run.indicators()[i].time_found);
    }
}

TEST_CASE("pattern sets in one scanner are vertex disjoint") {
    Gen g(24);
    const std::vector<double> values{0.2, 0.4, 0.6, 0.8};
    const LabelAlphabet alpha(values);
    std::vector<double> xs;
    for (int k = 0; k < 20000; ++k) xs.push_back(values[g.below(4)]);
    LabeledTree tree(4, alpha.label_of(xs[0]));
    const auto scan = crossing_indicators(decode_T(xs, alpha, tree), tree, {{0, 1}, {1, 2}, {3, 0}});
    std::set<std::uint32_t> used;
    for (const auto& s : scan.sets()) {
        for (std::size_t r = 0; r < 4; ++r) {
            CHECK(used.insert(s.vertices[r].index).second);
            if (r) CHECK(tree.depth(s.vertices[r]) == tree.depth(s.vertices[r - 1]) + 1);
        }
        if (auto p = tree.parent(s.vertices[0])) CHECK(tree.label(*p) != s.pair.inner);
    }
}
