#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "rwre/crossing.hpp"
#include "rwre/embedding.hpp"
#include "rwre/tree.hpp"

namespace rwre {

/// The unique tree walk T whose labels spell `xs`: from T(n), T(n+1) is the
/// neighbour labeled xi(n+1). `tree` must be rooted at the label of xi(0).
/// Throws SupportDriftError on values outside `alphabet`.
TreePath decode_T(std::span<const double> xs, const LabelAlphabet& alphabet, LabeledTree& tree);

/// Pattern (outer, inner, inner, outer) along a descending path; the
/// straight-crossing probability of its sets identifies the weight of `inner`.
struct LabelPair {
    Label outer = 0;
    Label inner = 0;
    friend bool operator==(const LabelPair&, const LabelPair&) = default;
};

struct PatternSet {
    enum class Status { open, scored };

    std::uint32_t id = 0;
    LabelPair pair;
    std::array<VertexId, 4> vertices{};
    std::size_t registered_at = 0;
    Status status = Status::open;
    std::optional<int> w;
};

/// One straightness indicator W_m: the first confined crossing of (v1, v4).
struct WRecord {
    std::uint32_t set_id = 0;
    LabelPair pair;
    int w = 0;
    std::size_t time_found = 0;
    std::size_t i1 = 0; // time at v1
    std::size_t i2 = 0; // time at v4
    CrossingSign sign = CrossingSign::positive;
};

/// Streaming pattern registration and indicator extraction over a decoded walk.
///
/// A vertex v1 is registered for (outer, inner) on T's first visit when it is
/// labeled `outer`, its parent (if any) is not labeled `inner`, and it is not
/// already part of another set; the set is v1 and its descending chain labeled
/// inner, inner, outer. Pairs are tried in the order given, so sets are
/// vertex-disjoint across all pairs of one scanner.
class IndicatorScanner {
public:
    IndicatorScanner(LabeledTree& tree, std::vector<LabelPair> pairs);

    /// Feed T(n); calls must use consecutive n starting at 0.
    void observe(VertexId v);

    std::size_t steps() const { return steps_; }
    const std::vector<PatternSet>& sets() const { return sets_; }
    const std::vector<WRecord>& indicators() const { return indicators_; }
    const std::vector<LabelPair>& pairs() const { return pairs_; }

private:
    struct Pending {
        std::uint8_t last_role = 0; // 0 none, 1 = v1, 4 = v4
        bool confined = true;
        std::size_t last_index = 0;
    };

    static constexpr std::int32_t kNoSet = -1;

    void ensure_capacity();
    void try_register(VertexId v);

    LabeledTree& tree_;
    std::vector<LabelPair> pairs_;
    std::vector<PatternSet> sets_;
    std::vector<Pending> pending_;
    std::vector<WRecord> indicators_;

    std::vector<std::int32_t> owner_;
    std::vector<std::uint8_t> role_;
    std::vector<bool> visited_;
    std::optional<VertexId> previous_;
    std::size_t steps_ = 0;
};

/// Convenience: register sets and score indicators over a whole T-path.
IndicatorScanner crossing_indicators(const TreePath& decoded, LabeledTree& tree, std::vector<LabelPair> pairs);

/// CSV with columns m, pair_eta_prime, pair_eta, w, time_found.
void write_wstream_csv(std::ostream& out, std::span<const WRecord> ws, const LabelAlphabet& alphabet);

} // namespace rwre
