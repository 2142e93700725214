#include "rwre/marker.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <memory>
#include <unordered_set>

#include "rwre/errors.hpp"

namespace rwre {

namespace {

std::uint64_t bits_of(double v) { return std::bit_cast<std::uint64_t>(v); }

} // namespace

std::vector<MarkerSample> extract_marker_samples(std::span<const double> xs, const SupportReport& report) {
    std::vector<MarkerSample> out;
    const auto ids = report.ids();
    const std::size_t n = std::min(xs.size(), ids.size());
    std::size_t m = 2;
    while (m < n) {
        const ValueId a = ids[m - 2];
        const ValueId b = ids[m - 1];
        const bool fresh = report.first_seen(a) == m - 2 && report.first_seen(b) == m - 1;
        if (fresh && !report.is_atomic(a) && !report.is_atomic(b) && ids[m] != a) {
            out.push_back({m, xs[m], {xs[m - 2], xs[m - 1]}});
            m += 3;
        } else {
            ++m;
        }
    }
    return out;
}

double EmpiricalMeasure::continuous_weight() const {
    return sample_count == 0 ? 0.0 : static_cast<double>(continuous.size()) / static_cast<double>(sample_count);
}

double EmpiricalMeasure::atom_weight(double value) const {
    for (const auto& a : atoms)
        if (a.value == value) return a.weight;
    return 0.0;
}

MeasureSpec EmpiricalMeasure::to_spec() const {
    constexpr double kEdge = 0x1.0p-20;
    std::vector<UniformPiece> pieces;
    const double n = static_cast<double>(sample_count);
    for (std::size_t k = 0; k < kHistogramBins; ++k) {
        if (histogram[k] == 0) continue;
        const double lo = std::max(static_cast<double>(k) / kHistogramBins, kEdge);
        const double hi = std::min(static_cast<double>(k + 1) / kHistogramBins, 1.0 - kEdge);
        pieces.push_back({lo, hi, static_cast<double>(histogram[k]) / n});
    }
    return MeasureSpec::create(atoms, std::move(pieces));
}

nlohmann::json EmpiricalMeasure::to_json() const {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& x : atoms) a.push_back({{"value", x.value}, {"weight", x.weight}});
    return {{"sample_count", sample_count},
            {"atoms", a},
            {"continuous_weight", continuous_weight()},
            {"histogram", histogram},
            {"continuous_samples", continuous}};
}

EmpiricalMeasure empirical_measure(std::span<const MarkerSample> samples) {
    if (samples.empty()) throw InsufficientDataError("empirical measure needs at least one sample");
    EmpiricalMeasure em;
    em.sample_count = samples.size();
    std::unordered_map<std::uint64_t, std::size_t> counts;
    for (const auto& s : samples) {
        ++counts[bits_of(s.value)];
        em.samples.push_back(s.value);
    }
    const double n = static_cast<double>(samples.size());
    std::unordered_set<std::uint64_t> emitted;
    for (const auto& s : samples) {
        const auto c = counts[bits_of(s.value)];
        if (c >= 2) {
            if (emitted.insert(bits_of(s.value)).second) em.atoms.push_back({s.value, static_cast<double>(c) / n});
        } else {
            em.continuous.push_back(s.value);
            const auto bin = std::min<std::size_t>(kHistogramBins - 1, static_cast<std::size_t>(s.value * kHistogramBins));
            ++em.histogram[bin];
        }
    }
    std::sort(em.atoms.begin(), em.atoms.end(), [](const Atom& x, const Atom& y) { return x.value < y.value; });
    return em;
}

nlohmann::json RecurrenceReport::to_json() const {
    nlohmann::json t = nlohmann::json::array();
    for (const auto& m : tracked)
        t.push_back({{"value", m.value},
                     {"first_seen", m.first_seen},
                     {"reappearances", m.reappearances},
                     {"reappearances_in_final_window", m.reappearances_in_final_window}});
    return {{"evidence", evidence == RecurrenceEvidence::recurrent ? "recurrent_evidence" : "transient_evidence"},
            {"final_window_start", final_window_start},
            {"tracked", t}};
}

RecurrenceReport marker_recurrence_report(std::span<const double> xs, const SupportReport& report,
                                          std::span<const MarkerSample> samples, RecurrenceOptions options) {
    if (samples.empty()) throw InsufficientDataError("recurrence report needs at least one marker sample");
    RecurrenceReport r;
    const auto len = xs.size();
    r.final_window_start = static_cast<std::size_t>(std::floor(static_cast<double>(len) * (1.0 - options.final_window_fraction)));

    std::unordered_set<std::uint64_t> tracked;
    for (const auto& s : samples) {
        for (double v : s.marker_values) {
            if (tracked.size() >= options.tracked_markers) break;
            if (!tracked.insert(bits_of(v)).second) continue;
            TrackedMarker tm;
            tm.value = v;
            if (auto id = report.id_of(v)) {
                const auto occ = report.occurrences(*id);
                tm.first_seen = report.first_seen(*id);
                tm.reappearances = occ.size() - 1;
                for (auto idx : occ.subspan(1))
                    if (idx >= r.final_window_start) ++tm.reappearances_in_final_window;
            }
            r.tracked.push_back(tm);
        }
        if (tracked.size() >= options.tracked_markers) break;
    }
    const bool recurs = std::any_of(r.tracked.begin(), r.tracked.end(),
                                    [](const TrackedMarker& m) { return m.reappearances_in_final_window > 0; });
    r.evidence = recurs ? RecurrenceEvidence::recurrent : RecurrenceEvidence::transient;
    return r;
}

EnvBlock minimal_word(std::span<const double> xs, const SupportReport& report, double a, double b) {
    const auto ida = report.id_of(a);
    const auto idb = report.id_of(b);
    if (!ida || !idb || *ida == *idb) throw Error("anchors never linked");
    const auto oa = report.occurrences(*ida);
    const auto ob = report.occurrences(*idb);

    std::size_t best_len = std::numeric_limits<std::size_t>::max();
    std::size_t best_start = 0;
    bool best_from_a = true;
    // Merge the two sorted occurrence lists; each adjacent a/b alternation is a word.
    std::size_t i = 0, j = 0;
    std::optional<std::pair<std::size_t, bool>> prev; // (index, is_a)
    while (i < oa.size() || j < ob.size()) {
        const bool take_a = j == ob.size() || (i < oa.size() && oa[i] < ob[j]);
        const std::size_t idx = take_a ? oa[i++] : ob[j++];
        if (prev && prev->second != take_a) {
            const std::size_t len = idx - prev->first;
            if (len < best_len) {
                best_len = len;
                best_start = prev->first;
                best_from_a = prev->second;
            }
        }
        prev = std::pair{idx, take_a};
    }
    if (best_len == std::numeric_limits<std::size_t>::max()) throw Error("anchors never linked");

    EnvBlock block;
    block.start = a;
    block.end = b;
    block.observed_at = best_start;
    block.reversed = !best_from_a;
    block.values.assign(xs.begin() + static_cast<std::ptrdiff_t>(best_start),
                        xs.begin() + static_cast<std::ptrdiff_t>(best_start + best_len + 1));
    if (block.reversed) std::reverse(block.values.begin(), block.values.end());

    std::unordered_set<std::uint64_t> seen;
    block.straight_certified = true;
    for (double v : block.values) {
        if (report.is_atomic_value(v)) continue;
        if (!seen.insert(bits_of(v)).second) {
            block.straight_certified = false;
            break;
        }
    }
    return block;
}

std::string_view to_string(Orientation o) {
    switch (o) {
    case Orientation::as_is: return "as_is";
    case Orientation::reflected: return "reflected";
    case Orientation::undecided: return "undecided";
    }
    return "undecided";
}

LineAssembly::LineAssembly(AtomPredicate is_atomic) : is_atomic_(std::move(is_atomic)) {}

std::optional<std::int64_t> LineAssembly::position_of(double value) const {
    auto it = coordinate_.find(bits_of(value));
    if (it == coordinate_.end()) return std::nullopt;
    return it->second;
}

std::optional<double> LineAssembly::value_at(std::int64_t pos) const {
    auto it = sites_.find(pos);
    if (it == sites_.end()) return std::nullopt;
    return it->second;
}

std::pair<std::int64_t, std::size_t> LineAssembly::longest_run() const {
    std::pair<std::int64_t, std::size_t> best{0, 0};
    std::int64_t run_start = 0;
    std::size_t run_len = 0;
    std::optional<std::int64_t> last;
    for (const auto& [pos, _] : sites_) {
        if (last && pos == *last + 1) {
            ++run_len;
        } else {
            run_start = pos;
            run_len = 1;
        }
        if (run_len > best.second) best = {run_start, run_len};
        last = pos;
    }
    return best;
}

bool LineAssembly::fits(const EnvBlock& block, std::size_t anchor_index, std::int64_t anchor_pos, int dir,
                        std::size_t& new_sites) const {
    new_sites = 0;
    std::unordered_map<std::uint64_t, std::int64_t> local;
    for (std::size_t i = 0; i < block.values.size(); ++i) {
        const double v = block.values[i];
        const std::int64_t pos = anchor_pos + dir * (static_cast<std::int64_t>(i) - static_cast<std::int64_t>(anchor_index));
        if (auto existing = value_at(pos)) {
            if (bits_of(*existing) != bits_of(v)) return false;
        } else {
            ++new_sites;
        }
        if (is_atomic(v)) continue;
        if (auto p = position_of(v); p && *p != pos) return false;
        if (auto [it, inserted] = local.try_emplace(bits_of(v), pos); !inserted && it->second != pos) return false;
    }
    return true;
}

void LineAssembly::place(const EnvBlock& block, std::size_t anchor_index, std::int64_t anchor_pos, int dir) {
    for (std::size_t i = 0; i < block.values.size(); ++i) {
        const double v = block.values[i];
        const std::int64_t pos = anchor_pos + dir * (static_cast<std::int64_t>(i) - static_cast<std::int64_t>(anchor_index));
        sites_[pos] = v;
        if (!is_atomic(v)) coordinate_.emplace(bits_of(v), pos);
    }
}

void LineAssembly::merge(const EnvBlock& block) {
    if (block.values.empty()) return;
    std::size_t added = 0;
    if (sites_.empty()) {
        if (!fits(block, 0, 0, +1, added)) throw InconsistentBlocksError();
        origin_value_ = block.values.front();
        place(block, 0, 0, +1);
        return;
    }

    // Align on a shared non-atomic value, endpoints first.
    std::vector<std::size_t> order{0, block.values.size() - 1};
    for (std::size_t i = 1; i + 1 < block.values.size(); ++i) order.push_back(i);
    std::optional<std::size_t> anchor;
    for (auto i : order) {
        if (!is_atomic(block.values[i]) && position_of(block.values[i])) {
            anchor = i;
            break;
        }
    }
    if (!anchor) throw Error("block shares no value with the assembly");
    const auto anchor_pos = *position_of(block.values[*anchor]);

    std::size_t added_fwd = 0, added_rev = 0;
    const bool fwd = fits(block, *anchor, anchor_pos, +1, added_fwd);
    const bool rev = fits(block, *anchor, anchor_pos, -1, added_rev);
    if (!fwd && !rev) throw InconsistentBlocksError();
    // Both orientations fit only when atoms make the overlap ambiguous; the one
    // that adds nothing is then the containment reading.
    int dir = fwd ? +1 : -1;
    if (fwd && rev && added_rev == 0 && added_fwd != 0) dir = -1;
    place(block, *anchor, anchor_pos, dir);
}

nlohmann::json LineAssembly::to_json() const {
    nlohmann::json s = nlohmann::json::array();
    for (const auto& [pos, v] : sites_) s.push_back({{"pos", pos}, {"value", v}});
    return {{"origin_value", origin_value_}, {"sites", s}, {"orientation", std::string(to_string(orientation))}};
}

LineAssembly assemble_environment(std::span<const EnvBlock> blocks, LineAssembly::AtomPredicate is_atomic) {
    LineAssembly line(std::move(is_atomic));
    for (const auto& b : blocks) line.merge(b);
    return line;
}

OrientationResult orient_environment(const LineAssembly& assembly, std::span<const double> xs,
                                     const SupportReport& report) {
    OrientationResult res;
    std::map<std::int64_t, SiteDepartures> tally;
    for (std::size_t n = 0; n + 1 < xs.size(); ++n) {
        const double v = xs[n];
        if (report.is_atomic_value(v)) continue;
        const auto pos = assembly.position_of(v);
        if (!pos) continue;
        const auto plus = assembly.value_at(*pos + 1);
        const auto minus = assembly.value_at(*pos - 1);
        const double next = xs[n + 1];
        const bool eq_plus = plus && bits_of(*plus) == bits_of(next);
        const bool eq_minus = minus && bits_of(*minus) == bits_of(next);
        int dir = 0;
        if (eq_plus && !eq_minus)
            dir = +1;
        else if (eq_minus && !eq_plus)
            dir = -1;
        else if (!eq_plus && !eq_minus && plus)
            dir = -1;
        else if (!eq_plus && !eq_minus && minus)
            dir = +1;
        if (dir == 0) continue;

        auto& t = tally[*pos];
        t.position = *pos;
        t.value = v;
        ++t.departures;
        if (dir > 0) ++t.toward_increasing;
        if (std::abs(v - 0.5) > 0.05) res.score += dir * std::log(v / (1.0 - v));
    }
    for (auto& [_, t] : tally) res.per_site.push_back(t);
    if (res.score > 0)
        res.orientation = Orientation::as_is;
    else if (res.score < 0)
        res.orientation = Orientation::reflected;
    return res;
}

LineReconstruction reconstruct_line(std::span<const double> xs, const SupportReport& report,
                                    LineReconstructionOptions options) {
    std::vector<ValueId> candidates;
    for (ValueId id = 0; id < report.seen_count(); ++id)
        if (!report.is_atomic(id)) candidates.push_back(id);
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](ValueId x, ValueId y) { return report.count(x) > report.count(y); });
    if (candidates.size() > options.max_anchors) candidates.resize(options.max_anchors);
    if (candidates.size() < 2) throw InsufficientDataError("need two non-atomic anchors");

    auto atom_bits = std::make_shared<std::unordered_set<std::uint64_t>>();
    for (double v : report.atoms()) atom_bits->insert(bits_of(v));
    LineReconstruction out{LineAssembly([atom_bits](double v) { return atom_bits->contains(bits_of(v)); }), {}, {}, {}};
    auto try_block = [&](double from, double to) -> std::optional<EnvBlock> {
        try {
            auto block = minimal_word(xs, report, from, to);
            if (block.straight_certified) return block;
        } catch (const Error&) {
        }
        return std::nullopt;
    };

    // Certified words between every pair of candidates, computed once.
    const std::size_t c = candidates.size();
    std::vector<std::optional<EnvBlock>> words(c * c);
    for (std::size_t i = 0; i < c; ++i)
        for (std::size_t j = i + 1; j < c; ++j)
            words[i * c + j] = try_block(report.value(candidates[i]), report.value(candidates[j]));

    // Grow from the most frequent value, always attaching the unplaced
    // candidate with the shortest certified word to a placed anchor.
    std::vector<bool> placed(c, false);
    std::vector<std::size_t> anchor_index{0};
    placed[0] = true;
    out.anchors.push_back(report.value(candidates[0]));
    for (;;) {
        const EnvBlock* best = nullptr;
        for (std::size_t a : anchor_index) {
            for (std::size_t k = 0; k < c; ++k) {
                if (placed[k]) continue;
                const auto& w = words[std::min(a, k) * c + std::max(a, k)];
                if (w && (!best || w->values.size() < best->values.size())) best = &*w;
            }
        }
        if (!best) break;
        out.assembly.merge(*best);
        out.blocks.push_back(*best);
        for (std::size_t k = 0; k < c; ++k) {
            if (placed[k] || !out.assembly.position_of(report.value(candidates[k]))) continue;
            placed[k] = true;
            anchor_index.push_back(k);
            out.anchors.push_back(report.value(candidates[k]));
        }
    }
    if (out.blocks.empty()) throw InsufficientDataError("no pair of anchors linked by a straight word");
    out.orientation = orient_environment(out.assembly, xs, report);
    out.assembly.orientation = out.orientation.orientation;
    return out;
}

} // namespace rwre
