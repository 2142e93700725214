#include "rwre/decoder.hpp"

#include <array>
#include <charconv>
#include <ostream>
#include <stdexcept>

namespace rwre {

TreePath decode_T(std::span<const double> xs, const LabelAlphabet& alphabet, LabeledTree& tree) {
    TreePath t;
    t.role = TreePath::Role::t_path;
    if (xs.empty()) return t;
    if (alphabet.label_of(xs[0]) != tree.label(tree.root()))
        throw std::invalid_argument("tree must be rooted at the label of xi(0)");
    t.vertices.reserve(xs.size());
    VertexId v = tree.root();
    t.vertices.push_back(v);
    for (std::size_t n = 1; n < xs.size(); ++n) {
        v = tree.neighbor(v, alphabet.label_of(xs[n]));
        t.vertices.push_back(v);
    }
    return t;
}

IndicatorScanner::IndicatorScanner(LabeledTree& tree, std::vector<LabelPair> pairs)
    : tree_(tree), pairs_(std::move(pairs)) {
    for (const auto& p : pairs_) {
        if (p.outer == p.inner) throw std::invalid_argument("pattern labels must differ");
        if (p.outer >= tree.label_count() || p.inner >= tree.label_count())
            throw std::invalid_argument("pattern label out of range");
    }
}

void IndicatorScanner::ensure_capacity() {
    const auto n = tree_.size();
    if (owner_.size() < n) {
        owner_.resize(n, kNoSet);
        role_.resize(n, 0);
        visited_.resize(n, false);
    }
}

void IndicatorScanner::try_register(VertexId v) {
    if (owner_[v.index] != kNoSet) return;
    const auto parent = tree_.parent(v);
    for (const auto& pair : pairs_) {
        if (tree_.label(v) != pair.outer) continue;
        if (parent && tree_.label(*parent) == pair.inner) continue;

        PatternSet s;
        s.id = static_cast<std::uint32_t>(sets_.size());
        s.pair = pair;
        s.registered_at = steps_;
        s.vertices[0] = v;
        s.vertices[1] = tree_.neighbor(v, pair.inner);
        s.vertices[2] = tree_.neighbor(s.vertices[1], pair.inner);
        s.vertices[3] = tree_.neighbor(s.vertices[2], pair.outer);
        ensure_capacity();
        for (std::uint8_t r = 0; r < 4; ++r) {
            owner_[s.vertices[r].index] = static_cast<std::int32_t>(s.id);
            role_[s.vertices[r].index] = r + 1;
        }
        sets_.push_back(s);
        pending_.emplace_back();
        return;
    }
}

void IndicatorScanner::observe(VertexId v) {
    ensure_capacity();
    const std::size_t n = steps_;

    // Leaving a set through a side branch of v2 or v3 breaks confinement.
    if (previous_) {
        const auto ps = owner_[previous_->index];
        const auto pr = role_[previous_->index];
        if (ps != kNoSet && (pr == 2 || pr == 3) && owner_[v.index] != ps) pending_[ps].confined = false;
    }

    if (!visited_[v.index]) {
        visited_[v.index] = true;
        try_register(v);
    }

    const auto s = owner_[v.index];
    const auto role = role_[v.index];
    if (s != kNoSet && (role == 1 || role == 4) && sets_[s].status == PatternSet::Status::open) {
        auto& p = pending_[s];
        if (p.last_role != 0 && p.last_role != role && p.confined) {
            WRecord rec;
            rec.set_id = static_cast<std::uint32_t>(s);
            rec.pair = sets_[s].pair;
            rec.time_found = n;
            rec.i1 = role == 4 ? p.last_index : n;
            rec.i2 = role == 4 ? n : p.last_index;
            rec.sign = rec.i1 < rec.i2 ? CrossingSign::positive : CrossingSign::negative;
            rec.w = (n - p.last_index) == 3 ? 1 : 0;
            sets_[s].status = PatternSet::Status::scored;
            sets_[s].w = rec.w;
            indicators_.push_back(rec);
        } else {
            p.last_role = role;
            p.last_index = n;
            p.confined = true;
        }
    }

    previous_ = v;
    ++steps_;
}

IndicatorScanner crossing_indicators(const TreePath& decoded, LabeledTree& tree, std::vector<LabelPair> pairs) {
    IndicatorScanner scanner(tree, std::move(pairs));
    for (auto v : decoded.vertices) scanner.observe(v);
    return scanner;
}

void write_wstream_csv(std::ostream& out, std::span<const WRecord> ws, const LabelAlphabet& alphabet) {
    auto num = [](double v) {
        std::array<char, 32> buf{};
        auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
        return std::string(buf.data(), end);
    };
    out << "m,pair_eta_prime,pair_eta,w,time_found\n";
    for (const auto& r : ws)
        out << r.set_id << ',' << num(alphabet.value(r.pair.outer)) << ',' << num(alphabet.value(r.pair.inner)) << ','
            << r.w << ',' << r.time_found << '\n';
}

} // namespace rwre
