#include "rwre/tree.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "rwre/errors.hpp"

namespace rwre {

LabelAlphabet::LabelAlphabet(std::span<const double> values) {
    for (double v : values) {
        const auto key = std::bit_cast<std::uint64_t>(v);
        if (index_.contains(key)) throw std::invalid_argument("duplicate value in label alphabet");
        index_.emplace(key, static_cast<Label>(values_.size()));
        values_.push_back(v);
    }
}

std::optional<Label> LabelAlphabet::find(double value) const {
    auto it = index_.find(std::bit_cast<std::uint64_t>(value));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Label LabelAlphabet::label_of(double value) const {
    if (auto l = find(value)) return *l;
    throw SupportDriftError(value);
}

LabeledTree::LabeledTree(std::size_t label_count, Label root_label) : label_count_(label_count) {
    if (label_count < 2) throw std::invalid_argument("labeled tree needs at least two labels");
    if (root_label >= label_count) throw std::invalid_argument("root label out of range");
    nodes_.push_back({kNone, root_label, 0, root_label});
    if (label_count_ <= kFlatChildLimit) flat_children_.assign(label_count_, kNone);
}

std::optional<VertexId> LabeledTree::parent(VertexId v) const {
    const auto p = nodes_[v.index].parent;
    if (p == kNone) return std::nullopt;
    return VertexId{p};
}

std::uint32_t LabeledTree::child(std::uint32_t v, Label l) const {
    if (label_count_ <= kFlatChildLimit) return flat_children_[std::size_t{v} * label_count_ + l];
    auto it = hashed_children_.find(std::uint64_t{v} * label_count_ + l);
    return it == hashed_children_.end() ? kNone : it->second;
}

void LabeledTree::set_child(std::uint32_t v, Label l, std::uint32_t c) {
    if (label_count_ <= kFlatChildLimit)
        flat_children_[std::size_t{v} * label_count_ + l] = c;
    else
        hashed_children_[std::uint64_t{v} * label_count_ + l] = c;
}

std::optional<VertexId> LabeledTree::find_neighbor(VertexId v, Label l) const {
    const Node& n = nodes_[v.index];
    if (n.parent != kNone && nodes_[n.parent].label == l) return VertexId{n.parent};
    const auto c = child(v.index, l);
    if (c == kNone) return std::nullopt;
    return VertexId{c};
}

VertexId LabeledTree::neighbor(VertexId v, Label l) {
    if (l >= label_count_) throw std::out_of_range("label out of range");
    const Node n = nodes_[v.index];
    if (n.parent != kNone && nodes_[n.parent].label == l) return VertexId{n.parent};
    if (const auto c = child(v.index, l); c != kNone) return VertexId{c};

    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({v.index, l, n.depth + 1, n.parent == kNone ? l : n.branch});
    if (label_count_ <= kFlatChildLimit) flat_children_.resize(flat_children_.size() + label_count_, kNone);
    set_child(v.index, l, id);
    return VertexId{id};
}

std::size_t LabeledTree::distance(VertexId a, VertexId b) const {
    std::size_t d = 0;
    auto x = a.index;
    auto y = b.index;
    while (nodes_[x].depth > nodes_[y].depth) x = nodes_[x].parent, ++d;
    while (nodes_[y].depth > nodes_[x].depth) y = nodes_[y].parent, ++d;
    while (x != y) {
        x = nodes_[x].parent;
        y = nodes_[y].parent;
        d += 2;
    }
    return d;
}

std::vector<Label> LabeledTree::label_path(VertexId v) const {
    std::vector<Label> path;
    for (auto x = v.index; nodes_[x].parent != kNone; x = nodes_[x].parent) path.push_back(nodes_[x].label);
    std::reverse(path.begin(), path.end());
    return path;
}

std::int64_t LabeledTree::line_position(VertexId v) const {
    if (label_count_ != 2) throw std::logic_error("line_position is defined for two labels only");
    const Node& n = nodes_[v.index];
    const auto depth = static_cast<std::int64_t>(n.depth);
    return n.branch == nodes_[0].label ? depth : -depth;
}

} // namespace rwre
