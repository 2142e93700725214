#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace rwre {

using Label = std::uint32_t;

/// Bijection between observed support values (compared bitwise) and labels 0..N-1.
class LabelAlphabet {
public:
    LabelAlphabet() = default;
    explicit LabelAlphabet(std::span<const double> values);

    std::size_t size() const { return values_.size(); }
    double value(Label l) const { return values_.at(l); }
    const std::vector<double>& values() const { return values_; }

    std::optional<Label> find(double value) const;
    /// Throws SupportDriftError when `value` is not part of the alphabet.
    Label label_of(double value) const;

private:
    std::vector<double> values_;
    std::unordered_map<std::uint64_t, Label> index_;
};

struct VertexId {
    std::uint32_t index = 0;
    friend auto operator<=>(const VertexId&, const VertexId&) = default;
};

/// The rooted tree in which every vertex has exactly one neighbour per label.
/// Vertices are created on demand, so ids are canonical for a given tree
/// instance no matter which procedure first reaches a vertex.
///
/// Children of a vertex carry every label except the label of its parent; the
/// root has one child per label.
class LabeledTree {
public:
    LabeledTree(std::size_t label_count, Label root_label);

    std::size_t label_count() const { return label_count_; }
    std::size_t size() const { return nodes_.size(); }

    VertexId root() const { return VertexId{0}; }
    bool is_root(VertexId v) const { return v.index == 0; }
    Label label(VertexId v) const { return nodes_[v.index].label; }
    std::uint32_t depth(VertexId v) const { return nodes_[v.index].depth; }
    std::optional<VertexId> parent(VertexId v) const;

    /// Label of the depth-one ancestor; the root reports its own label.
    Label branch(VertexId v) const { return nodes_[v.index].branch; }

    /// The neighbour of `v` labeled `l`: the parent if it carries `l`, otherwise
    /// the child labeled `l`, created if needed.
    VertexId neighbor(VertexId v, Label l);
    std::optional<VertexId> find_neighbor(VertexId v, Label l) const;

    std::size_t distance(VertexId a, VertexId b) const;

    /// Labels from the depth-one ancestor down to `v` (empty for the root).
    std::vector<Label> label_path(VertexId v) const;

    /// For two labels the tree is a line; this is the signed depth, positive on
    /// the branch whose first label repeats the root label.
    std::int64_t line_position(VertexId v) const;

private:
    static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
    static constexpr std::size_t kFlatChildLimit = 16;

    struct Node {
        std::uint32_t parent;
        Label label;
        std::uint32_t depth;
        Label branch;
    };

    std::uint32_t child(std::uint32_t v, Label l) const;
    void set_child(std::uint32_t v, Label l, std::uint32_t c);

    std::size_t label_count_;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> flat_children_;
    std::unordered_map<std::uint64_t, std::uint32_t> hashed_children_;
};

} // namespace rwre
