#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rwre/environment.hpp"

namespace rwre {

using ValueId = std::uint32_t;

/// Evidence that a value is an atom of mu: it was seen at two distinct sites.
struct AtomCertificate {
    /// k with xi(k) = xi(k+1) (adjacent repeat).
    std::optional<std::size_t> adjacent_at;
    /// (k, k') with xi(k) = xi(k') and k' - k odd: opposite parity forces distinct sites.
    std::optional<std::pair<std::size_t, std::size_t>> parity_pair;

    bool certified() const { return adjacent_at.has_value() || parity_pair.has_value(); }
};

/// Support of the observed prefix split into certified atoms and the rest.
/// Value ids follow first-appearance order.
class SupportReport {
public:
    std::size_t length() const { return ids_.size(); }
    std::size_t seen_count() const { return values_.size(); }

    double value(ValueId id) const { return values_[id]; }
    std::optional<ValueId> id_of(double value) const;
    /// Id of xi(n).
    ValueId id_at(std::size_t n) const { return ids_[n]; }
    std::span<const ValueId> ids() const { return ids_; }

    std::size_t first_seen(ValueId id) const { return first_seen_[id]; }
    std::span<const std::uint32_t> occurrences(ValueId id) const;
    std::size_t count(ValueId id) const { return occurrences(id).size(); }

    bool is_atomic(ValueId id) const { return certificates_[id].certified(); }
    bool is_atomic_value(double value) const;
    const AtomCertificate& certificate(ValueId id) const { return certificates_[id]; }

    std::vector<double> seen() const { return values_; }
    std::vector<double> atoms() const;
    std::vector<double> non_atoms() const;
    std::size_t atom_count() const;
    std::size_t non_atom_count() const { return seen_count() - atom_count(); }

    /// Atoms and non-atoms with their certificates; at most `max_listed_non_atoms`
    /// non-atomic values are listed explicitly.
    nlohmann::json to_json(std::size_t max_listed_non_atoms = 1000) const;

    friend SupportReport scan_support(std::span<const double> xs);

private:
    std::vector<double> values_;
    std::vector<std::size_t> first_seen_;
    std::vector<AtomCertificate> certificates_;
    std::vector<ValueId> ids_;
    std::vector<std::uint32_t> occ_offsets_;
    std::vector<std::uint32_t> occ_indices_;
    std::unordered_map<std::uint64_t, ValueId> index_;
};

/// Single pass over the prefix: distinct values, occurrence lists, and atom
/// certificates (adjacent repeats and opposite-parity repeats).
SupportReport scan_support(std::span<const double> xs);

enum class ReconstructionMode { marker, atomic };

std::string_view to_string(ReconstructionMode m);

/// marker mode iff some seen value is not certified atomic. Throws Error
/// ("deterministic environment excluded") for a single certified atom.
ReconstructionMode mode_select(const SupportReport& report);

} // namespace rwre
