#include "rwre/support.hpp"

#include <bit>
#include <limits>
#include <stdexcept>

#include "rwre/errors.hpp"

namespace rwre {

std::optional<ValueId> SupportReport::id_of(double value) const {
    auto it = index_.find(std::bit_cast<std::uint64_t>(value));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::span<const std::uint32_t> SupportReport::occurrences(ValueId id) const {
    const auto begin = occ_offsets_[id];
    const auto end = occ_offsets_[id + 1];
    return std::span<const std::uint32_t>(occ_indices_).subspan(begin, end - begin);
}

bool SupportReport::is_atomic_value(double value) const {
    auto id = id_of(value);
    return id && is_atomic(*id);
}

std::vector<double> SupportReport::atoms() const {
    std::vector<double> out;
    for (ValueId id = 0; id < values_.size(); ++id)
        if (is_atomic(id)) out.push_back(values_[id]);
    return out;
}

std::vector<double> SupportReport::non_atoms() const {
    std::vector<double> out;
    for (ValueId id = 0; id < values_.size(); ++id)
        if (!is_atomic(id)) out.push_back(values_[id]);
    return out;
}

std::size_t SupportReport::atom_count() const {
    std::size_t n = 0;
    for (const auto& c : certificates_) n += c.certified();
    return n;
}

nlohmann::json SupportReport::to_json(std::size_t max_listed_non_atoms) const {
    nlohmann::json atoms = nlohmann::json::array();
    nlohmann::json non_atoms = nlohmann::json::array();
    for (ValueId id = 0; id < values_.size(); ++id) {
        const auto& c = certificates_[id];
        if (c.certified()) {
            nlohmann::json a = {{"value", values_[id]}, {"first_seen", first_seen_[id]}, {"count", count(id)}};
            a["adjacent_at"] = c.adjacent_at ? nlohmann::json(*c.adjacent_at) : nlohmann::json(nullptr);
            a["parity_pair"] = c.parity_pair ? nlohmann::json{c.parity_pair->first, c.parity_pair->second}
                                             : nlohmann::json(nullptr);
            atoms.push_back(a);
        } else if (non_atoms.size() < max_listed_non_atoms) {
            non_atoms.push_back({{"value", values_[id]}, {"first_seen", first_seen_[id]}, {"count", count(id)}});
        }
    }
    return {{"length", length()},
            {"seen_count", seen_count()},
            {"atom_count", atom_count()},
            {"non_atom_count", non_atom_count()},
            {"atoms", atoms},
            {"non_atoms", non_atoms}};
}

SupportReport scan_support(std::span<const double> xs) {
    if (xs.size() > std::numeric_limits<std::uint32_t>::max())
        throw std::length_error("observation prefix too long for 32-bit occurrence indices");
    SupportReport r;
    r.ids_.reserve(xs.size());
    // Per value: first index seen at each parity.
    std::vector<std::array<std::size_t, 2>> parity_first;
    constexpr auto kUnset = std::numeric_limits<std::size_t>::max();

    for (std::size_t n = 0; n < xs.size(); ++n) {
        const auto key = std::bit_cast<std::uint64_t>(xs[n]);
        auto [it, inserted] = r.index_.try_emplace(key, static_cast<ValueId>(r.values_.size()));
        const ValueId id = it->second;
        if (inserted) {
            r.values_.push_back(xs[n]);
            r.first_seen_.push_back(n);
            r.certificates_.emplace_back();
            parity_first.push_back({kUnset, kUnset});
        }
        r.ids_.push_back(id);

        auto& cert = r.certificates_[id];
        if (n > 0 && r.ids_[n - 1] == id && !cert.adjacent_at) cert.adjacent_at = n - 1;
        auto& pf = parity_first[id];
        if (pf[n % 2] == kUnset) {
            pf[n % 2] = n;
            if (pf[1 - n % 2] != kUnset) cert.parity_pair = std::pair{pf[1 - n % 2], n};
        }
    }

    // Occurrence lists in CSR layout.
    r.occ_offsets_.assign(r.values_.size() + 1, 0);
    for (auto id : r.ids_) ++r.occ_offsets_[id + 1];
    for (std::size_t i = 1; i < r.occ_offsets_.size(); ++i) r.occ_offsets_[i] += r.occ_offsets_[i - 1];
    r.occ_indices_.resize(r.ids_.size());
    std::vector<std::uint32_t> fill(r.occ_offsets_.begin(), r.occ_offsets_.end() - 1);
    for (std::size_t n = 0; n < r.ids_.size(); ++n) r.occ_indices_[fill[r.ids_[n]]++] = static_cast<std::uint32_t>(n);
    return r;
}

std::string_view to_string(ReconstructionMode m) {
    return m == ReconstructionMode::marker ? "marker" : "atomic";
}

ReconstructionMode mode_select(const SupportReport& report) {
    if (report.seen_count() == 0) throw std::invalid_argument("empty support report");
    if (report.non_atom_count() > 0) return ReconstructionMode::marker;
    if (report.atom_count() == 1) throw Error("deterministic environment excluded");
    return ReconstructionMode::atomic;
}

} // namespace rwre
