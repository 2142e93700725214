#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "rwre/measure.hpp"
#include "rwre/support.hpp"

namespace rwre {

/// xi(m) taken right after two never-seen non-atomic markers xi(m-2), xi(m-1),
/// with xi(m) != xi(m-2): the walker stands on a site nobody has visited.
struct MarkerSample {
    std::size_t time = 0;
    double value = 0.0;
    std::array<double, 2> marker_values{};
};

/// Scans for marker triples; triples never overlap (the scan resumes at m+1).
std::vector<MarkerSample> extract_marker_samples(std::span<const double> xs, const SupportReport& report);

inline constexpr std::size_t kHistogramBins = 64;

/// Empirical law of the harvested samples. Values sampled more than once are
/// kept as exact point masses; the rest are kept raw and binned.
struct EmpiricalMeasure {
    std::size_t sample_count = 0;
    std::vector<Atom> atoms;
    std::vector<double> continuous;
    std::array<std::size_t, kHistogramBins> histogram{};
    std::vector<double> samples;

    double continuous_weight() const;
    double atom_weight(double value) const;

    /// Atoms plus one uniform piece per nonempty histogram bin (outer bin edges
    /// pulled inside (0,1)).
    MeasureSpec to_spec() const;
    nlohmann::json to_json() const;
};

EmpiricalMeasure empirical_measure(std::span<const MarkerSample> samples);

enum class RecurrenceEvidence { recurrent, transient };

struct TrackedMarker {
    double value = 0.0;
    std::size_t first_seen = 0;
    std::size_t reappearances = 0;
    std::size_t reappearances_in_final_window = 0;
};

struct RecurrenceReport {
    RecurrenceEvidence evidence = RecurrenceEvidence::transient;
    std::size_t final_window_start = 0;
    std::vector<TrackedMarker> tracked;

    nlohmann::json to_json() const;
};

struct RecurrenceOptions {
    std::size_t tracked_markers = 10;
    double final_window_fraction = 0.1;
};

/// A non-atomic value recurs iff its site is revisited. Tracks the first marker
/// values and reports recurrence when one of them shows up in the final window.
RecurrenceReport marker_recurrence_report(std::span<const double> xs, const SupportReport& report,
                                          std::span<const MarkerSample> samples, RecurrenceOptions options = {});

/// Environment values between two anchor sites, oriented from `start` to `end`.
struct EnvBlock {
    std::vector<double> values;
    double start = 0.0;
    double end = 0.0;
    std::size_t observed_at = 0; // time index where the word begins
    bool reversed = false;       // the word was read from `end` to `start`
    /// No non-atomic value repeats inside the word, so it is a straight path.
    bool straight_certified = false;
};

/// Shortest word of xs running between a and b (either order) without interior
/// visits to a or b; ties go to the earliest. Throws Error("anchors never linked").
EnvBlock minimal_word(std::span<const double> xs, const SupportReport& report, double a, double b);

enum class Orientation { as_is, reflected, undecided };

std::string_view to_string(Orientation o);

/// Partial environment on integer positions, known up to translation and reflection.
class LineAssembly {
public:
    using AtomPredicate = std::function<bool(double)>;

    explicit LineAssembly(AtomPredicate is_atomic = {});

    const std::map<std::int64_t, double>& sites() const { return sites_; }
    std::optional<std::int64_t> position_of(double value) const;
    std::optional<double> value_at(std::int64_t pos) const;
    bool is_atomic(double value) const { return is_atomic_ && is_atomic_(value); }

    double origin_value() const { return origin_value_; }
    Orientation orientation = Orientation::undecided;

    /// Longest run of consecutive assigned positions: (first position, length).
    std::pair<std::int64_t, std::size_t> longest_run() const;

    /// Merge one block; throws InconsistentBlocksError on any conflict.
    void merge(const EnvBlock& block);

    nlohmann::json to_json() const;

private:
    bool fits(const EnvBlock& block, std::size_t anchor_index, std::int64_t anchor_pos, int dir,
              std::size_t& new_sites) const;
    void place(const EnvBlock& block, std::size_t anchor_index, std::int64_t anchor_pos, int dir);

    AtomPredicate is_atomic_;
    std::map<std::int64_t, double> sites_;
    std::unordered_map<std::uint64_t, std::int64_t> coordinate_;
    double origin_value_ = 0.0;
};

LineAssembly assemble_environment(std::span<const EnvBlock> blocks, LineAssembly::AtomPredicate is_atomic = {});

struct SiteDepartures {
    std::int64_t position = 0;
    double value = 0.0;
    std::size_t departures = 0;
    std::size_t toward_increasing = 0;
};

struct OrientationResult {
    Orientation orientation = Orientation::undecided;
    double score = 0.0;
    std::vector<SiteDepartures> per_site;
};

/// Log-likelihood vote: each departure from a site with |w - 1/2| > 0.05 adds
/// +log(w/(1-w)) when it moves toward increasing coordinate, minus that otherwise.
OrientationResult orient_environment(const LineAssembly& assembly, std::span<const double> xs,
                                     const SupportReport& report);

struct LineReconstructionOptions {
    std::size_t max_anchors = 64;
};

struct LineReconstruction {
    LineAssembly assembly;
    std::vector<EnvBlock> blocks;
    std::vector<double> anchors;
    OrientationResult orientation;
};

/// Recurrent-case environment reconstruction: anchors by decreasing frequency,
/// each unplaced anchor attached by its shortest certified word to a placed one,
/// merged and oriented.
/// Words that are not certified straight are skipped.
LineReconstruction reconstruct_line(std::span<const double> xs, const SupportReport& report,
                                    LineReconstructionOptions options = {});

} // namespace rwre
