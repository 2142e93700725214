#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "rwre/decoder.hpp"
#include "rwre/marker.hpp"
#include "rwre/measure.hpp"
#include "rwre/support.hpp"

namespace rwre {

/// Inverted straight-crossing frequency for one atom.
struct WeightEstimate {
    double eta = 0.0;
    double lambda_hat = 0.0;
    std::size_t n_indicators = 0;
    double p_hat = 0.0;
    double std_error = 0.0; // delta method; infinite when lambda_hat == 0
    bool clamped = false;
};

/// lambda_hat = sqrt(clamp(1 - p_hat / (1 - eta(1-eta)), 0, 1)).
WeightEstimate estimate_weight(double p_hat, std::size_t n, double eta);

enum class ReconstructionModeRequest { automatic, atomic, marker };

struct ReconstructOptions {
    ReconstructionModeRequest mode = ReconstructionModeRequest::automatic;
    /// Fraction of the stream used by the mode decision.
    double classification_prefix = 0.1;
    /// Weights backed by fewer indicators are flagged low-confidence.
    std::size_t min_indicators = 100;
    RecurrenceOptions recurrence{};
    LineReconstructionOptions line{};
    bool reconstruct_line_when_recurrent = true;
    /// An estimated Solomon integral within this many standard errors of zero
    /// counts as recurrent.
    double verdict_z = 3.0;
};

struct AtomDiagnostics {
    double eta = 0.0;
    double partner = 0.0;
    WeightEstimate estimate;
    std::size_t sets_registered = 0;
    bool low_confidence = false;
    bool absent = false; // no scored indicator at all
};

/// Convergence table row at a geometric checkpoint.
struct ConvergenceRow {
    std::size_t count = 0;         // indicators (atomic) or samples (marker)
    std::size_t time = 0;          // stream index at which the count was reached
    std::vector<double> estimates; // per atom (atomic) or a single grid distance (marker)
};

struct AtomicReconstruction {
    MeasureSpec measure = MeasureSpec::dirac(0.5);
    std::vector<double> raw_weights; // per certified atom, in `atoms` order
    std::vector<AtomDiagnostics> atoms;
    std::vector<double> alphabet;            // label -> value of the decoding tree
    std::vector<WRecord> indicators;     // all families, by time found
    std::vector<std::size_t> indicator_atom; // index into `atoms` for each indicator
    bool two_atom_rule = false; // N = 2: one weight read off, the other is 1 - it
    std::optional<double> estimated_atom;
    std::size_t clamps = 0;
};

struct MarkerReconstruction {
    std::vector<MarkerSample> samples;
    EmpiricalMeasure empirical;
    RecurrenceReport recurrence;
    std::optional<LineReconstruction> line;
    std::string line_error;
};

struct Reconstruction {
    ReconstructionMode mode = ReconstructionMode::atomic;
    MeasureSpec measure = MeasureSpec::dirac(0.5);
    Verdict verdict = Verdict::recurrent;
    double solomon_integral = 0.0;
    double solomon_z = 0.0; // integral over its standard error
    std::size_t certified_atoms_in_prefix = 0;
    std::optional<AtomicReconstruction> atomic;
    std::optional<MarkerReconstruction> marker;

    /// {"mode", "measure", "raw_weights", "diagnostics"}.
    nlohmann::json to_json() const;
};

/// Weight of every certified atom from the straight-crossing frequency of the
/// pattern (partner, eta, eta, partner); the partner is the most frequently
/// observed other atom. Each atom's pattern family is registered on its own.
AtomicReconstruction reconstruct_atomic(std::span<const double> xs, const SupportReport& report,
                                        const ReconstructOptions& options = {});

MarkerReconstruction reconstruct_marker(std::span<const double> xs, const SupportReport& report,
                                        const ReconstructOptions& options = {});

/// Full pipeline: classify the prefix, dispatch, attach the recurrence verdict.
Reconstruction reconstruct(std::span<const double> xs, const ReconstructOptions& options = {});

/// Estimates after 1, 2, 4, ... indicators (atomic) or samples (marker).
/// Marker rows measure the grid-CDF distance to `reference`, or to the final
/// empirical measure when no reference is given.
std::vector<ConvergenceRow> convergence_table(const Reconstruction& rec, const MeasureSpec* reference = nullptr);

} // namespace rwre
