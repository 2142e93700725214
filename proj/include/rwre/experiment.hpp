#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rwre/errors.hpp"
#include "rwre/measure.hpp"
#include "rwre/weights.hpp"

namespace rwre {

/// Bad command line or config; the CLI maps it to exit status 2.
class UsageError : public Error {
public:
    using Error::Error;
};

struct RunConfig {
    MeasureSpec measure = MeasureSpec::create({{0.3, 0.25}, {0.7, 0.75}});
    std::uint64_t seed = 1;
    std::uint64_t horizon = 1'000'000;
    ReconstructionModeRequest mode = ReconstructionModeRequest::automatic;
    bool ground_truth = false;
    std::filesystem::path output_dir = "out";
    std::vector<std::string> checks; // empty: every check
    std::uint64_t replicas = 1;
    std::optional<std::filesystem::path> input;
    ReconstructOptions reconstruct{}; // `mode` above takes precedence over reconstruct.mode

    /// Throws UsageError on unknown keys, bad values or unknown check names.
    static RunConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

RunConfig load_config(const std::filesystem::path& path);

/// Names accepted in RunConfig::checks, in execution order.
const std::vector<std::string>& known_checks();

std::string sha256_hex(const std::filesystem::path& file);
std::string sha256_hex(std::string_view bytes);

struct SimulateOutput {
    std::filesystem::path observations;
    std::filesystem::path manifest;
    std::string observations_sha256;
};

/// observations.bin and manifest.json; with ground_truth also trajectory.bin
/// and environment.bin.
SimulateOutput cmd_simulate(const RunConfig& config);

struct ReconstructOutput {
    Reconstruction reconstruction;
    std::vector<ConvergenceRow> convergence;
    std::string input_sha256;
};

/// Reads config.input (default: output_dir/observations.bin) and writes
/// reconstruction.json, convergence.csv and, in atomic mode, wstream.csv.
/// Nothing is written when the input cannot be parsed.
ReconstructOutput cmd_reconstruct(const RunConfig& config);

struct CheckResult {
    std::string name;
    bool passed = false;
    double seconds = 0.0;
    nlohmann::json details;
};

struct VerifyOutput {
    std::vector<CheckResult> results;
    bool passed() const;
    nlohmann::json to_json() const;
};

/// Runs the selected checks and writes verify.json plus one CSV per tabular check.
VerifyOutput cmd_verify(const RunConfig& config);

/// Simulate, reconstruct and compare to the configured measure, once per
/// replica; writes replicas/replica_<i>.json and experiment.json.
nlohmann::json cmd_experiment(const RunConfig& config);

/// Distance between a reconstruction and the truth: atomic TV when both are
/// purely atomic, otherwise the grid-CDF distance (marker samples, or the
/// estimated spec, against the truth).
double reconstruction_distance(const Reconstruction& rec, const MeasureSpec& truth);

} // namespace rwre
