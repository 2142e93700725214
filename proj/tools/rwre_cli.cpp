#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rwre/experiment.hpp"

namespace {

struct Overrides {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> horizon;
    std::string mode;
    bool ground_truth = false;
    std::string input;
    std::vector<std::string> checks;
    std::optional<std::uint64_t> replicas;
    std::optional<std::uint64_t> tracked_markers;
    std::optional<double> final_window;
    std::optional<double> prefix;
    std::optional<double> verdict_z;
};

void add_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "RunConfig JSON file");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--seed", o.seed, "root seed");
    cmd->add_option("--horizon", o.horizon, "number of walk steps");
    cmd->add_option("--mode", o.mode, "reconstruction mode")->check(CLI::IsMember({"auto", "atomic", "marker"}));
    cmd->add_flag("--ground-truth", o.ground_truth, "also write trajectory and environment");
    cmd->add_option("--input", o.input, "observation stream to reconstruct");
    cmd->add_option("--checks", o.checks, "checks to run (default: all)")->delimiter(',');
    cmd->add_option("--replicas", o.replicas, "replica or seed count");
    cmd->add_option("--tracked-markers", o.tracked_markers, "marker values tracked for the recurrence report");
    cmd->add_option("--final-window", o.final_window, "final fraction of the stream searched for revisits");
    cmd->add_option("--prefix", o.prefix, "fraction of the stream used to choose the mode");
    cmd->add_option("--verdict-z", o.verdict_z, "marker-mode z band counted as recurrent");
}

rwre::RunConfig resolve(const Overrides& o) {
    nlohmann::json j = nlohmann::json::object();
    if (!o.config.empty()) j = rwre::load_config(o.config).to_json();
    if (!o.out.empty()) j["output_dir"] = o.out;
    if (o.seed) j["seed"] = *o.seed;
    if (o.horizon) j["horizon"] = *o.horizon;
    if (!o.mode.empty()) j["mode"] = o.mode;
    if (o.ground_truth) j["ground_truth"] = true;
    if (!o.input.empty()) j["input"] = o.input;
    if (!o.checks.empty()) j["checks"] = o.checks;
    if (o.replicas) j["replicas"] = *o.replicas;
    if (o.tracked_markers) j["reconstruct"]["tracked_markers"] = *o.tracked_markers;
    if (o.final_window) j["reconstruct"]["final_window_fraction"] = *o.final_window;
    if (o.prefix) j["reconstruct"]["classification_prefix"] = *o.prefix;
    if (o.verdict_z) j["reconstruct"]["verdict_z"] = *o.verdict_z;
    return rwre::RunConfig::from_json(j);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random walk in random environment: simulate, reconstruct, verify"};
    app.require_subcommand(1);
    Overrides o;
    auto* simulate = app.add_subcommand("simulate", "simulate a walk and write its observation stream");
    auto* reconstruct = app.add_subcommand("reconstruct", "reconstruct the environment law from a stream");
    auto* verify = app.add_subcommand("verify", "run oracle and invariant checks");
    auto* experiment = app.add_subcommand("experiment", "simulate, reconstruct and compare to the truth");
    for (auto* cmd : {simulate, reconstruct, verify, experiment}) add_options(cmd, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        const auto config = resolve(o);
        if (simulate->parsed()) {
            const auto out = rwre::cmd_simulate(config);
            std::cout << nlohmann::json{{"observations", out.observations.string()},
                                        {"sha256", out.observations_sha256},
                                        {"manifest", out.manifest.string()}}
                             .dump(2)
                      << '\n';
        } else if (reconstruct->parsed()) {
            const auto out = rwre::cmd_reconstruct(config);
            const auto j = out.reconstruction.to_json();
            std::cout << nlohmann::json{{"mode", j["mode"]},
                                        {"measure", j["measure"]},
                                        {"verdict", j["diagnostics"]["solomon"]},
                                        {"input_sha256", out.input_sha256}}
                             .dump(2)
                      << '\n';
        } else if (verify->parsed()) {
            const auto out = rwre::cmd_verify(config);
            for (const auto& r : out.results)
                std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << "  " << r.details.dump() << '\n';
            return out.passed() ? 0 : 1;
        } else if (experiment->parsed()) {
            const auto report = rwre::cmd_experiment(config);
            std::cout << (report.contains("aggregate") ? report["aggregate"] : report["replicas"][0]).dump(2) << '\n';
        }
    } catch (const rwre::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
