#include "rwre/experiment.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "rwre/environment.hpp"
#include "rwre/observation_io.hpp"
#include "rwre/oracle.hpp"
#include "rwre/parallel.hpp"
#include "rwre/philox.hpp"
#include "rwre/support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace rwre {

namespace {

const std::set<std::string> kConfigKeys = {"measure", "seed",     "horizon", "mode",  "ground_truth",
                                           "output_dir", "checks", "replicas", "input", "reconstruct"};
const std::set<std::string> kReconstructKeys = {"classification_prefix", "min_indicators", "tracked_markers",
                                                "final_window_fraction", "verdict_z",      "max_anchors",
                                                "reconstruct_line"};

std::string_view mode_name(ReconstructionModeRequest m) {
    switch (m) {
    case ReconstructionModeRequest::automatic: return "auto";
    case ReconstructionModeRequest::atomic: return "atomic";
    case ReconstructionModeRequest::marker: return "marker";
    }
    return "auto";
}

ReconstructionModeRequest parse_mode(const std::string& s) {
    if (s == "auto") return ReconstructionModeRequest::automatic;
    if (s == "atomic") return ReconstructionModeRequest::atomic;
    if (s == "marker") return ReconstructionModeRequest::marker;
    throw UsageError("mode must be auto, atomic or marker, got '" + s + "'");
}

template <class T>
T get_as(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw UsageError(std::string("config field '") + key + "' has the wrong type");
    }
}

std::uint64_t get_count(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw UsageError(std::string("config field '") + key + "' must be a nonnegative integer");
    if (v.is_number_integer() && v.get<std::int64_t>() < 0)
        throw UsageError(std::string("config field '") + key + "' must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

std::string num(double v) {
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw Error("failed writing " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void prepare_output_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
    const auto probe = dir / ".write_probe";
    {
        std::ofstream out(probe);
        if (!out) throw Error("output directory " + dir.string() + " is not writable");
    }
    fs::remove(probe, ec);
}

json file_entry(const fs::path& path) {
    return {{"path", path.filename().string()}, {"bytes", fs::file_size(path)}, {"sha256", sha256_hex(path)}};
}

std::vector<std::uint64_t> replica_seeds(std::uint64_t seed, std::uint64_t count) {
    if (count == 1) return {seed};
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < count; ++i) seeds.push_back(derive_seed(seed, Stream::replica, i));
    return seeds;
}

double spec_grid_distance(const MeasureSpec& a, const MeasureSpec& b) {
    double worst = 0.0;
    for (std::size_t j = 0; j < kCdfGridPoints; ++j) {
        const double t = (static_cast<double>(j) + 0.5) / static_cast<double>(kCdfGridPoints);
        worst = std::max(worst, std::abs(a.cdf(t) - b.cdf(t)));
    }
    return worst;
}

ReconstructOptions options_of(const RunConfig& config) {
    auto o = config.reconstruct;
    o.mode = config.mode;
    return o;
}

} // namespace

RunConfig RunConfig::from_json(const json& j) {
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (!kConfigKeys.contains(key)) throw UsageError("unknown config field '" + key + "'");

    RunConfig c;
    if (j.contains("measure")) {
        try {
            c.measure = MeasureSpec::from_json(j.at("measure"));
        } catch (const std::exception& e) {
            throw UsageError(std::string("invalid measure: ") + e.what());
        }
    }
    if (j.contains("seed")) c.seed = get_count(j, "seed");
    if (j.contains("horizon")) c.horizon = get_count(j, "horizon");
    if (j.contains("mode")) c.mode = parse_mode(get_as<std::string>(j, "mode"));
    if (j.contains("ground_truth")) c.ground_truth = get_as<bool>(j, "ground_truth");
    if (j.contains("output_dir")) c.output_dir = get_as<std::string>(j, "output_dir");
    if (j.contains("checks")) c.checks = get_as<std::vector<std::string>>(j, "checks");
    if (j.contains("replicas")) c.replicas = get_count(j, "replicas");
    if (j.contains("input") && !j.at("input").is_null()) c.input = get_as<std::string>(j, "input");
    if (j.contains("reconstruct")) {
        const auto& r = j.at("reconstruct");
        if (!r.is_object()) throw UsageError("config field 'reconstruct' must be an object");
        for (const auto& [key, value] : r.items())
            if (!kReconstructKeys.contains(key)) throw UsageError("unknown reconstruct option '" + key + "'");
        auto& o = c.reconstruct;
        if (r.contains("classification_prefix")) o.classification_prefix = get_as<double>(r, "classification_prefix");
        if (r.contains("min_indicators")) o.min_indicators = get_count(r, "min_indicators");
        if (r.contains("tracked_markers")) o.recurrence.tracked_markers = get_count(r, "tracked_markers");
        if (r.contains("final_window_fraction"))
            o.recurrence.final_window_fraction = get_as<double>(r, "final_window_fraction");
        if (r.contains("verdict_z")) o.verdict_z = get_as<double>(r, "verdict_z");
        if (r.contains("max_anchors")) o.line.max_anchors = get_count(r, "max_anchors");
        if (r.contains("reconstruct_line")) o.reconstruct_line_when_recurrent = get_as<bool>(r, "reconstruct_line");
    }

    if (c.horizon < 1) throw UsageError("horizon must be at least 1");
    if (c.replicas < 1) throw UsageError("replicas must be at least 1");
    const auto& o = c.reconstruct;
    if (!(o.classification_prefix > 0.0 && o.classification_prefix <= 1.0))
        throw UsageError("classification_prefix must lie in (0,1]");
    if (!(o.recurrence.final_window_fraction > 0.0 && o.recurrence.final_window_fraction <= 1.0))
        throw UsageError("final_window_fraction must lie in (0,1]");
    if (o.recurrence.tracked_markers < 1) throw UsageError("tracked_markers must be at least 1");
    if (!(o.verdict_z >= 0.0)) throw UsageError("verdict_z must be nonnegative");
    if (o.line.max_anchors < 2) throw UsageError("max_anchors must be at least 2");
    for (const auto& name : c.checks)
        if (std::find(known_checks().begin(), known_checks().end(), name) == known_checks().end())
            throw UsageError("unknown check '" + name + "'");
    return c;
}

json RunConfig::to_json() const {
    json j = {{"measure", measure.to_json()},
              {"seed", seed},
              {"horizon", horizon},
              {"mode", std::string(mode_name(mode))},
              {"ground_truth", ground_truth},
              {"output_dir", output_dir.string()},
              {"checks", checks},
              {"replicas", replicas},
              {"input", input ? json(input->string()) : json(nullptr)}};
    j["reconstruct"] = {{"classification_prefix", reconstruct.classification_prefix},
                        {"min_indicators", reconstruct.min_indicators},
                        {"tracked_markers", reconstruct.recurrence.tracked_markers},
                        {"final_window_fraction", reconstruct.recurrence.final_window_fraction},
                        {"verdict_z", reconstruct.verdict_z},
                        {"max_anchors", reconstruct.line.max_anchors},
                        {"reconstruct_line", reconstruct.reconstruct_line_when_recurrent}};
    return j;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError(path.string() + ": " + e.what());
    }
    return RunConfig::from_json(j);
}

const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> names = {"oracle_grid",  "mc_ground_truth", "ground_truth", "classifier_soundness",
                                                   "census",       "ssrw",            "independence", "orientation"};
    return names;
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 failed");
    std::ostringstream out;
    for (unsigned i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return out.str();
}

std::string sha256_hex(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open " + file.string());
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return sha256_hex(std::string_view(bytes));
}

SimulateOutput cmd_simulate(const RunConfig& config) {
    const auto sim = run_simulation(config.measure, config.seed, config.horizon, config.ground_truth);
    prepare_output_dir(config.output_dir);

    SimulateOutput out;
    out.observations = config.output_dir / "observations.bin";
    write_observations(out.observations, sim.observations);
    json files = json::array({file_entry(out.observations)});
    out.observations_sha256 = files[0]["sha256"];
    if (config.ground_truth) {
        const auto traj = config.output_dir / "trajectory.bin";
        const auto env = config.output_dir / "environment.bin";
        write_trajectory(traj, *sim.trajectory);
        write_environment(env, *sim.environment);
        files.push_back(file_entry(traj));
        files.push_back(file_entry(env));
    }
    out.manifest = config.output_dir / "manifest.json";
    write_json(out.manifest, {{"command", "simulate"},
                              {"config", config.to_json()},
                              {"observations", sim.observations.size()},
                              {"files", files}});
    return out;
}

ReconstructOutput cmd_reconstruct(const RunConfig& config) {
    const fs::path input = config.input ? *config.input : config.output_dir / "observations.bin";
    const auto xs = read_observations(input);
    if (xs.empty()) throw FormatError(input.string() + ": empty observation stream");

    ReconstructOutput out;
    out.input_sha256 = sha256_hex(input);
    out.reconstruction = reconstruct(xs, options_of(config));
    out.convergence = convergence_table(out.reconstruction);

    prepare_output_dir(config.output_dir);
    auto report = out.reconstruction.to_json();
    report["input"] = {{"path", input.string()}, {"sha256", out.input_sha256}, {"observations", xs.size()}};
    report["config"] = config.to_json();
    write_json(config.output_dir / "reconstruction.json", report);

    std::ostringstream csv;
    const auto& rec = out.reconstruction;
    if (rec.atomic) {
        csv << "n_indicators,time";
        for (const auto& a : rec.atomic->atoms) csv << ",weight_" << num(a.eta);
        csv << '\n';
    } else {
        csv << "n_samples,time,grid_distance\n";
    }
    for (const auto& row : out.convergence) {
        csv << row.count << ',' << row.time;
        for (double e : row.estimates) csv << ',' << num(e);
        csv << '\n';
    }
    write_text(config.output_dir / "convergence.csv", csv.str());

    if (rec.atomic) {
        std::ofstream ws(config.output_dir / "wstream.csv");
        write_wstream_csv(ws, rec.atomic->indicators, LabelAlphabet(rec.atomic->alphabet));
    }
    return out;
}

double reconstruction_distance(const Reconstruction& rec, const MeasureSpec& truth) {
    if (rec.measure.purely_atomic() && truth.purely_atomic() && rec.atomic) return atomic_tv_distance(rec.measure, truth);
    if (rec.marker) return empirical_bl_distance(rec.marker->empirical.samples, truth);
    return spec_grid_distance(rec.measure, truth);
}

bool VerifyOutput::passed() const {
    return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

json VerifyOutput::to_json() const {
    json checks = json::array();
    for (const auto& r : results)
        checks.push_back({{"name", r.name}, {"passed", r.passed}, {"seconds", r.seconds}, {"details", r.details}});
    return {{"passed", passed()}, {"checks", checks}};
}

namespace {

struct Family {
    double outer = 0.0;
    double inner = 0.0;
    double expected = 0.0;
};

// One family per atom, partner the heaviest other atom.
std::vector<Family> families_of(const MeasureSpec& spec) {
    std::vector<Family> out;
    for (const auto& a : spec.atoms()) {
        const Atom* partner = nullptr;
        for (const auto& b : spec.atoms())
            if (b.value != a.value && (!partner || b.weight > partner->weight)) partner = &b;
        out.push_back({partner->value, a.value, (1.0 - a.value * (1.0 - a.value)) * (1.0 - a.weight * a.weight)});
    }
    return out;
}

class Verifier {
public:
    // Pinned seeds seed, seed + 1, ...; 20 of them unless replicas says otherwise.
    Verifier(const RunConfig& config) : config_(config) {
        const auto count = config.replicas > 1 ? config.replicas : 20;
        for (std::uint64_t i = 0; i < count; ++i) seeds_.push_back(config.seed + i);
    }

    CheckResult run(const std::string& name, bool explicit_request) {
        CheckResult r;
        r.name = name;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if (name == "oracle_grid") oracle_grid(r);
            else if (name == "mc_ground_truth") mc_ground_truth(r);
            else if (name == "ground_truth") ground_truth(r);
            else if (name == "classifier_soundness") classifier_soundness(r);
            else if (name == "census") census(r);
            else if (name == "ssrw") ssrw(r);
            else if (name == "independence") independence(r);
            else if (name == "orientation") orientation(r);
            else throw UsageError("unknown check '" + name + "'");
        } catch (const NotApplicable& e) {
            r.passed = !explicit_request;
            r.details = {{"skipped", true}, {"reason", e.what()}};
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception& e) {
            r.passed = false;
            r.details["error"] = e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    }

    std::vector<std::pair<std::string, std::string>> tables; // file name, CSV text

private:
    struct NotApplicable : Error {
        using Error::Error;
    };

    void need_atomic() const {
        if (!config_.measure.purely_atomic() || config_.measure.atom_count() < 2)
            throw NotApplicable("needs a purely atomic measure with at least two atoms");
    }

    void oracle_grid(CheckResult& r) {
        double worst_r = 0.0, worst_x = 0.0;
        for (int i = 1; i <= 19; ++i) {
            for (int j = 1; j <= 19; ++j) {
                const double lambda = 0.05 * i, eta = 0.05 * j;
                worst_r = std::max(worst_r, std::abs(exact_confined_crossing_prob(lambda) - (1.0 - lambda * lambda)));
                const auto x = exact_straight_X_prob(eta);
                const double want = 1.0 - eta * (1.0 - eta);
                worst_x = std::max({worst_x, std::abs(x.positive - want), std::abs(x.negative - want)});
            }
        }
        r.passed = worst_r <= 1e-12 && worst_x <= 1e-12;
        r.details = {{"grid", "19x19"}, {"max_error_r", worst_r}, {"max_error_x", worst_x}, {"tolerance", 1e-12}};
    }

    const std::vector<std::pair<MonteCarloW, MonteCarloW>>& family_runs() {
        if (!runs_) {
            need_atomic();
            const auto mirror = reflected(config_.measure);
            runs_.emplace();
            for (const auto& f : families_of(config_.measure))
                runs_->emplace_back(mc_ground_truth_W(config_.measure, f.outer, f.inner, seeds_, config_.horizon),
                                    mc_ground_truth_W(mirror, 1.0 - f.outer, 1.0 - f.inner, seeds_, config_.horizon));
        }
        return *runs_;
    }

    void mc_ground_truth(CheckResult& r) {
        const auto& runs = family_runs();
        const auto fams = families_of(config_.measure);
        std::ostringstream csv;
        csv << "eta_prime,eta,n,mean,ci_low,ci_high,expected\n";
        json rows = json::array();
        r.passed = true;
        for (std::size_t k = 0; k < fams.size(); ++k) {
            const auto& mc = runs[k].first;
            const bool ok = mc.contains(fams[k].expected);
            r.passed = r.passed && ok;
            rows.push_back({{"pair", {fams[k].outer, fams[k].inner}}, {"expected", fams[k].expected}, {"mc", mc.to_json()}, {"passed", ok}});
            csv << num(fams[k].outer) << ',' << num(fams[k].inner) << ',' << mc.n << ',' << num(mc.mean) << ','
                << num(mc.ci_low) << ',' << num(mc.ci_high) << ',' << num(fams[k].expected) << '\n';
        }
        r.details = {{"seeds", seeds_.size()}, {"horizon", config_.horizon}, {"families", rows}};
        tables.emplace_back("verify_mc_ground_truth.csv", csv.str());
    }

    void ground_truth(CheckResult& r) {
        need_atomic();
        auto one = [&](std::uint64_t seed) {
            return check_ground_truth(run_simulation(config_.measure, seed, config_.horizon, true));
        };
        std::size_t decode = 0, label = 0, fact = 0, straight = 0, crossings = 0;
        for (const auto& g : parallel_map(std::span<const std::uint64_t>(seeds_), one)) {
            decode += g.decode_violations;
            label += g.label_violations;
            fact += g.factorization_violations;
            straight += g.straight_confined;
            crossings += g.crossings.size();
        }
        r.passed = decode == 0 && label == 0 && fact == 0;
        r.details = {{"seeds", seeds_.size()},
                     {"decode_violations", decode},
                     {"label_violations", label},
                     {"factorization_violations", fact},
                     {"straight_confined_crossings", straight},
                     {"crossings", crossings}};
    }

    void classifier_soundness(CheckResult& r) {
        auto one = [&](std::uint64_t seed) {
            const auto sim = run_simulation(config_.measure, seed, config_.horizon, false);
            const std::span<const double> xs(sim.observations);
            const auto full = scan_support(xs);
            const auto half = scan_support(xs.first(std::max<std::size_t>(1, xs.size() / 2)));
            std::size_t false_atoms = 0, monotonicity = 0;
            for (double v : full.atoms())
                if (config_.measure.atom_weight(v) == 0.0) ++false_atoms;
            for (double v : half.atoms())
                if (!full.is_atomic_value(v)) ++monotonicity;
            return std::pair{false_atoms, monotonicity};
        };
        std::size_t false_atoms = 0, monotonicity = 0;
        for (auto [f, m] : parallel_map(std::span<const std::uint64_t>(seeds_), one)) {
            false_atoms += f;
            monotonicity += m;
        }
        r.passed = false_atoms == 0 && monotonicity == 0;
        r.details = {{"seeds", seeds_.size()}, {"false_atoms", false_atoms}, {"monotonicity_violations", monotonicity}};
    }

    void census(CheckResult& r) {
        const std::uint64_t checkpoints[] = {1'000, 10'000, 100'000, 1'000'000};
        const double w2[] = {0.5, 0.5};
        const double w3[] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
        const auto c2 = root_visit_census(w2, checkpoints, seeds_);
        const auto c3 = root_visit_census(w3, checkpoints, seeds_);
        std::size_t increasing = 0, enough = 0, constant = 0;
        std::ostringstream csv;
        csv << "labels,seed,c1000,c10000,c100000,c1000000\n";
        for (const auto* c : {&c2, &c3}) {
            for (const auto& s : c->series) {
                csv << c->label_count << ',' << s.seed;
                for (auto v : s.counts) csv << ',' << v;
                csv << '\n';
            }
        }
        for (const auto& s : c2.series) {
            increasing += s.strictly_increasing();
            enough += s.counts.back() >= 50;
        }
        for (const auto& s : c3.series) constant += s.constant_from(1);
        const auto need = (seeds_.size() * 18 + 19) / 20;
        r.passed = increasing >= need && enough >= need && constant >= need;
        r.details = {{"seeds", seeds_.size()},
                     {"required", need},
                     {"n2_strictly_increasing", increasing},
                     {"n2_at_least_50_visits", enough},
                     {"n3_constant_from_1e4", constant}};
        tables.emplace_back("verify_census.csv", csv.str());
    }

    void ssrw(CheckResult& r) {
        const auto pc = ssrw_projection_check(simulate_R_line(0.5, 0.5, 1'000'000, config_.seed));
        r.passed = pc.p_plus >= 0.48 && pc.p_plus <= 0.52;
        r.details = {{"projected_steps", pc.steps}, {"p_plus", pc.p_plus}, {"band", {0.48, 0.52}}};
    }

    void independence(CheckResult& r) {
        std::vector<std::vector<int>> streams;
        for (const auto& [mc, mirror] : family_runs()) {
            std::optional<std::uint64_t> seed;
            for (const auto& s : mc.samples) {
                if (!seed || *seed != s.seed) {
                    streams.emplace_back();
                    seed = s.seed;
                }
                streams.back().push_back(s.w);
            }
        }
        std::size_t n = 0;
        for (const auto& s : streams) n += s.size();
        const double rho = pooled_lag1_autocorrelation(streams);
        r.passed = std::abs(rho) <= 0.03;
        r.details = {{"indicators", n}, {"lag1_autocorrelation", rho}, {"band", 0.03}};
    }

    void orientation(CheckResult& r) {
        json rows = json::array();
        r.passed = true;
        for (const auto& [mc, mirror] : family_runs()) {
            std::vector<WSample> pooled;
            for (const auto* run : {&mc, &mirror})
                pooled.insert(pooled.end(), run->samples.begin(), run->samples.end());
            const auto c = compare_rays(pooled);
            const bool ok = std::abs(c.z) <= 3.0;
            r.passed = r.passed && ok;
            rows.push_back({{"n_positive", c.n_positive},
                            {"n_negative", c.n_negative},
                            {"mean_positive", c.mean_positive},
                            {"mean_negative", c.mean_negative},
                            {"pooled_se", c.pooled_se},
                            {"z", c.z},
                            {"passed", ok}});
        }
        r.details = {{"families", rows}, {"max_abs_z", 3.0}};
    }

    const RunConfig& config_;
    std::vector<std::uint64_t> seeds_;
    std::optional<std::vector<std::pair<MonteCarloW, MonteCarloW>>> runs_;
};

} // namespace

VerifyOutput cmd_verify(const RunConfig& config) {
    for (const auto& name : config.checks)
        if (std::find(known_checks().begin(), known_checks().end(), name) == known_checks().end())
            throw UsageError("unknown check '" + name + "'");
    prepare_output_dir(config.output_dir);
    const bool explicit_request = !config.checks.empty();
    const auto& names = explicit_request ? config.checks : known_checks();

    Verifier verifier(config);
    VerifyOutput out;
    for (const auto& name : names) out.results.push_back(verifier.run(name, explicit_request));

    auto report = out.to_json();
    report["config"] = config.to_json();
    write_json(config.output_dir / "verify.json", report);
    for (const auto& [file, text] : verifier.tables) write_text(config.output_dir / file, text);
    return out;
}

json cmd_experiment(const RunConfig& config) {
    prepare_output_dir(config.output_dir / "replicas");
    const auto truth_verdict = solomon_classify(config.measure);
    const auto seeds = replica_seeds(config.seed, config.replicas);
    std::vector<std::size_t> indices(seeds.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;

    auto one = [&](std::size_t i) {
        const auto sim = run_simulation(config.measure, seeds[i], config.horizon, false);
        json row = {{"index", i}, {"seed", seeds[i]}};
        try {
            const auto rec = reconstruct(sim.observations, options_of(config));
            const double d = reconstruction_distance(rec, config.measure);
            row["mode"] = std::string(to_string(rec.mode));
            row["distance_metric"] =
                rec.atomic && rec.measure.purely_atomic() && config.measure.purely_atomic() ? "atomic_tv" : "grid_cdf";
            row["distance"] = d;
            row["verdict"] = std::string(to_string(rec.verdict));
            row["verdict_matches"] = rec.verdict == truth_verdict;
            row["measure"] = rec.measure.to_json();
        } catch (const Error& e) {
            row["error"] = e.what();
        }
        write_json(config.output_dir / "replicas" / ("replica_" + std::to_string(i) + ".json"), row);
        return row;
    };
    const auto rows = parallel_map(std::span<const std::size_t>(indices), one);

    json report = {{"config", config.to_json()},
                   {"truth", {{"measure", config.measure.to_json()}, {"verdict", std::string(to_string(truth_verdict))}}},
                   {"replicas", rows}};
    if (rows.size() > 1) {
        std::vector<double> d;
        std::size_t agree = 0, failed = 0;
        for (const auto& row : rows) {
            if (row.contains("error")) {
                ++failed;
                continue;
            }
            d.push_back(row["distance"].get<double>());
            agree += row["verdict_matches"].get<bool>();
        }
        json agg = {{"replicas", rows.size()}, {"failed", failed}};
        if (!d.empty()) {
            const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
            agg["mean_distance"] = mean;
            agg["max_distance"] = *std::max_element(d.begin(), d.end());
            agg["verdict_agreement"] = static_cast<double>(agree) / static_cast<double>(d.size());
        }
        report["aggregate"] = agg;
    }
    write_json(config.output_dir / "experiment.json", report);
    return report;
}

} // namespace rwre
