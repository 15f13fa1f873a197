#pragma once

// Command-line front end: run / sweep / diffmap / optimize.

#include "morphogen/io.hpp"
#include "morphogen/morphogen.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace morphogen::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Failures detected before any simulation starts (exit code 2).
class UsageError : public Error {
public:
    using Error::Error;
};

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::string alpha;
    std::optional<int> steps;
    std::optional<int> n_per_step;
    std::optional<double> theta2;
    std::optional<double> rho;
    std::optional<int> moran_m;
    int jobs = 1;
    std::string out_dir = ".";
};

struct Loaded {
    io::Json raw;
    io::ScenarioFile file;
    EngineConfig engine;
    int moran_m = 0;
};

inline WeightVector parse_alpha(const std::string& text)
{
    WeightVector w;
    std::stringstream ss(text);
    std::string item;
    std::size_t k = 0;
    while (std::getline(ss, item, ',')) {
        if (k >= 4) throw UsageError("--alpha expects 4 comma-separated weights");
        try {
            std::size_t used = 0;
            w.alpha[k] = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("--alpha: not a number: '" + item + "'");
        }
        ++k;
    }
    if (k != 4) throw UsageError("--alpha expects 4 comma-separated weights");
    return w;
}

inline Loaded load(const std::string& path, const Overrides& o)
{
    Loaded l;
    if (!std::filesystem::exists(path)) throw UsageError("scenario file not found: " + path);
    try {
        l.raw = io::read_json_file(path);
        l.file = io::parse_scenario(l.raw);
    } catch (const InputError& e) {
        throw UsageError(path + ": " + e.what());
    }
    l.engine = l.file.engine;
    if (o.seed) {
        l.engine.seed = *o.seed;
    } else if (!l.file.seed) {
        l.engine.seed = 0;
        if (const char* env = std::getenv("MORPHOGEN_SEED")) {
            try {
                l.engine.seed = std::stoull(env);
            } catch (const std::exception&) {
                throw UsageError("MORPHOGEN_SEED is not an unsigned integer");
            }
        }
    }
    if (!o.alpha.empty()) l.engine.weights = parse_alpha(o.alpha);
    if (o.steps) l.engine.steps = *o.steps;
    if (o.n_per_step) l.engine.n_per_step = *o.n_per_step;
    if (o.theta2) l.engine.theta2 = *o.theta2;
    if (o.rho) l.engine.rho = *o.rho;
    l.moran_m = o.moran_m ? *o.moran_m : l.file.moran_m;
    if (l.moran_m == 0) l.moran_m = default_moran_partitions(l.file.spec.world_size);
    try {
        l.engine.validate();
        MoranConfig{l.moran_m}.validate(l.file.spec.world_size);
        if (l.file.segregation) l.file.segregation->validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    return l;
}

inline std::string config_hash(const Loaded& l, const io::Json& plan)
{
    const io::Json canonical{{"scenario", l.raw}, {"engine", io::engine_to_json(l.engine)}, {"moran_m", l.moran_m},
                             {"plan", plan}};
    return io::hex64(io::fnv1a(canonical.dump()));
}

// Files are collected in memory and written only once the command succeeded.
class Outputs {
public:
    explicit Outputs(std::string dir) : dir_(std::move(dir)) {}
    void add(const std::string& name, std::string content) { files_[name] = std::move(content); }
    void write() const
    {
        std::filesystem::create_directories(dir_);
        for (const auto& [name, content] : files_) {
            std::ofstream out(std::filesystem::path(dir_) / name, std::ios::binary);
            out << content;
            if (!out) throw Error("cannot write " + name);
        }
    }

private:
    std::string dir_;
    std::map<std::string, std::string> files_;
};

inline std::string provenance(const std::string& command, const std::string& hash, std::uint64_t base_seed,
                              const std::string& policy)
{
    return "# morphogen " + command + " config_hash=" + hash + " base_seed=" + std::to_string(base_seed) +
           " seed_policy=" + policy + "\n";
}

inline std::string alpha_cells(const WeightVector& w)
{
    std::string s;
    for (std::size_t k = 0; k < 4; ++k) s += io::format_double(w.alpha[k]) + ",";
    return s;
}

inline void cmd_run(const std::string& path, const Overrides& o, std::ostream& log)
{
    const auto l = load(path, o);
    SimulationState initial = [&] {
        try {
            auto s = instantiate(l.file.spec, l.engine.seed);
            validate_run(s, l.engine);
            return s;
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    }();
    auto result = run(std::move(initial), l.engine, l.moran_m);
    if (l.file.segregation) {
        result.metrics.H = residential_segregation(result.state.lattice, *l.file.segregation, l.engine.seed, l.moran_m);
    }
    Outputs out(o.out_dir);
    out.add("result.json", io::result_to_json(result, l.file.segregation).dump(2) + "\n");
    out.add("network.json", io::network_to_json(result.state.network).dump(2) + "\n");
    out.add("occupancy.pgm", io::to_pgm(result.state.lattice));
    out.write();
    const auto& m = result.metrics;
    log << "D=" << io::format_double(m.D) << " I=" << io::format_double(m.I) << " S=" << io::format_double(m.S)
        << " A=" << io::format_double(m.A);
    if (m.H) log << " H=" << io::format_double(*m.H);
    log << "\n";
}

inline void cmd_sweep(const std::string& path, const Overrides& o, std::optional<double> step,
                      std::optional<int> replicates, std::ostream& log)
{
    const auto l = load(path, o);
    SweepPlan plan;
    plan.step = step.value_or(l.file.sweep.step);
    plan.replicates = replicates.value_or(l.file.sweep.replicates);
    plan.base = l.engine;
    plan.scenario = l.file.spec;
    plan.base_seed = l.engine.seed;
    plan.moran_partitions = l.moran_m;
    plan.jobs = o.jobs;
    try {
        plan.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    const auto records = sweep(plan);
    const auto hash = config_hash(l, {{"command", "sweep"}, {"step", plan.step}, {"replicates", plan.replicates}});
    const auto head = provenance("sweep", hash, plan.base_seed, "derive_seed(base_seed,alpha_index,replicate)");

    std::string summary = head + "alpha1,alpha2,alpha3,alpha4,replicates,excluded";
    for (const char* m : kMetricNames) summary += std::string(",") + m + "_mean," + m + "_std";
    summary += "\n";
    std::string runs = head + "alpha1,alpha2,alpha3,alpha4,seed,D,I,S,A,H,lambda,error\n";
    std::string hist = head + "alpha1,alpha2,alpha3,alpha4,metric,bin,lo,hi,count\n";
    for (const auto& rec : records) {
        summary += alpha_cells(rec.alpha) + std::to_string(rec.replicates.size()) + "," + std::to_string(rec.excluded);
        for (std::size_t m = 0; m < 4; ++m) {
            if (rec.stats[m]) {
                summary += "," + io::format_double(rec.stats[m]->mean) + "," + io::format_double(rec.stats[m]->std);
            } else {
                summary += ",,";
            }
        }
        summary += "\n";
        for (const auto& r : rec.replicates) {
            runs += alpha_cells(rec.alpha) + std::to_string(r.seed) + ",";
            if (r.metrics) {
                runs += io::format_double(r.metrics->D) + "," + io::format_double(r.metrics->I) + "," +
                        io::format_double(r.metrics->S) + "," + io::format_double(r.metrics->A) + ",,,\n";
            } else {
                std::string msg = r.error;
                for (char& c : msg) {
                    if (c == ',' || c == '\n') c = ';';
                }
                runs += ",,,,,," + msg + "\n";
            }
        }
        for (std::size_t m = 0; m < 4; ++m) {
            if (!rec.stats[m]) continue;
            const auto& h = rec.stats[m]->histogram;
            const double width = (h.hi - h.lo) / static_cast<double>(h.counts.size());
            for (std::size_t b = 0; b < h.counts.size(); ++b) {
                hist += alpha_cells(rec.alpha) + kMetricNames[m] + "," + std::to_string(b) + "," +
                        io::format_double(h.lo + width * static_cast<double>(b)) + "," +
                        io::format_double(h.lo + width * static_cast<double>(b + 1)) + "," +
                        std::to_string(h.counts[b]) + "\n";
            }
        }
    }
    Outputs out(o.out_dir);
    out.add("sweep.csv", summary);
    out.add("runs.csv", runs);
    out.add("histograms.csv", hist);
    out.write();
    log << records.size() << " sweep records\n";
}

inline void cmd_diffmap(const std::string& path, const Overrides& o, std::optional<double> step,
                        std::optional<int> n_parallel, std::optional<int> replicates, std::ostream& log)
{
    const auto l = load(path, o);
    DiffPlan plan;
    try {
        plan.alphas = alpha_grid(step.value_or(l.file.diffmap.step));
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    plan.base = l.engine;
    plan.scenario = l.file.spec;
    plan.n_parallel = n_parallel.value_or(l.file.diffmap.n_parallel);
    plan.replicates = replicates.value_or(l.file.diffmap.replicates);
    plan.base_seed = l.engine.seed;
    plan.moran_partitions = l.moran_m;
    plan.jobs = o.jobs;
    if (plan.n_parallel < 1 || plan.replicates < 1) throw UsageError("--n-parallel and --replicates must be >= 1");
    const auto records = scheme_difference_map(plan);
    const auto hash = config_hash(l, {{"command", "diffmap"},
                                      {"step", step.value_or(l.file.diffmap.step)},
                                      {"n_parallel", plan.n_parallel},
                                      {"replicates", plan.replicates}});
    std::string csv = provenance("diffmap", hash, plan.base_seed, "derive_seed(base_seed,alpha_index,replicate)") +
                      "alpha1,alpha2,alpha3,alpha4,mean_delta,D,I,significance,projection_errors,delta_values\n";
    for (const auto& rec : records) {
        std::string sizes;
        for (std::size_t k = 0; k < rec.sizes.size(); ++k) sizes += (k ? ";" : "") + std::to_string(rec.sizes[k]);
        csv += alpha_cells(rec.alpha) + io::format_double(rec.mean_size) + "," + io::format_double(rec.D) + "," +
               io::format_double(rec.I) + "," + io::format_double(rec.significance) + "," +
               std::to_string(rec.projection_errors) + "," + sizes + "\n";
    }
    Outputs out(o.out_dir);
    out.add("diffmap.csv", csv);
    out.write();
    log << records.size() << " difference records\n";
}

inline void cmd_optimize(const std::string& path, const Overrides& o, std::optional<int> replicates,
                         bool exclude_station, std::ostream& log)
{
    const auto l = load(path, o);
    ZoningScenario z;
    z.scenario = l.file.spec;
    z.engine = l.engine;
    z.segregation = l.file.segregation.value_or(SegregationConfig{});
    z.moran_partitions = l.moran_m;
    z.station_in_accessibility = l.file.optimize.station_in_accessibility && !exclude_station;
    z.base_seed = l.engine.seed;
    const int reps = replicates.value_or(l.file.optimize.replicates);
    try {
        z.validate();
        if (reps < 1) throw InputError("--replicates must be >= 1");
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    const auto records = optimize(z, reps, o.jobs);
    const auto hash = config_hash(l, {{"command", "optimize"},
                                      {"replicates", reps},
                                      {"station_in_accessibility", z.station_in_accessibility},
                                      {"segregation", io::segregation_to_json(z.segregation)}});
    std::string csv = provenance("optimize", hash, z.base_seed, "derive_seed(base_seed,replicate)") +
                      "assignment,H_mean,H_std,A_mean,A_std,lambda,pareto,valid_replicates\n";
    int front = 0;
    for (const auto& rec : records) {
        front += rec.pareto ? 1 : 0;
        csv += to_string(rec.bits) + ",";
        if (rec.valid()) {
            csv += io::format_double(rec.H_mean) + "," + io::format_double(rec.H_std) + "," +
                   io::format_double(rec.A_mean) + "," + io::format_double(rec.A_std) + ",";
        } else {
            csv += ",,,,";
        }
        csv += io::format_double(rec.lambda) + "," + (rec.pareto ? "1" : "0") + "," +
               std::to_string(rec.H_values.size()) + "\n";
    }
    Outputs out(o.out_dir);
    out.add("assignments.csv", csv);
    out.write();
    log << records.size() << " assignments, " << front << " on the Pareto front\n";
}

inline constexpr const char* kFooter = R"(Outputs
  run       result.json (metrics, config echo, seed, pattern, network, build log),
            network.json (nodes [x,y], edges [a,b], centers {node, activity}),
            occupancy.pgm (plain PGM, built = 0, empty = 255, row k is j = k+1)
  sweep     sweep.csv: alpha1..alpha4, replicates, excluded, <M>_mean, <M>_std for M in D,I,S,A
            runs.csv: alpha1..alpha4, seed, D, I, S, A, H, lambda, error (one row per run)
            histograms.csv: alpha1..alpha4, metric, bin, lo, hi, count (20 bins over the observed range)
  diffmap   diffmap.csv: alpha1..alpha4, mean_delta, D, I, significance, projection_errors,
            delta_values (';'-separated |Delta| per replicate)
  optimize  assignments.csv: assignment bits, H_mean, H_std, A_mean, A_std, lambda, pareto (0/1),
            valid_replicates
Every CSV starts with a '#' provenance line (config hash, base seed, seed policy).
Seed: --seed, else engine.seed in the scenario, else $MORPHOGEN_SEED, else 0.
Exit codes: 0 success, 1 runtime error, 2 usage or schema error.)";

inline int main(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Hybrid network/grid urban morphogenesis simulator"};
    app.footer(kFooter);
    app.require_subcommand(1);

    Overrides o;
    std::string scenario;
    std::optional<double> step;
    std::optional<int> replicates;
    std::optional<int> n_parallel;
    bool exclude_station = false;

    auto common = [&](CLI::App* sub) {
        sub->add_option("scenario", scenario, "Scenario JSON file")->required();
        sub->add_option("--seed", o.seed, "Base seed");
        sub->add_option("--alpha", o.alpha, "Weights a1,a2,a3,a4");
        sub->add_option("--steps", o.steps, "Number of time steps T");
        sub->add_option("--n-per-step", o.n_per_step, "Cells built per step");
        sub->add_option("--theta2", o.theta2, "Maximum isolation distance");
        sub->add_option("--rho", o.rho, "Density neighborhood radius");
        sub->add_option("--moran-m", o.moran_m, "Moran partitions per side");
        sub->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--out-dir", o.out_dir, "Output directory");
    };
    auto* run_cmd = app.add_subcommand("run", "Run one simulation");
    common(run_cmd);
    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep the weight hypercube");
    common(sweep_cmd);
    sweep_cmd->add_option("--step", step, "Weight grid step (must divide 1)");
    sweep_cmd->add_option("--replicates", replicates, "Runs per grid point");
    auto* diff_cmd = app.add_subcommand("diffmap", "Sequential vs parallel update difference map");
    common(diff_cmd);
    diff_cmd->add_option("--step", step, "Weight grid step (must divide 1)");
    diff_cmd->add_option("--n-parallel", n_parallel, "Cells per step of the parallel scheme");
    diff_cmd->add_option("--replicates", replicates, "Runs per grid point");
    auto* opt_cmd = app.add_subcommand("optimize", "Enumerate activity assignments and extract the (H, A) front");
    common(opt_cmd);
    opt_cmd->add_option("--replicates", replicates, "Runs per assignment");
    opt_cmd->add_flag("--exclude-station", exclude_station, "Leave fixed centers out of accessibility");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run_cmd->parsed()) cmd_run(scenario, o, out);
        if (sweep_cmd->parsed()) cmd_sweep(scenario, o, step, replicates, out);
        if (diff_cmd->parsed()) cmd_diffmap(scenario, o, step, n_parallel, replicates, out);
        if (opt_cmd->parsed()) cmd_optimize(scenario, o, replicates, exclude_station, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

} // namespace morphogen::cli
