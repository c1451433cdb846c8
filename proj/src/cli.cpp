#include "contagion/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "contagion/balance_sheets.hpp"
#include "contagion/contagion.hpp"
#include "contagion/csv.hpp"
#include "contagion/errors.hpp"
#include "contagion/experiment.hpp"
#include "contagion/parallel.hpp"
#include "contagion/risk.hpp"
#include "contagion/topology.hpp"

namespace contagion::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kSchemaVersion = 1;
constexpr const char* kManifest = "manifest.json";
constexpr const char* kPopulationFile = "population.csv";

std::string member_file(std::size_t index) {
    char name[32];
    std::snprintf(name, sizeof name, "member_%03zu.csv", index);
    return name;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

NodeId parse_node(const std::string& text) {
    try {
        std::size_t used = 0;
        const auto value = std::stoll(text, &used);
        if (used == text.size() && value >= 0) return static_cast<NodeId>(value);
    } catch (const std::exception&) {
    }
    throw ConfigError("invalid node id '" + text + "'");
}

/// "topK" or a comma-separated id list.
std::vector<NodeId> select_nodes(const std::string& spec, const BankPopulation& population) {
    std::vector<NodeId> nodes;
    if (spec.starts_with("top")) {
        const auto k = parse_node(spec.substr(3));
        if (k == 0) throw ConfigError("top-k selector needs k >= 1");
        nodes = largest_by_assets(population, k);
    } else {
        for (const auto& item : split_list(spec)) nodes.push_back(parse_node(item));
    }
    if (nodes.empty()) throw ConfigError("no nodes selected");
    for (NodeId node : nodes)
        if (node >= population.size()) throw ConfigError("node " + std::to_string(node) + " out of range");
    return nodes;
}

std::vector<double> caps_at_step(const BankPopulation& population, std::size_t step, double factor) {
    if (step < 1) throw ConfigError("--step must be at least 1");
    return build_decay_schedule(population, step, factor).caps_at(step);
}

void write_text(const fs::path& path, const std::string& text) {
    auto out = csv::open_output(path);
    out << text << '\n';
    if (!out) throw IoError("write failure on " + path.string());
}

struct SynthOptions {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    SynthParams params;
    std::string output;
};

int cmd_synth(const SynthOptions& o) {
    const auto population = generate_synthetic_population(o.n, o.seed, o.params);
    save_population(population, o.output);
    std::cout << "wrote " << population.size() << " banks to " << o.output << '\n';
    return kOk;
}

struct EstimateOptions {
    std::string population;
    double edges = 0.0;
    std::size_t size = 50;
    std::uint64_t seed = 0;
    double increment = kDefaultIncrement;
    int max_sweeps = kDefaultMaxSweeps;
    std::string output;
};

int cmd_estimate(const EstimateOptions& o, unsigned jobs) {
    const auto population = load_population(o.population);
    const auto calibration = calibrate_z(population, o.edges);
    const auto ensemble = sample_ensemble(calibration, o.size, o.seed, jobs);
    const auto stats = density_stats(ensemble);

    std::vector<WeightedNetwork> weighted(ensemble.members.size());
    parallel_for(weighted.size(), jobs, [&](std::size_t k) {
        weighted[k] = assign_weights(ensemble.members[k], population, o.increment, o.max_sweeps);
    });

    const fs::path dir = o.output;
    save_population(population, dir / kPopulationFile);
    nlohmann::ordered_json manifest;
    manifest["schema_version"] = kSchemaVersion;
    manifest["population"] = kPopulationFile;
    manifest["z"] = calibration.z;
    manifest["K"] = calibration.target_edges;
    manifest["achieved_expected_edges"] = calibration.achieved_expected_edges;
    manifest["expected_edge_sd"] = std::sqrt(edge_count_variance(calibration.z, calibration.fitness));
    manifest["size"] = o.size;
    manifest["master_seed"] = o.seed;
    manifest["increment"] = o.increment;
    manifest["max_sweeps"] = o.max_sweeps;
    manifest["density_stats"] = {{"mean", stats.mean}, {"sd", stats.sd}, {"min", stats.min}, {"max", stats.max}};
    auto members = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < weighted.size(); ++k) {
        save_weighted_network(weighted[k], dir / member_file(k));
        nlohmann::ordered_json entry;
        entry["file"] = member_file(k);
        entry["seed"] = ensemble.members[k].seed;
        entry["edges"] = ensemble.members[k].edges.size();
        entry["total_lent"] = csv::format_fixed(weighted[k].total_lent(), 2);
        entry["sweeps"] = weighted[k].sweeps;
        members.push_back(std::move(entry));
    }
    manifest["members"] = std::move(members);
    write_text(dir / kManifest, manifest.dump(2));

    std::cout << "z = " << csv::format_double(calibration.z) << ", density mean "
              << csv::format_double(stats.mean) << " sd " << csv::format_double(stats.sd) << " over "
              << o.size << " members -> " << dir.string() << '\n';
    return kOk;
}

struct ExperimentOptions {
    std::string ensemble;
    std::size_t steps = kDefaultDecaySteps;
    double factor = kDefaultDecayFactor;
    std::string nodes = "top5";
    std::string algorithms = "debtrank,cascade";
    std::size_t histogram_bins = 0;
    std::string output;
};

int cmd_experiment(const ExperimentOptions& o, unsigned jobs) {
    if (!(o.factor > 0.0 && o.factor < 1.0)) throw ConfigError("--factor must lie in (0, 1)");
    if (o.steps < 1) throw ConfigError("--steps must be at least 1");
    std::vector<Algorithm> algorithms;
    for (const auto& name : split_list(o.algorithms)) algorithms.push_back(parse_algorithm(name));
    if (algorithms.empty()) throw ConfigError("no algorithms selected");

    const auto data = load_ensemble_dir(o.ensemble);
    const auto nodes = select_nodes(o.nodes, data.population);
    const auto schedule = build_decay_schedule(data.population, o.steps, o.factor);
    const auto sweep = run_failure_sweep(data.members, schedule, nodes, algorithms, jobs);

    const fs::path dir = o.output;
    save_sweep_long(sweep, dir / "sweep_long.csv");
    save_sweep_aggregate(sweep, dir / "sweep_aggregate.csv");
    if (o.histogram_bins > 0) {
        for (NodeId node : nodes)
            for (std::size_t step = 1; step <= o.steps; ++step)
                for (Algorithm algorithm : algorithms) {
                    const auto bins = impact_histogram(sweep, node, step, algorithm, o.histogram_bins);
                    save_histogram(bins, dir / "histograms" /
                                             ("node" + std::to_string(node) + "_step" + std::to_string(step) +
                                              "_" + std::string(to_string(algorithm)) + ".csv"));
                }
    }
    std::cout << "swept " << nodes.size() << " nodes x " << o.steps << " steps x " << data.members.size()
              << " members -> " << dir.string() << '\n';
    return kOk;
}

struct StressOptions {
    std::string ensemble;
    NodeId node = 0;
    std::size_t levels = 20;
    double min = 0.1;
    double max = 1.0;
    std::size_t step = 1;
    double factor = kDefaultDecayFactor;
    std::string output;
};

int cmd_stress(const StressOptions& o, unsigned jobs) {
    if (!(o.factor > 0.0 && o.factor < 1.0)) throw ConfigError("--factor must lie in (0, 1)");
    const auto grid = make_scenario_grid(o.node, o.levels, o.min, o.max, o.step);
    const auto data = load_ensemble_dir(o.ensemble);
    if (o.node >= data.population.size()) throw ConfigError("--node out of range");
    const auto caps = caps_at_step(data.population, o.step, o.factor);
    const auto levels = stress_sweep(data.members, caps, grid, jobs);
    save_stress_levels(levels, o.output);
    std::cout << "stress-tested node " << o.node << " at " << levels.size() << " levels -> " << o.output << '\n';
    return kOk;
}

struct LossOptions {
    std::string ensemble;
    std::string shock_nodes;
    double dist_mean = 0.5;
    double dist_sd = 0.05;
    std::size_t samples = 1000;
    std::uint64_t seed = 0;
    std::string scope = "network";
    std::string observe;
    std::size_t step = 1;
    double factor = kDefaultDecayFactor;
    std::string output;
};

int cmd_losses(const LossOptions& o, unsigned jobs) {
    if (!(o.factor > 0.0 && o.factor < 1.0)) throw ConfigError("--factor must lie in (0, 1)");
    LossScope scope;
    if (o.scope == "node")
        scope = LossScope::Node;
    else if (o.scope == "group")
        scope = LossScope::Group;
    else if (o.scope == "network")
        scope = LossScope::Network;
    else
        throw ConfigError("--scope must be node, group or network");

    ShockDistribution dist;
    dist.mean = o.dist_mean;
    dist.sd = o.dist_sd;
    dist.sample_count = o.samples;
    dist.seed = o.seed;
    if (o.samples == 0) throw ConfigError("--samples must be at least 1");
    const auto shocks = sample_shocks(dist);

    const auto data = load_ensemble_dir(o.ensemble);
    std::vector<NodeId> shocked;
    for (const auto& item : split_list(o.shock_nodes)) shocked.push_back(parse_node(item));
    std::vector<NodeId> observed;
    for (const auto& item : split_list(o.observe)) observed.push_back(parse_node(item));
    const auto caps = caps_at_step(data.population, o.step, o.factor);
    const auto losses = loss_distribution(data.members, caps, shocked, shocks, scope, observed, jobs);
    save_loss_samples(losses, o.output);
    std::cout << "wrote " << losses.samples.size() << " loss samples -> " << o.output << '\n';
    return kOk;
}

struct VarOptions {
    std::string input;
    double alpha = 0.95;
    std::string output;
};

int cmd_var(const VarOptions& o) {
    const auto losses = load_loss_samples(o.input);
    const auto report = value_at_risk(losses, o.alpha);
    if (o.output.empty())
        std::cout << to_json(report) << '\n';
    else
        write_text(o.output, to_json(report));
    return kOk;
}

}  // namespace

EnsembleDir load_ensemble_dir(const std::string& dir_name) {
    const fs::path dir = dir_name;
    std::ifstream in(dir / kManifest);
    if (!in) throw IoError("no ensemble manifest at " + (dir / kManifest).string());
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError((dir / kManifest).string() + ": " + e.what());
    }
    if (manifest.value("schema_version", 0) != kSchemaVersion)
        throw SchemaError((dir / kManifest).string() + ": unsupported schema_version");

    EnsembleDir data;
    try {
        data.increment = manifest.at("increment").get<double>();
        data.population = load_population(dir / manifest.at("population").get<std::string>());
        for (const auto& entry : manifest.at("members"))
            data.members.push_back(load_weighted_network(dir / entry.at("file").get<std::string>(),
                                                         data.population.size(), data.increment));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError((dir / kManifest).string() + ": " + e.what());
    }
    if (data.members.empty()) throw SchemaError((dir / kManifest).string() + ": no members");
    return data;
}

int run(int argc, const char* const* argv) {
    CLI::App app{"Interbank contagion lab: network reconstruction, DebtRank and default cascades"};
    app.set_config("--config", "", "TOML/INI file with option defaults; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();

    unsigned jobs = 0;
    app.add_option("--jobs,-j", jobs, "Worker threads (0 = all cores)")->envname("CONTAGION_LAB_JOBS");

    SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic power-law bank population");
    synth_cmd->add_option("--n", synth.n, "Number of banks")->required();
    synth_cmd->add_option("--seed", synth.seed, "RNG seed");
    synth_cmd->add_option("--shape", synth.params.pareto_shape, "Pareto shape of total assets")->capture_default_str();
    synth_cmd->add_option("--scale", synth.params.pareto_scale, "Pareto scale (mil USD)")->capture_default_str();
    synth_cmd->add_option("--cap-min", synth.params.cap_fraction_min)->capture_default_str();
    synth_cmd->add_option("--cap-max", synth.params.cap_fraction_max)->capture_default_str();
    synth_cmd->add_option("--ib-asset-min", synth.params.ib_asset_fraction_min)->capture_default_str();
    synth_cmd->add_option("--ib-asset-max", synth.params.ib_asset_fraction_max)->capture_default_str();
    synth_cmd->add_option("--ib-liab-min", synth.params.ib_liab_fraction_min)->capture_default_str();
    synth_cmd->add_option("--ib-liab-max", synth.params.ib_liab_fraction_max)->capture_default_str();
    synth_cmd->add_option("-o,--output", synth.output, "Population CSV to write")->required();

    EstimateOptions estimate;
    auto* estimate_cmd = app.add_subcommand("estimate", "Calibrate, sample and weight a network ensemble");
    estimate_cmd->add_option("--population", estimate.population, "Population CSV")->required();
    estimate_cmd->add_option("--edges", estimate.edges, "Target number of directed edges K")->required();
    estimate_cmd->add_option("--size", estimate.size, "Ensemble size")->capture_default_str();
    estimate_cmd->add_option("--seed", estimate.seed, "Master seed")->capture_default_str();
    estimate_cmd->add_option("--increment", estimate.increment, "Lending increment (mil USD)")->capture_default_str();
    estimate_cmd->add_option("--max-sweeps", estimate.max_sweeps, "Weighting sweep cap")->capture_default_str();
    estimate_cmd->add_option("-o,--output", estimate.output, "Ensemble directory")->required();

    ExperimentOptions experiment;
    auto* experiment_cmd = app.add_subcommand("experiment", "Capitalisation-decay failure sweep");
    experiment_cmd->add_option("--ensemble", experiment.ensemble, "Ensemble directory")->required();
    experiment_cmd->add_option("--steps", experiment.steps, "Time steps")->capture_default_str();
    experiment_cmd->add_option("--factor", experiment.factor, "Per-step cap decay factor")->capture_default_str();
    experiment_cmd->add_option("--nodes", experiment.nodes, "topK or comma-separated ids")->capture_default_str();
    experiment_cmd->add_option("--algorithms", experiment.algorithms, "debtrank,cascade")->capture_default_str();
    experiment_cmd->add_option("--histogram-bins", experiment.histogram_bins,
                               "Also write per-cell impact histograms with this many bins");
    experiment_cmd->add_option("-o,--output", experiment.output, "Output directory")->required();

    StressOptions stress;
    auto* stress_cmd = app.add_subcommand("stress", "DebtRank stress test over a grid of shock levels");
    stress_cmd->add_option("--ensemble", stress.ensemble, "Ensemble directory")->required();
    stress_cmd->add_option("--node", stress.node, "Stressed node id")->required();
    stress_cmd->add_option("--levels", stress.levels, "Number of shock levels")->capture_default_str();
    stress_cmd->add_option("--min", stress.min, "Smallest shock level")->capture_default_str();
    stress_cmd->add_option("--max", stress.max, "Largest shock level")->capture_default_str();
    stress_cmd->add_option("--step", stress.step, "Time step of the decay schedule")->capture_default_str();
    stress_cmd->add_option("--factor", stress.factor, "Per-step cap decay factor")->capture_default_str();
    stress_cmd->add_option("-o,--output", stress.output, "Stress band CSV")->required();

    LossOptions loss;
    auto* loss_cmd = app.add_subcommand("losses", "Loss distribution under random shocks");
    loss_cmd->add_option("--ensemble", loss.ensemble, "Ensemble directory")->required();
    loss_cmd->add_option("--shock-node", loss.shock_nodes, "Shocked node id(s), comma-separated")->required();
    loss_cmd->add_option("--dist-mean", loss.dist_mean)->capture_default_str();
    loss_cmd->add_option("--dist-sd", loss.dist_sd)->capture_default_str();
    loss_cmd->add_option("--samples", loss.samples, "Shock draws")->capture_default_str();
    loss_cmd->add_option("--seed", loss.seed, "Shock sampler seed")->capture_default_str();
    loss_cmd->add_option("--scope", loss.scope, "node, group or network")->capture_default_str();
    loss_cmd->add_option("--observe", loss.observe, "Observed node id(s) for node/group scope");
    loss_cmd->add_option("--step", loss.step, "Time step of the decay schedule")->capture_default_str();
    loss_cmd->add_option("--factor", loss.factor, "Per-step cap decay factor")->capture_default_str();
    loss_cmd->add_option("-o,--output", loss.output, "Loss sample CSV")->required();

    VarOptions var;
    auto* var_cmd = app.add_subcommand("var", "Empirical Value-at-Risk of a loss sample file");
    var_cmd->add_option("--input,-i", var.input, "Loss sample CSV")->required();
    var_cmd->add_option("--alpha", var.alpha, "Confidence level")->capture_default_str();
    var_cmd->add_option("-o,--output", var.output, "VaR JSON (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        if (*synth_cmd) return cmd_synth(synth);
        if (*estimate_cmd) return cmd_estimate(estimate, jobs);
        if (*experiment_cmd) return cmd_experiment(experiment, jobs);
        if (*stress_cmd) return cmd_stress(stress, jobs);
        if (*loss_cmd) return cmd_losses(loss, jobs);
        if (*var_cmd) return cmd_var(var);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoFailure;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoFailure;
    }
    return kInvalid;
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("contagion_lab");
    for (const auto& arg : args) argv.push_back(arg.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace contagion::cli
