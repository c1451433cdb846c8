#include "contagion/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "contagion/csv.hpp"
#include "contagion/errors.hpp"
#include "contagion/parallel.hpp"
#include "contagion/random.hpp"

namespace contagion {

namespace {

double probability_unchecked(double z, double y_i, double y_j) {
    const double x = z * y_i * y_j;
    if (std::isinf(x)) return 1.0;
    return x / (1.0 + x);
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
    auto path = csv_path;
    path.replace_extension(".json");
    return path;
}

}  // namespace

double edge_probability(double z, double y_i, double y_j) {
    if (z < 0.0 || y_i < 0.0 || y_j < 0.0 || std::isnan(z) || std::isnan(y_i) || std::isnan(y_j))
        throw DomainError("edge_probability requires non-negative inputs");
    return probability_unchecked(z, y_i, y_j);
}

double expected_edge_count(double z, std::span<const double> fitness) {
    double total = 0.0;
    for (std::size_t i = 0; i < fitness.size(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < fitness.size(); ++j)
            if (j != i) row += probability_unchecked(z, fitness[i], fitness[j]);
        total += row;
    }
    return total;
}

double edge_count_variance(double z, std::span<const double> fitness) {
    double total = 0.0;
    for (std::size_t i = 0; i < fitness.size(); ++i) {
        for (std::size_t j = 0; j < fitness.size(); ++j) {
            if (j == i) continue;
            const double p = probability_unchecked(z, fitness[i], fitness[j]);
            total += p * (1.0 - p);
        }
    }
    return total;
}

FitnessCalibration calibrate_z(std::span<const double> fitness, double target_edges,
                               const CalibrationOptions& options) {
    const auto n = static_cast<double>(fitness.size());
    const double pairs = n * (n - 1.0);
    if (!(target_edges > 0.0) || !(target_edges < pairs))
        throw InfeasibleError("target edge count must lie strictly between 0 and N(N-1) = " +
                              csv::format_double(pairs));
    for (double y : fitness)
        if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("fitness values must be positive");

    const double tol = options.tolerance > 0.0 ? options.tolerance : 1e-9 * target_edges;
    auto residual = [&](double z) { return expected_edge_count(z, fitness) - target_edges; };

    FitnessCalibration result;
    result.fitness.assign(fitness.begin(), fitness.end());
    result.target_edges = target_edges;

    double lo = 0.0;
    double hi = 1.0;
    // Grow the bracket until the sum overshoots.
    while (residual(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi))
            throw ConvergenceError("could not bracket z for target " +
                                   csv::format_double(target_edges));
    }

    // Bisect until the bracket stops shrinking, keeping the best midpoint;
    // the tolerance only decides success.
    double best_z = hi;
    double best_r = residual(hi);
    for (int it = 1; it <= options.max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double r = residual(mid);
        result.iterations = it;
        if (std::abs(r) < std::abs(best_r)) {
            best_z = mid;
            best_r = r;
        }
        if (r == 0.0) break;
        if (r < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    if (std::abs(best_r) > tol)
        throw ConvergenceError("z calibration did not reach tolerance within " +
                               std::to_string(options.max_iterations) + " iterations");
    result.z = best_z;
    result.achieved_expected_edges = best_r + target_edges;
    return result;
}

FitnessCalibration calibrate_z(const BankPopulation& population, double target_edges,
                               const CalibrationOptions& options) {
    const auto fitness = population.total_assets();
    return calibrate_z(std::span<const double>(fitness), target_edges, options);
}

Topology sample_topology(const FitnessCalibration& calibration, std::uint64_t seed) {
    if (calibration.z < 0.0) throw DomainError("calibration has negative z");
    const auto& y = calibration.fitness;

    Topology topology;
    topology.n = y.size();
    topology.seed = seed;
    Engine rng(seed);
    for (NodeId i = 0; i < y.size(); ++i) {
        for (NodeId j = 0; j < y.size(); ++j) {
            if (i == j) continue;
            // Always consume one draw per pair so the stream layout is fixed.
            const double u = uniform01(rng);
            if (u < probability_unchecked(calibration.z, y[i], y[j])) topology.edges.emplace_back(i, j);
        }
    }
    return topology;
}

TopologyEnsemble sample_ensemble(const FitnessCalibration& calibration, std::size_t size,
                                 std::uint64_t master_seed, unsigned jobs) {
    if (size == 0) throw ConfigError("ensemble size must be at least 1");
    TopologyEnsemble ensemble;
    ensemble.calibration = calibration;
    ensemble.master_seed = master_seed;
    ensemble.members.resize(size);
    parallel_for(size, jobs, [&](std::size_t k) {
        ensemble.members[k] = sample_topology(calibration, derive_seed(master_seed, k));
    });
    return ensemble;
}

DensityStats density_stats(std::span<const std::size_t> edge_counts) {
    if (edge_counts.empty()) throw ConfigError("density statistics need at least one member");
    DensityStats stats;
    const auto count = static_cast<double>(edge_counts.size());
    double sum = 0.0;
    for (auto c : edge_counts) sum += static_cast<double>(c);
    stats.mean = sum / count;
    double squares = 0.0;
    for (auto c : edge_counts) {
        const double d = static_cast<double>(c) - stats.mean;
        squares += d * d;
    }
    stats.sd = edge_counts.size() > 1 ? std::sqrt(squares / (count - 1.0)) : 0.0;
    const auto [lo, hi] = std::minmax_element(edge_counts.begin(), edge_counts.end());
    stats.min = *lo;
    stats.max = *hi;
    return stats;
}

DensityStats density_stats(const TopologyEnsemble& ensemble) {
    std::vector<std::size_t> counts;
    counts.reserve(ensemble.members.size());
    for (const auto& member : ensemble.members) counts.push_back(member.edges.size());
    return density_stats(std::span<const std::size_t>(counts));
}

void save_topology(const Topology& topology, const FitnessCalibration& calibration,
                   const std::filesystem::path& csv_path) {
    {
        auto out = csv::open_output(csv_path);
        out << "src,dst\n";
        for (const auto& [src, dst] : topology.edges) out << src << ',' << dst << '\n';
        if (!out) throw IoError("write failure on " + csv_path.string());
    }
    nlohmann::ordered_json meta;
    meta["n"] = topology.n;
    meta["seed"] = topology.seed;
    meta["z"] = calibration.z;
    meta["target_edges"] = calibration.target_edges;
    auto out = csv::open_output(sidecar_path(csv_path));
    out << meta.dump(2) << '\n';
    if (!out) throw IoError("write failure on " + sidecar_path(csv_path).string());
}

Topology load_topology(const std::filesystem::path& csv_path) {
    const auto meta_path = sidecar_path(csv_path);
    std::ifstream meta_in(meta_path);
    if (!meta_in) throw IoError("cannot open " + meta_path.string());
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(meta_in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(meta_path.string() + ": " + e.what());
    }
    if (!meta.contains("n") || !meta.contains("seed"))
        throw SchemaError(meta_path.string() + ": missing 'n' or 'seed'");

    Topology topology;
    topology.n = meta["n"].get<std::size_t>();
    topology.seed = meta["seed"].get<std::uint64_t>();

    const auto table = csv::read(csv_path);
    csv::require_header(table, {"src", "dst"}, csv_path);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& fields = table.rows[r];
        if (fields.size() != 2) throw SchemaError(csv_path.string() + ": malformed edge row");
        const auto src = csv::parse_int(fields[0], r + 1, "src");
        const auto dst = csv::parse_int(fields[1], r + 1, "dst");
        if (src < 0 || dst < 0 || static_cast<std::size_t>(src) >= topology.n ||
            static_cast<std::size_t>(dst) >= topology.n || src == dst)
            throw SchemaError(csv_path.string() + ": invalid edge on row " + std::to_string(r + 1));
        topology.edges.emplace_back(static_cast<NodeId>(src), static_cast<NodeId>(dst));
    }
    std::sort(topology.edges.begin(), topology.edges.end());
    if (std::adjacent_find(topology.edges.begin(), topology.edges.end()) != topology.edges.end())
        throw SchemaError(csv_path.string() + ": duplicate edge");
    return topology;
}

}  // namespace contagion
