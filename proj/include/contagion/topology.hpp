#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "contagion/balance_sheets.hpp"

namespace contagion {

/// Fitness-model link probability z*y_i*y_j / (1 + z*y_i*y_j).
/// Throws DomainError on negative input.
double edge_probability(double z, double y_i, double y_j);

/// Sum of edge_probability over ordered pairs i != j: the expected number of
/// directed edges.
double expected_edge_count(double z, std::span<const double> fitness);

/// Sum of p_ij (1 - p_ij) over ordered pairs: variance of the edge count.
double edge_count_variance(double z, std::span<const double> fitness);

struct FitnessCalibration {
    double z = 0.0;
    std::vector<double> fitness;  // y_i, raw total assets
    double target_edges = 0.0;
    double achieved_expected_edges = 0.0;
    int iterations = 0;

    std::size_t size() const noexcept { return fitness.size(); }
};

struct CalibrationOptions {
    /// Absolute tolerance on the expected edge count; 0 selects 1e-9 * target.
    double tolerance = 0.0;
    int max_iterations = 200;
};

/// Solves expected_edge_count(z, y) = target_edges for z by bracketed
/// bisection, with y = total assets. The sum rises strictly from 0 to
/// N(N-1), so the root is unique.
FitnessCalibration calibrate_z(std::span<const double> fitness, double target_edges,
                               const CalibrationOptions& options = {});
FitnessCalibration calibrate_z(const BankPopulation& population, double target_edges,
                               const CalibrationOptions& options = {});

/// Directed edge (lender, borrower).
using Edge = std::pair<NodeId, NodeId>;

struct Topology {
    std::size_t n = 0;
    std::vector<Edge> edges;  // sorted, no self-loops, no duplicates
    std::uint64_t seed = 0;

    bool operator==(const Topology&) const = default;
};

/// Includes each ordered pair independently with its link probability,
/// visiting pairs in row-major order so a seed fixes the result.
Topology sample_topology(const FitnessCalibration& calibration, std::uint64_t seed);

struct TopologyEnsemble {
    std::vector<Topology> members;
    FitnessCalibration calibration;
    std::uint64_t master_seed = 0;
};

/// Member k is sample_topology(calibration, derive_seed(master_seed, k)).
TopologyEnsemble sample_ensemble(const FitnessCalibration& calibration, std::size_t size,
                                 std::uint64_t master_seed, unsigned jobs = 0);

struct DensityStats {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation, divisor count - 1
    std::size_t min = 0;
    std::size_t max = 0;
};

DensityStats density_stats(std::span<const std::size_t> edge_counts);
DensityStats density_stats(const TopologyEnsemble& ensemble);

/// Edge-list CSV `src,dst` plus a sidecar JSON {n, seed, z, target_edges}
/// written next to it with extension `.json`.
void save_topology(const Topology& topology, const FitnessCalibration& calibration,
                   const std::filesystem::path& csv_path);
Topology load_topology(const std::filesystem::path& csv_path);

}  // namespace contagion
