#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "contagion/balance_sheets.hpp"
#include "contagion/experiment.hpp"
#include "contagion/weights.hpp"

namespace contagion {

struct ScenarioGrid {
    NodeId target_node = 0;
    std::vector<double> shock_levels;  // strictly increasing, in (0, 1]
    std::size_t step = 1;              // time step whose caps are used
};

/// `count` equally spaced levels from `lo` to `hi` inclusive; endpoints are
/// reproduced exactly.
ScenarioGrid make_scenario_grid(NodeId target, std::size_t count = 20, double lo = 0.1, double hi = 1.0,
                                std::size_t step = 1);

/// Throws DomainError on a level outside (0, 1] or a non-increasing sequence.
void validate(const ScenarioGrid& grid);

struct StressLevel {
    double level = 0.0;
    ImpactBand band;
    std::vector<double> member_impacts;
};

/// DebtRank with the grid's target shocked at each level, on every member,
/// with `market_caps` as both capital and economic value.
std::vector<StressLevel> stress_sweep(std::span<const WeightedNetwork> ensemble,
                                      std::span<const double> market_caps, const ScenarioGrid& grid,
                                      unsigned jobs = 0);

struct ShockDistribution {
    double mean = 0.5;
    double sd = 0.05;
    double lower = 0.0;
    double upper = 1.0;
    std::size_t sample_count = 1000;
    std::uint64_t seed = 0;
};

/// Normal(mean, sd) draws restricted to [lower, upper] by rejection.
std::vector<double> sample_shocks(const ShockDistribution& dist);

enum class LossScope { Node, Group, Network };

struct LossSample {
    std::size_t sample_index = 0;
    std::size_t member_index = 0;
    double shock = 0.0;
    double loss_fraction = 0.0;
};

struct LossDistribution {
    std::vector<LossSample> samples;  // sample-major, member-minor
    LossScope scope = LossScope::Network;
    std::string conditioning;

    std::vector<double> losses() const;
};

/// For every (shock, member) pair, shocks every node in `shocked` by the
/// sample and measures the loss on the observed scope:
///   Node    final distress of the single observed node
///   Group   value-weighted mean final distress of the observed nodes
///   Network impact fraction
/// Observed nodes must not overlap the shocked set.
LossDistribution loss_distribution(std::span<const WeightedNetwork> ensemble,
                                   std::span<const double> market_caps, std::span<const NodeId> shocked,
                                   std::span<const double> shocks, LossScope scope,
                                   std::span<const NodeId> observed = {}, unsigned jobs = 0);

struct VaRReport {
    double alpha = 0.95;
    double var_value = 0.0;
    std::size_t n_samples = 0;
};

/// Empirical VaR: the smallest sample l such that the share of samples
/// strictly above l is at most 1 - alpha.
VaRReport value_at_risk(std::span<const double> losses, double alpha = 0.95);
VaRReport value_at_risk(const LossDistribution& losses, double alpha = 0.95);

std::string to_json(const VaRReport& report);

/// `level,mean,min,max`
void save_stress_levels(std::span<const StressLevel> levels, const std::filesystem::path& path);
/// `sample_index,member_index,shock,loss_fraction`
void save_loss_samples(const LossDistribution& losses, const std::filesystem::path& path);
LossDistribution load_loss_samples(const std::filesystem::path& path);

}  // namespace contagion
