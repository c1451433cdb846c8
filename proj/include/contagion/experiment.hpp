#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "contagion/balance_sheets.hpp"
#include "contagion/contagion.hpp"
#include "contagion/weights.hpp"

namespace contagion {

inline constexpr std::size_t kDefaultDecaySteps = 10;
inline constexpr double kDefaultDecayFactor = 0.3;

/// Market capitalisation at step t (1-based) is factor^(t-1) * base.
struct DecaySchedule {
    std::size_t steps = kDefaultDecaySteps;
    double factor = kDefaultDecayFactor;
    std::vector<double> base_caps;

    std::vector<double> caps_at(std::size_t step) const;
};

DecaySchedule build_decay_schedule(const BankPopulation& population,
                                   std::size_t steps = kDefaultDecaySteps,
                                   double factor = kDefaultDecayFactor);

struct ImpactBand {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

ImpactBand summarize(std::span<const double> values);

/// Impact fractions over a (node, step, algorithm, member) grid.
class SweepResult {
public:
    SweepResult() = default;
    SweepResult(std::vector<NodeId> nodes, std::size_t steps, std::vector<Algorithm> algorithms,
                std::size_t members);

    const std::vector<NodeId>& nodes() const noexcept { return nodes_; }
    std::size_t steps() const noexcept { return steps_; }
    const std::vector<Algorithm>& algorithms() const noexcept { return algorithms_; }
    std::size_t members() const noexcept { return members_; }

    /// Member impacts of one cell; `step` is 1-based. Throws ConfigError if
    /// the cell is not part of the sweep.
    std::span<const double> impacts(NodeId node, std::size_t step, Algorithm algorithm) const;
    std::span<double> impacts(NodeId node, std::size_t step, Algorithm algorithm);

    ImpactBand aggregate(NodeId node, std::size_t step, Algorithm algorithm) const;

private:
    std::size_t offset(NodeId node, std::size_t step, Algorithm algorithm) const;

    std::vector<NodeId> nodes_;
    std::size_t steps_ = 0;
    std::vector<Algorithm> algorithms_;
    std::size_t members_ = 0;
    std::vector<double> values_;
};

/// For every step, rebuilds each member's impact matrix from its fixed
/// weights and the decayed caps, then defaults each selected node under each
/// algorithm.
SweepResult run_failure_sweep(std::span<const WeightedNetwork> ensemble, const DecaySchedule& schedule,
                              std::span<const NodeId> nodes, std::span<const Algorithm> algorithms,
                              unsigned jobs = 0);

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
};

/// Equal-width bins over [0, 1]; 1.0 falls in the last bin.
std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bins);
std::vector<HistogramBin> impact_histogram(const SweepResult& sweep, NodeId node, std::size_t step,
                                           Algorithm algorithm, std::size_t bins);

/// `node,step,algorithm,member,impact_fraction`
void save_sweep_long(const SweepResult& sweep, const std::filesystem::path& path);
/// `node,step,algorithm,mean,min,max`
void save_sweep_aggregate(const SweepResult& sweep, const std::filesystem::path& path);
/// `bin_lo,bin_hi,count`
void save_histogram(std::span<const HistogramBin> bins, const std::filesystem::path& path);

}  // namespace contagion
