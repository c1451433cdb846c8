#include "contagion/experiment.hpp"

#include <algorithm>
#include <cmath>

#include "contagion/csv.hpp"
#include "contagion/errors.hpp"
#include "contagion/parallel.hpp"

namespace contagion {

std::vector<double> DecaySchedule::caps_at(std::size_t step) const {
    if (step < 1 || step > steps) throw ConfigError("step " + std::to_string(step) + " outside schedule");
    const double scale = std::pow(factor, static_cast<double>(step - 1));
    std::vector<double> caps(base_caps.size());
    std::transform(base_caps.begin(), base_caps.end(), caps.begin(), [scale](double c) { return scale * c; });
    return caps;
}

DecaySchedule build_decay_schedule(const BankPopulation& population, std::size_t steps, double factor) {
    if (!(factor > 0.0 && factor < 1.0)) throw ConfigError("decay factor must lie in (0, 1)");
    if (steps < 1) throw ConfigError("decay schedule needs at least one step");
    return DecaySchedule{steps, factor, population.market_caps()};
}

ImpactBand summarize(std::span<const double> values) {
    if (values.empty()) throw ConfigError("cannot summarize an empty cell");
    ImpactBand band{0.0, values[0], values[0]};
    double sum = 0.0;
    for (double v : values) {
        sum += v;
        band.min = std::min(band.min, v);
        band.max = std::max(band.max, v);
    }
    // Clamp so rounding in the sum never pushes the mean outside [min, max].
    band.mean = std::clamp(sum / static_cast<double>(values.size()), band.min, band.max);
    return band;
}

SweepResult::SweepResult(std::vector<NodeId> nodes, std::size_t steps, std::vector<Algorithm> algorithms,
                         std::size_t members)
    : nodes_(std::move(nodes)),
      steps_(steps),
      algorithms_(std::move(algorithms)),
      members_(members),
      values_(nodes_.size() * steps_ * algorithms_.size() * members_, 0.0) {}

std::size_t SweepResult::offset(NodeId node, std::size_t step, Algorithm algorithm) const {
    const auto n_it = std::find(nodes_.begin(), nodes_.end(), node);
    const auto a_it = std::find(algorithms_.begin(), algorithms_.end(), algorithm);
    if (n_it == nodes_.end() || a_it == algorithms_.end() || step < 1 || step > steps_ || members_ == 0)
        throw ConfigError("sweep has no cell for node " + std::to_string(node) + ", step " +
                          std::to_string(step) + ", " + std::string(to_string(algorithm)));
    const auto n_idx = static_cast<std::size_t>(n_it - nodes_.begin());
    const auto a_idx = static_cast<std::size_t>(a_it - algorithms_.begin());
    return ((n_idx * steps_ + (step - 1)) * algorithms_.size() + a_idx) * members_;
}

std::span<const double> SweepResult::impacts(NodeId node, std::size_t step, Algorithm algorithm) const {
    return {values_.data() + offset(node, step, algorithm), members_};
}

std::span<double> SweepResult::impacts(NodeId node, std::size_t step, Algorithm algorithm) {
    return {values_.data() + offset(node, step, algorithm), members_};
}

ImpactBand SweepResult::aggregate(NodeId node, std::size_t step, Algorithm algorithm) const {
    return summarize(impacts(node, step, algorithm));
}

SweepResult run_failure_sweep(std::span<const WeightedNetwork> ensemble, const DecaySchedule& schedule,
                              std::span<const NodeId> nodes, std::span<const Algorithm> algorithms,
                              unsigned jobs) {
    if (ensemble.empty()) throw ConfigError("failure sweep needs a non-empty ensemble");
    if (nodes.empty()) throw ConfigError("failure sweep needs at least one node");
    if (algorithms.empty()) throw ConfigError("failure sweep needs at least one algorithm");
    const std::size_t n = schedule.base_caps.size();
    for (const auto& member : ensemble)
        if (member.n != n) throw ConfigError("ensemble member size does not match the schedule");
    for (NodeId node : nodes)
        if (node >= n) throw ConfigError("node " + std::to_string(node) + " out of range");

    SweepResult result({nodes.begin(), nodes.end()}, schedule.steps, {algorithms.begin(), algorithms.end()},
                       ensemble.size());

    // Impact fraction depends on caps only through W, so the base caps serve
    // as economic values at every step and saturated cells compare equal.
    const std::span<const double> values = schedule.base_caps;
    // One task per (step, member); each writes only its own member slot.
    const std::size_t tasks = schedule.steps * ensemble.size();
    parallel_for(tasks, jobs, [&](std::size_t task) {
        const std::size_t step = task / ensemble.size() + 1;
        const std::size_t member = task % ensemble.size();
        const auto caps = schedule.caps_at(step);
        const auto W = build_impact_matrix(ensemble[member], std::span<const double>(caps));
        std::vector<double> shock(n, 0.0);
        for (NodeId node : nodes) {
            shock[node] = 1.0;
            for (Algorithm algorithm : algorithms)
                result.impacts(node, step, algorithm)[member] =
                    run_contagion(algorithm, W, shock, values).impact_fraction;
            shock[node] = 0.0;
        }
    });
    return result;
}

std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bins) {
    if (bins == 0) throw ConfigError("histogram needs at least one bin");
    if (values.empty()) throw ConfigError("histogram of an empty cell");
    std::vector<HistogramBin> out(bins);
    const auto width = 1.0 / static_cast<double>(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        out[b].lo = static_cast<double>(b) / static_cast<double>(bins);
        out[b].hi = static_cast<double>(b + 1) / static_cast<double>(bins);
    }
    for (double v : values) {
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("histogram values must lie in [0, 1]");
        auto b = static_cast<std::size_t>(v / width);
        // Guard against v / width rounding across a bin edge.
        while (b > 0 && v < out[std::min(b, bins - 1)].lo) --b;
        while (b + 1 < bins && v >= out[b + 1].lo) ++b;
        ++out[std::min(b, bins - 1)].count;
    }
    return out;
}

std::vector<HistogramBin> impact_histogram(const SweepResult& sweep, NodeId node, std::size_t step,
                                           Algorithm algorithm, std::size_t bins) {
    return histogram(sweep.impacts(node, step, algorithm), bins);
}

void save_sweep_long(const SweepResult& sweep, const std::filesystem::path& path) {
    auto out = csv::open_output(path);
    out << "node,step,algorithm,member,impact_fraction\n";
    for (NodeId node : sweep.nodes())
        for (std::size_t step = 1; step <= sweep.steps(); ++step)
            for (Algorithm algorithm : sweep.algorithms()) {
                const auto cell = sweep.impacts(node, step, algorithm);
                for (std::size_t m = 0; m < cell.size(); ++m)
                    out << node << ',' << step << ',' << to_string(algorithm) << ',' << m << ','
                        << csv::format_double(cell[m]) << '\n';
            }
    if (!out) throw IoError("write failure on " + path.string());
}

void save_sweep_aggregate(const SweepResult& sweep, const std::filesystem::path& path) {
    auto out = csv::open_output(path);
    out << "node,step,algorithm,mean,min,max\n";
    for (NodeId node : sweep.nodes())
        for (std::size_t step = 1; step <= sweep.steps(); ++step)
            for (Algorithm algorithm : sweep.algorithms()) {
                const auto band = sweep.aggregate(node, step, algorithm);
                out << node << ',' << step << ',' << to_string(algorithm) << ','
                    << csv::format_double(band.mean) << ',' << csv::format_double(band.min) << ','
                    << csv::format_double(band.max) << '\n';
            }
    if (!out) throw IoError("write failure on " + path.string());
}

void save_histogram(std::span<const HistogramBin> bins, const std::filesystem::path& path) {
    auto out = csv::open_output(path);
    out << "bin_lo,bin_hi,count\n";
    for (const auto& bin : bins)
        out << csv::format_double(bin.lo) << ',' << csv::format_double(bin.hi) << ',' << bin.count << '\n';
    if (!out) throw IoError("write failure on " + path.string());
}

}  // namespace contagion
