#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "contagion/balance_sheets.hpp"
#include "contagion/weights.hpp"

namespace contagion {

/// W(source, target): fraction of `target`'s capital wiped out when `source`
/// fully defaults. Kept dense for lookups, with per-source non-zero lists
/// for propagation.
class ImpactMatrix {
public:
    struct Entry {
        NodeId target;
        double weight;
    };

    ImpactMatrix() = default;
    explicit ImpactMatrix(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    double at(NodeId source, NodeId target) const { return dense_[source * n_ + target]; }

    /// Sets an entry; throws DomainError unless value is in [0, 1] and
    /// source != target (or value is 0).
    void set(NodeId source, NodeId target, double value);

    /// Non-zero entries with this source, ascending target.
    std::span<const Entry> row(NodeId source) const { return rows_[source]; }

private:
    std::size_t n_ = 0;
    std::vector<double> dense_;
    std::vector<std::vector<Entry>> rows_;
};

/// Maps lending to exposures. For lending w from lender i to borrower j,
/// the borrower's default hits the lender:
///   W(j, i) = min(1, w / C_i)
/// with C_i the lender's market capitalisation.
ImpactMatrix build_impact_matrix(const WeightedNetwork& network, std::span<const double> market_caps);
ImpactMatrix build_impact_matrix(const WeightedNetwork& network, const BankPopulation& population);

enum class NodeState : std::uint8_t { Undistressed, Distressed, Inactive };

enum class Algorithm : std::uint8_t { DebtRank, Cascade };

std::string_view to_string(Algorithm algorithm);
/// Accepts "debtrank" or "cascade"; throws ConfigError otherwise.
Algorithm parse_algorithm(std::string_view text);

struct ContagionResult {
    std::vector<double> final_h;
    double impact_currency = 0.0;  // R
    double impact_fraction = 0.0;  // R / sum of v
    std::vector<NodeId> defaulted;
    std::size_t steps = 0;  // T, the step at which no node is distressed
};

/// Per-step snapshots of h and s, starting at t = 1.
struct ContagionTrace {
    std::vector<std::vector<double>> h;
    std::vector<std::vector<NodeState>> s;
};

/// Distress at or above this counts as default.
inline constexpr double kDefaultThreshold = 1.0 - 1e-12;

/// DebtRank: every node with positive distress propagates its cumulative
/// distress exactly once, the step after it becomes distressed.
/// Throws DomainError if a shock lies outside [0, 1].
ContagionResult debtrank(const ImpactMatrix& W, std::span<const double> shock,
                         std::span<const double> values, ContagionTrace* trace = nullptr);

/// Default cascade: same distress accumulation, but only defaulted nodes
/// propagate. Shocks must be 0 or 1.
ContagionResult default_cascade(const ImpactMatrix& W, std::span<const double> shock,
                                std::span<const double> values, ContagionTrace* trace = nullptr);

ContagionResult run_contagion(Algorithm algorithm, const ImpactMatrix& W, std::span<const double> shock,
                              std::span<const double> values, ContagionTrace* trace = nullptr);

/// Runs a unit default on every node and returns (node, impact_fraction)
/// sorted by impact descending, ties by ascending node.
std::vector<std::pair<NodeId, double>> systemic_ranking(const ImpactMatrix& W,
                                                        std::span<const double> values,
                                                        Algorithm algorithm, unsigned jobs = 0);

/// {final_h, impact_currency, impact_fraction, defaulted, steps}
std::string to_json(const ContagionResult& result);

}  // namespace contagion
