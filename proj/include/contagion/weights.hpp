#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "contagion/balance_sheets.hpp"
#include "contagion/topology.hpp"

namespace contagion {

inline constexpr double kDefaultIncrement = 0.01;  // mil USD lent per transfer
inline constexpr int kDefaultMaxSweeps = 500;

/// Lending edge: `lender` lends units * increment to `borrower`.
struct WeightedEdge {
    NodeId lender = 0;
    NodeId borrower = 0;
    std::int64_t units = 0;

    bool operator==(const WeightedEdge&) const = default;
};

/// Weighted lending network. Weights are stored as integer counts of the
/// lending increment so balance-sheet constraints are checked exactly.
struct WeightedNetwork {
    std::size_t n = 0;
    double increment = kDefaultIncrement;
    std::vector<WeightedEdge> edges;  // sorted by (lender, borrower)
    int sweeps = 0;                   // sweeps performed by assign_weights
    bool saturated = false;           // stopped on a sweep with no transfer

    double weight(const WeightedEdge& e) const { return static_cast<double>(e.units) * increment; }
    double total_lent() const;

    /// Units lent by each node (row sums) and borrowed by each node (column sums).
    std::vector<std::int64_t> lent_units() const;
    std::vector<std::int64_t> borrowed_units() const;

    bool operator==(const WeightedNetwork&) const = default;
};

/// Largest k with k * increment <= amount, allowing 1e-9 increments of
/// representation slack so 3.0 / 0.01 yields 300.
std::int64_t grid_capacity(double amount, double increment);

/// Round-robin incremental lending. Each sweep visits lenders in ascending
/// id and, within a lender, successors in ascending id, moving one
/// increment along every edge whose lender still has interbank assets and
/// whose borrower still has interbank liabilities on the increment grid.
/// Stops after a sweep with no transfer or after `max_sweeps` sweeps.
WeightedNetwork assign_weights(const Topology& topology, const BankPopulation& population,
                               double increment = kDefaultIncrement,
                               int max_sweeps = kDefaultMaxSweeps);

WeightedNetwork prune_zero_edges(const WeightedNetwork& network);

/// Number of lenders over their A^IB capacity plus borrowers over their
/// L^IB capacity; 0 for every network produced by assign_weights.
std::size_t constraint_violations(const WeightedNetwork& network, const BankPopulation& population);

/// CSV `src,dst,weight`, weights fixed-point with two decimals.
void save_weighted_network(const WeightedNetwork& network, const std::filesystem::path& path);
WeightedNetwork load_weighted_network(const std::filesystem::path& path, std::size_t n,
                                      double increment = kDefaultIncrement);

}  // namespace contagion
