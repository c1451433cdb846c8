#include "contagion/weights.hpp"

#include <algorithm>
#include <cmath>

#include "contagion/csv.hpp"
#include "contagion/errors.hpp"

namespace contagion {

double WeightedNetwork::total_lent() const {
    std::int64_t units = 0;
    for (const auto& e : edges) units += e.units;
    return static_cast<double>(units) * increment;
}

std::vector<std::int64_t> WeightedNetwork::lent_units() const {
    std::vector<std::int64_t> sums(n, 0);
    for (const auto& e : edges) sums[e.lender] += e.units;
    return sums;
}

std::vector<std::int64_t> WeightedNetwork::borrowed_units() const {
    std::vector<std::int64_t> sums(n, 0);
    for (const auto& e : edges) sums[e.borrower] += e.units;
    return sums;
}

std::int64_t grid_capacity(double amount, double increment) {
    if (!(amount > 0.0)) return 0;
    return static_cast<std::int64_t>(std::floor(amount / increment + 1e-9));
}

WeightedNetwork assign_weights(const Topology& topology, const BankPopulation& population,
                               double increment, int max_sweeps) {
    if (topology.n != population.size())
        throw ConfigError("topology has " + std::to_string(topology.n) + " nodes but population has " +
                          std::to_string(population.size()));
    if (!(increment > 0.0)) throw ConfigError("lending increment must be positive");
    if (max_sweeps < 1) throw ConfigError("max_sweeps must be at least 1");

    WeightedNetwork network;
    network.n = topology.n;
    network.increment = increment;
    network.edges.reserve(topology.edges.size());
    for (const auto& [src, dst] : topology.edges) network.edges.push_back({src, dst, 0});
    std::sort(network.edges.begin(), network.edges.end(),
              [](const WeightedEdge& a, const WeightedEdge& b) {
                  return std::pair(a.lender, a.borrower) < std::pair(b.lender, b.borrower);
              });

    std::vector<std::int64_t> lend_room(network.n);
    std::vector<std::int64_t> borrow_room(network.n);
    for (NodeId i = 0; i < network.n; ++i) {
        lend_room[i] = grid_capacity(population[i].interbank_assets, increment);
        borrow_room[i] = grid_capacity(population[i].interbank_liabilities, increment);
    }

    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        bool transferred = false;
        for (auto& e : network.edges) {
            if (lend_room[e.lender] > 0 && borrow_room[e.borrower] > 0) {
                ++e.units;
                --lend_room[e.lender];
                --borrow_room[e.borrower];
                transferred = true;
            }
        }
        network.sweeps = sweep;
        if (!transferred) {
            network.saturated = true;
            break;
        }
    }
    return network;
}

WeightedNetwork prune_zero_edges(const WeightedNetwork& network) {
    WeightedNetwork pruned = network;
    std::erase_if(pruned.edges, [](const WeightedEdge& e) { return e.units == 0; });
    return pruned;
}

std::size_t constraint_violations(const WeightedNetwork& network, const BankPopulation& population) {
    if (network.n != population.size()) throw ConfigError("network and population sizes differ");
    const auto lent = network.lent_units();
    const auto borrowed = network.borrowed_units();
    std::size_t violations = 0;
    for (NodeId i = 0; i < network.n; ++i) {
        if (lent[i] > grid_capacity(population[i].interbank_assets, network.increment)) ++violations;
        if (borrowed[i] > grid_capacity(population[i].interbank_liabilities, network.increment))
            ++violations;
    }
    for (const auto& e : network.edges)
        if (e.units < 0) ++violations;
    return violations;
}

void save_weighted_network(const WeightedNetwork& network, const std::filesystem::path& path) {
    auto out = csv::open_output(path);
    out << "src,dst,weight\n";
    for (const auto& e : network.edges)
        out << e.lender << ',' << e.borrower << ',' << csv::format_fixed(network.weight(e), 2) << '\n';
    if (!out) throw IoError("write failure on " + path.string());
}

WeightedNetwork load_weighted_network(const std::filesystem::path& path, std::size_t n,
                                      double increment) {
    if (!(increment > 0.0)) throw ConfigError("lending increment must be positive");
    const auto table = csv::read(path);
    csv::require_header(table, {"src", "dst", "weight"}, path);

    WeightedNetwork network;
    network.n = n;
    network.increment = increment;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& fields = table.rows[r];
        const std::size_t row = r + 1;
        if (fields.size() != 3) throw SchemaError(path.string() + ": malformed row " + std::to_string(row));
        const auto src = csv::parse_int(fields[0], row, "src");
        const auto dst = csv::parse_int(fields[1], row, "dst");
        const double weight = csv::parse_double(fields[2], row, "weight");
        if (src < 0 || dst < 0 || static_cast<std::size_t>(src) >= n ||
            static_cast<std::size_t>(dst) >= n || src == dst)
            throw SchemaError(path.string() + ": invalid edge on row " + std::to_string(row));
        if (weight < 0.0) throw ValidationError("negative weight", row);
        const double scaled = weight / increment;
        const auto units = static_cast<std::int64_t>(std::llround(scaled));
        if (std::abs(scaled - static_cast<double>(units)) > 1e-6)
            throw ValidationError("weight " + std::string(fields[2]) + " is off the increment grid", row);
        network.edges.push_back({static_cast<NodeId>(src), static_cast<NodeId>(dst), units});
    }
    std::sort(network.edges.begin(), network.edges.end(),
              [](const WeightedEdge& a, const WeightedEdge& b) {
                  return std::pair(a.lender, a.borrower) < std::pair(b.lender, b.borrower);
              });
    auto same_pair = [](const WeightedEdge& a, const WeightedEdge& b) {
        return a.lender == b.lender && a.borrower == b.borrower;
    };
    if (std::adjacent_find(network.edges.begin(), network.edges.end(), same_pair) != network.edges.end())
        throw SchemaError(path.string() + ": duplicate edge");
    return network;
}

}  // namespace contagion
