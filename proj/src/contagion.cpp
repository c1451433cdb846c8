#include "contagion/contagion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "contagion/errors.hpp"
#include "contagion/parallel.hpp"

namespace contagion {

ImpactMatrix::ImpactMatrix(std::size_t n) : n_(n), dense_(n * n, 0.0), rows_(n) {}

void ImpactMatrix::set(NodeId source, NodeId target, double value) {
    if (source >= n_ || target >= n_) throw DomainError("impact matrix index out of range");
    if (!(value >= 0.0 && value <= 1.0)) throw DomainError("impact entries must lie in [0, 1]");
    if (source == target && value != 0.0) throw DomainError("impact matrix diagonal must be zero");

    dense_[source * n_ + target] = value;
    auto& row = rows_[source];
    auto it = std::lower_bound(row.begin(), row.end(), target,
                               [](const Entry& e, NodeId t) { return e.target < t; });
    const bool present = it != row.end() && it->target == target;
    if (value == 0.0) {
        if (present) row.erase(it);
    } else if (present) {
        it->weight = value;
    } else {
        row.insert(it, Entry{target, value});
    }
}

ImpactMatrix build_impact_matrix(const WeightedNetwork& network, std::span<const double> market_caps) {
    if (market_caps.size() != network.n) throw ConfigError("market cap vector does not match network size");
    for (double c : market_caps)
        if (!(c > 0.0)) throw ValidationError("market capitalisation must be positive");

    ImpactMatrix W(network.n);
    for (const auto& e : network.edges) {
        if (e.units == 0) continue;
        const double exposure = network.weight(e);
        W.set(e.borrower, e.lender, std::min(1.0, exposure / market_caps[e.lender]));
    }
    return W;
}

ImpactMatrix build_impact_matrix(const WeightedNetwork& network, const BankPopulation& population) {
    const auto caps = population.market_caps();
    return build_impact_matrix(network, std::span<const double>(caps));
}

std::string_view to_string(Algorithm algorithm) {
    return algorithm == Algorithm::DebtRank ? "debtrank" : "cascade";
}

Algorithm parse_algorithm(std::string_view text) {
    if (text == "debtrank") return Algorithm::DebtRank;
    if (text == "cascade") return Algorithm::Cascade;
    throw ConfigError("unknown algorithm '" + std::string(text) + "'");
}

namespace {

void check_inputs(const ImpactMatrix& W, std::span<const double> shock, std::span<const double> values) {
    if (shock.size() != W.size() || values.size() != W.size())
        throw ConfigError("shock and value vectors must match the impact matrix size");
    for (double v : values)
        if (!(v > 0.0)) throw DomainError("economic values must be positive");
}

ContagionResult propagate(const ImpactMatrix& W, std::span<const double> shock,
                          std::span<const double> values, Algorithm algorithm, ContagionTrace* trace) {
    const std::size_t n = W.size();
    auto becomes_distressed = [algorithm](double h) {
        return algorithm == Algorithm::DebtRank ? h > 0.0 : h >= kDefaultThreshold;
    };

    std::vector<double> h(shock.begin(), shock.end());
    std::vector<NodeState> s(n, NodeState::Undistressed);
    for (NodeId i = 0; i < n; ++i)
        if (h[i] > 0.0) s[i] = NodeState::Distressed;
    if (trace) {
        trace->h.assign(1, h);
        trace->s.assign(1, s);
    }

    std::vector<NodeId> distressed;
    std::vector<double> next_h(n);
    std::size_t t = 1;
    while (true) {
        distressed.clear();
        for (NodeId j = 0; j < n; ++j)
            if (s[j] == NodeState::Distressed) distressed.push_back(j);
        if (distressed.empty()) break;

        next_h = h;
        for (NodeId j : distressed)
            for (const auto& [target, weight] : W.row(j)) next_h[target] += weight * h[j];
        for (auto& value : next_h) value = std::min(1.0, value);

        for (NodeId i = 0; i < n; ++i) {
            if (s[i] == NodeState::Distressed)
                s[i] = NodeState::Inactive;
            else if (s[i] == NodeState::Undistressed && becomes_distressed(next_h[i]))
                s[i] = NodeState::Distressed;
        }
        h.swap(next_h);
        ++t;
        if (trace) {
            trace->h.push_back(h);
            trace->s.push_back(s);
        }
    }

    ContagionResult result;
    result.steps = t;
    double total_value = 0.0;
    for (NodeId i = 0; i < n; ++i) {
        result.impact_currency += (h[i] - shock[i]) * values[i];
        total_value += values[i];
        if (h[i] >= kDefaultThreshold) result.defaulted.push_back(i);
    }
    result.impact_fraction = total_value > 0.0 ? std::clamp(result.impact_currency / total_value, 0.0, 1.0) : 0.0;
    result.final_h = std::move(h);
    return result;
}

}  // namespace

ContagionResult debtrank(const ImpactMatrix& W, std::span<const double> shock,
                         std::span<const double> values, ContagionTrace* trace) {
    check_inputs(W, shock, values);
    for (double psi : shock)
        if (!(psi >= 0.0 && psi <= 1.0)) throw DomainError("shock entries must lie in [0, 1]");
    return propagate(W, shock, values, Algorithm::DebtRank, trace);
}

ContagionResult default_cascade(const ImpactMatrix& W, std::span<const double> shock,
                                std::span<const double> values, ContagionTrace* trace) {
    check_inputs(W, shock, values);
    for (double psi : shock)
        if (psi != 0.0 && psi != 1.0)
            throw DomainError("default cascade only simulates complete defaults: shocks must be 0 or 1");
    return propagate(W, shock, values, Algorithm::Cascade, trace);
}

ContagionResult run_contagion(Algorithm algorithm, const ImpactMatrix& W, std::span<const double> shock,
                              std::span<const double> values, ContagionTrace* trace) {
    return algorithm == Algorithm::DebtRank ? debtrank(W, shock, values, trace)
                                            : default_cascade(W, shock, values, trace);
}

std::vector<std::pair<NodeId, double>> systemic_ranking(const ImpactMatrix& W,
                                                        std::span<const double> values,
                                                        Algorithm algorithm, unsigned jobs) {
    const std::size_t n = W.size();
    std::vector<std::pair<NodeId, double>> ranking(n);
    parallel_for(n, jobs, [&](std::size_t node) {
        std::vector<double> shock(n, 0.0);
        shock[node] = 1.0;
        ranking[node] = {node, run_contagion(algorithm, W, shock, values).impact_fraction};
    });
    std::stable_sort(ranking.begin(), ranking.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return ranking;
}

std::string to_json(const ContagionResult& result) {
    nlohmann::ordered_json out;
    out["final_h"] = result.final_h;
    out["impact_currency"] = result.impact_currency;
    out["impact_fraction"] = result.impact_fraction;
    out["defaulted"] = result.defaulted;
    out["steps"] = result.steps;
    return out.dump();
}

}  // namespace contagion
