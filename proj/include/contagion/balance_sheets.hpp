#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace contagion {

using NodeId = std::size_t;

/// One institution's balance sheet. Currency fields are millions of USD.
struct BankRecord {
    NodeId id = 0;
    std::string name;
    double total_assets = 0.0;
    double market_cap = 0.0;             // C_i, also the economic value v_i
    double interbank_assets = 0.0;       // A_i^IB, upper bound on total lending
    double interbank_liabilities = 0.0;  // L_i^IB, upper bound on total borrowing

    bool operator==(const BankRecord&) const = default;
};

struct BankPopulation {
    std::vector<BankRecord> banks;
    std::string label;

    std::size_t size() const noexcept { return banks.size(); }
    const BankRecord& operator[](NodeId id) const { return banks[id]; }

    std::vector<double> total_assets() const;
    std::vector<double> market_caps() const;

    bool operator==(const BankPopulation&) const = default;
};

/// Throws ValidationError (row = index + 1) on the first record breaking an
/// invariant, SchemaError if ids are not 0..N-1 in order or the population is
/// empty.
void validate(const BankPopulation& population);

/// Copy of `population` with market caps replaced by `caps`.
BankPopulation with_market_caps(const BankPopulation& population, std::span<const double> caps);

/// Ids of the `k` banks with the largest total assets, largest first; ties
/// go to the smaller id.
std::vector<NodeId> largest_by_assets(const BankPopulation& population, std::size_t k);

/// Reads `id,name,total_assets,market_cap,interbank_assets,interbank_liabilities`.
BankPopulation load_population(const std::filesystem::path& path);
void save_population(const BankPopulation& population, const std::filesystem::path& path);

struct SynthParams {
    double pareto_shape = 2.0;
    double pareto_scale = 100.0;
    double cap_fraction_min = 0.05;
    double cap_fraction_max = 0.20;
    double ib_asset_fraction_min = 0.05;
    double ib_asset_fraction_max = 0.30;
    double ib_liab_fraction_min = 0.05;
    double ib_liab_fraction_max = 0.30;
};

/// Pareto-distributed total assets with uniformly drawn balance-sheet
/// fractions. Pure function of its arguments.
BankPopulation generate_synthetic_population(std::size_t n, std::uint64_t seed,
                                             const SynthParams& params = {});

}  // namespace contagion
