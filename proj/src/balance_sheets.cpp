#include "contagion/balance_sheets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "contagion/csv.hpp"
#include "contagion/errors.hpp"
#include "contagion/random.hpp"

namespace contagion {

namespace {

const std::vector<std::string> kHeader = {"id",         "name",
                                          "total_assets", "market_cap",
                                          "interbank_assets", "interbank_liabilities"};

void validate_record(const BankRecord& bank, std::size_t row) {
    if (!(bank.total_assets > 0.0)) throw ValidationError("total_assets must be positive", row);
    if (!(bank.market_cap > 0.0)) throw ValidationError("market_cap must be positive", row);
    if (!(bank.interbank_assets >= 0.0))
        throw ValidationError("interbank_assets must be non-negative", row);
    if (bank.interbank_assets > bank.total_assets)
        throw ValidationError("interbank_assets exceed total_assets", row);
    if (!(bank.interbank_liabilities >= 0.0))
        throw ValidationError("interbank_liabilities must be non-negative", row);
}

}  // namespace

std::vector<double> BankPopulation::total_assets() const {
    std::vector<double> out(banks.size());
    std::transform(banks.begin(), banks.end(), out.begin(),
                   [](const BankRecord& b) { return b.total_assets; });
    return out;
}

std::vector<double> BankPopulation::market_caps() const {
    std::vector<double> out(banks.size());
    std::transform(banks.begin(), banks.end(), out.begin(),
                   [](const BankRecord& b) { return b.market_cap; });
    return out;
}

void validate(const BankPopulation& population) {
    if (population.banks.empty()) throw SchemaError("population is empty");
    for (std::size_t i = 0; i < population.banks.size(); ++i) {
        const auto& bank = population.banks[i];
        if (bank.id != i) throw SchemaError("bank ids must be contiguous 0..N-1 in row order");
        validate_record(bank, i + 1);
    }
}

BankPopulation with_market_caps(const BankPopulation& population, std::span<const double> caps) {
    if (caps.size() != population.size())
        throw ConfigError("market cap vector length does not match population");
    BankPopulation out = population;
    for (std::size_t i = 0; i < caps.size(); ++i) out.banks[i].market_cap = caps[i];
    return out;
}

std::vector<NodeId> largest_by_assets(const BankPopulation& population, std::size_t k) {
    std::vector<NodeId> order(population.size());
    std::iota(order.begin(), order.end(), NodeId{0});
    std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        return population[a].total_assets > population[b].total_assets;
    });
    order.resize(std::min(k, order.size()));
    return order;
}

BankPopulation load_population(const std::filesystem::path& path) {
    const auto table = csv::read(path);
    csv::require_header(table, kHeader, path);

    BankPopulation population;
    population.label = path.stem().string();
    std::vector<bool> seen(table.rows.size(), false);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& fields = table.rows[r];
        const std::size_t row = r + 1;
        if (fields.size() != kHeader.size())
            throw SchemaError(path.string() + ": row " + std::to_string(row) + " has " +
                              std::to_string(fields.size()) + " fields, expected 6");

        const auto id = csv::parse_int(fields[0], row, "id");
        if (id < 0 || static_cast<std::size_t>(id) >= seen.size())
            throw SchemaError(path.string() + ": id " + std::to_string(id) + " out of range (row " +
                              std::to_string(row) + ")");
        if (seen[static_cast<std::size_t>(id)])
            throw SchemaError(path.string() + ": duplicate id " + std::to_string(id) + " (row " +
                              std::to_string(row) + ")");
        if (static_cast<std::size_t>(id) != r)
            throw SchemaError(path.string() + ": id " + std::to_string(id) +
                              " out of row order (row " + std::to_string(row) + ")");
        seen[static_cast<std::size_t>(id)] = true;

        BankRecord bank;
        bank.id = static_cast<NodeId>(id);
        bank.name = fields[1];
        bank.total_assets = csv::parse_double(fields[2], row, "total_assets");
        bank.market_cap = csv::parse_double(fields[3], row, "market_cap");
        bank.interbank_assets = csv::parse_double(fields[4], row, "interbank_assets");
        bank.interbank_liabilities = csv::parse_double(fields[5], row, "interbank_liabilities");
        validate_record(bank, row);
        population.banks.push_back(std::move(bank));
    }
    if (population.banks.empty()) throw SchemaError(path.string() + ": no bank rows");
    return population;
}

void save_population(const BankPopulation& population, const std::filesystem::path& path) {
    auto out = csv::open_output(path);
    out << "id,name,total_assets,market_cap,interbank_assets,interbank_liabilities\n";
    for (const auto& bank : population.banks) {
        out << bank.id << ',' << bank.name << ',' << csv::format_double(bank.total_assets) << ','
            << csv::format_double(bank.market_cap) << ','
            << csv::format_double(bank.interbank_assets) << ','
            << csv::format_double(bank.interbank_liabilities) << '\n';
    }
    if (!out) throw IoError("write failure on " + path.string());
}

BankPopulation generate_synthetic_population(std::size_t n, std::uint64_t seed,
                                             const SynthParams& params) {
    if (n < 2) throw ConfigError("synthetic population needs at least 2 banks");
    if (!(params.pareto_shape > 0.0) || !(params.pareto_scale > 0.0))
        throw ConfigError("Pareto shape and scale must be positive");
    auto check_range = [](double lo, double hi, const char* what) {
        if (!(lo > 0.0) || !(hi >= lo) || hi > 1.0)
            throw ConfigError(std::string(what) + " range must satisfy 0 < min <= max <= 1");
    };
    check_range(params.cap_fraction_min, params.cap_fraction_max, "cap_fraction");
    check_range(params.ib_asset_fraction_min, params.ib_asset_fraction_max, "ib_asset_fraction");
    check_range(params.ib_liab_fraction_min, params.ib_liab_fraction_max, "ib_liab_fraction");

    Engine rng(seed);
    BankPopulation population;
    population.label = "synthetic-" + std::to_string(seed);
    population.banks.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        BankRecord bank;
        bank.id = i;
        bank.name = "bank_" + std::to_string(i);
        // Inverse CDF; 1 - u lies in (0, 1].
        const double u = uniform01(rng);
        bank.total_assets = params.pareto_scale * std::pow(1.0 - u, -1.0 / params.pareto_shape);
        bank.market_cap = bank.total_assets *
                          uniform(rng, params.cap_fraction_min, params.cap_fraction_max);
        bank.interbank_assets = bank.total_assets * uniform(rng, params.ib_asset_fraction_min,
                                                            params.ib_asset_fraction_max);
        bank.interbank_liabilities =
            bank.total_assets *
            uniform(rng, params.ib_liab_fraction_min, params.ib_liab_fraction_max);
        population.banks.push_back(std::move(bank));
    }
    return population;
}

}  // namespace contagion
