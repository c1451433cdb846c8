#include "contagion/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "contagion/contagion.hpp"
#include "contagion/csv.hpp"
#include "contagion/errors.hpp"
#include "contagion/parallel.hpp"
#include "contagion/random.hpp"

namespace contagion {

ScenarioGrid make_scenario_grid(NodeId target, std::size_t count, double lo, double hi, std::size_t step) {
    if (count == 0) throw ConfigError("scenario grid needs at least one level");
    ScenarioGrid grid;
    grid.target_node = target;
    grid.step = step;
    if (count == 1) {
        grid.shock_levels = {hi};
    } else {
        const auto last = static_cast<double>(count - 1);
        for (std::size_t k = 0; k < count; ++k) {
            const auto kk = static_cast<double>(k);
            grid.shock_levels.push_back((lo * (last - kk) + hi * kk) / last);
        }
    }
    validate(grid);
    return grid;
}

void validate(const ScenarioGrid& grid) {
    if (grid.shock_levels.empty()) throw DomainError("scenario grid has no levels");
    for (std::size_t k = 0; k < grid.shock_levels.size(); ++k) {
        const double level = grid.shock_levels[k];
        if (!(level > 0.0 && level <= 1.0)) throw DomainError("shock levels must lie in (0, 1]");
        if (k > 0 && !(level > grid.shock_levels[k - 1]))
            throw DomainError("shock levels must be strictly increasing");
    }
}

std::vector<StressLevel> stress_sweep(std::span<const WeightedNetwork> ensemble,
                                      std::span<const double> market_caps, const ScenarioGrid& grid,
                                      unsigned jobs) {
    validate(grid);
    if (ensemble.empty()) throw ConfigError("stress sweep needs a non-empty ensemble");
    if (grid.target_node >= market_caps.size()) throw ConfigError("stress target out of range");

    std::vector<StressLevel> levels(grid.shock_levels.size());
    for (std::size_t k = 0; k < levels.size(); ++k) {
        levels[k].level = grid.shock_levels[k];
        levels[k].member_impacts.assign(ensemble.size(), 0.0);
    }
    parallel_for(ensemble.size(), jobs, [&](std::size_t member) {
        const auto W = build_impact_matrix(ensemble[member], market_caps);
        std::vector<double> shock(market_caps.size(), 0.0);
        for (auto& level : levels) {
            shock[grid.target_node] = level.level;
            level.member_impacts[member] = debtrank(W, shock, market_caps).impact_fraction;
        }
    });
    for (auto& level : levels) level.band = summarize(level.member_impacts);
    return levels;
}

std::vector<double> sample_shocks(const ShockDistribution& dist) {
    if (!(dist.sd > 0.0)) throw DomainError("shock distribution needs sd > 0");
    if (!(dist.lower < dist.upper)) throw DomainError("shock distribution bounds are empty");
    if (!(dist.mean >= dist.lower && dist.mean <= dist.upper))
        throw DomainError("shock distribution mean must lie within its bounds");

    Engine rng(dist.seed);
    // Box-Muller on our own uniforms so the stream does not depend on the
    // standard library's normal_distribution.
    auto standard_normal = [&rng] {
        const double u1 = 1.0 - uniform01(rng);  // (0, 1]
        const double u2 = uniform01(rng);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    };

    constexpr std::size_t kMaxConsecutiveRejects = 1'000'000;
    std::vector<double> out;
    out.reserve(dist.sample_count);
    std::size_t rejects = 0;
    while (out.size() < dist.sample_count) {
        const double x = dist.mean + dist.sd * standard_normal();
        if (x >= dist.lower && x <= dist.upper) {
            out.push_back(x);
            rejects = 0;
        } else if (++rejects > kMaxConsecutiveRejects) {
            throw ConvergenceError("truncated normal rejection sampling is not making progress");
        }
    }
    return out;
}

std::vector<double> LossDistribution::losses() const {
    std::vector<double> out(samples.size());
    std::transform(samples.begin(), samples.end(), out.begin(),
                   [](const LossSample& s) { return s.loss_fraction; });
    return out;
}

LossDistribution loss_distribution(std::span<const WeightedNetwork> ensemble,
                                   std::span<const double> market_caps, std::span<const NodeId> shocked,
                                   std::span<const double> shocks, LossScope scope,
                                   std::span<const NodeId> observed, unsigned jobs) {
    const std::size_t n = market_caps.size();
    if (ensemble.empty()) throw ConfigError("loss distribution needs a non-empty ensemble");
    if (shocks.empty()) throw ConfigError("loss distribution needs at least one shock sample");
    if (shocked.empty()) throw ConfigError("loss distribution needs at least one shocked node");
    for (NodeId node : shocked)
        if (node >= n) throw ConfigError("shocked node " + std::to_string(node) + " out of range");
    for (double s : shocks)
        if (!(s >= 0.0 && s <= 1.0)) throw DomainError("shock samples must lie in [0, 1]");
    if (scope == LossScope::Node && observed.size() != 1)
        throw ConfigError("node scope observes exactly one node");
    if (scope == LossScope::Group && observed.empty()) throw ConfigError("group scope needs observed nodes");
    if (scope != LossScope::Network) {
        for (NodeId node : observed) {
            if (node >= n) throw ConfigError("observed node " + std::to_string(node) + " out of range");
            if (std::find(shocked.begin(), shocked.end(), node) != shocked.end())
                throw ConfigError("observed node " + std::to_string(node) + " is also shocked");
        }
    }

    double observed_value = 0.0;
    for (NodeId node : observed) observed_value += market_caps[node];

    LossDistribution result;
    result.scope = scope;
    result.samples.resize(shocks.size() * ensemble.size());
    parallel_for(ensemble.size(), jobs, [&](std::size_t member) {
        const auto W = build_impact_matrix(ensemble[member], market_caps);
        std::vector<double> psi(n, 0.0);
        for (std::size_t k = 0; k < shocks.size(); ++k) {
            for (NodeId node : shocked) psi[node] = shocks[k];
            const auto run = debtrank(W, psi, market_caps);
            double loss = 0.0;
            switch (scope) {
                case LossScope::Node: loss = run.final_h[observed[0]]; break;
                case LossScope::Group: {
                    double lost = 0.0;
                    for (NodeId node : observed) lost += run.final_h[node] * market_caps[node];
                    loss = std::clamp(lost / observed_value, 0.0, 1.0);
                    break;
                }
                case LossScope::Network: loss = run.impact_fraction; break;
            }
            result.samples[k * ensemble.size() + member] = {k, member, shocks[k], loss};
        }
    });

    std::string who;
    for (NodeId node : shocked) who += (who.empty() ? "" : " ") + std::to_string(node);
    result.conditioning = "shocked nodes {" + who + "}, " + std::to_string(shocks.size()) + " shock samples";
    return result;
}

VaRReport value_at_risk(std::span<const double> losses, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("VaR confidence alpha must lie in (0, 1)");
    if (losses.empty()) throw ConfigError("VaR of an empty loss distribution");

    std::vector<double> sorted(losses.begin(), losses.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    // Absorbs representation error in (1 - alpha) * n, e.g. alpha = 0.9.
    const double allowed = (1.0 - alpha) * n + 1e-9;

    VaRReport report{alpha, sorted.back(), sorted.size()};
    for (auto it = sorted.begin(); it != sorted.end(); ++it) {
        const auto above = static_cast<double>(sorted.end() - std::upper_bound(it, sorted.end(), *it));
        if (above <= allowed) {
            report.var_value = *it;
            break;
        }
    }
    return report;
}

VaRReport value_at_risk(const LossDistribution& losses, double alpha) {
    const auto values = losses.losses();
    return value_at_risk(std::span<const double>(values), alpha);
}

std::string to_json(const VaRReport& report) {
    nlohmann::ordered_json out;
    out["alpha"] = report.alpha;
    out["var_value"] = report.var_value;
    out["n_samples"] = report.n_samples;
    return out.dump(2);
}

void save_stress_levels(std::span<const StressLevel> levels, const std::filesystem::path& path) {
    auto out = csv::open_output(path);
    out << "level,mean,min,max\n";
    for (const auto& level : levels)
        out << csv::format_double(level.level) << ',' << csv::format_double(level.band.mean) << ','
            << csv::format_double(level.band.min) << ',' << csv::format_double(level.band.max) << '\n';
    if (!out) throw IoError("write failure on " + path.string());
}

void save_loss_samples(const LossDistribution& losses, const std::filesystem::path& path) {
    auto out = csv::open_output(path);
    out << "sample_index,member_index,shock,loss_fraction\n";
    for (const auto& s : losses.samples)
        out << s.sample_index << ',' << s.member_index << ',' << csv::format_double(s.shock) << ','
            << csv::format_double(s.loss_fraction) << '\n';
    if (!out) throw IoError("write failure on " + path.string());
}

LossDistribution load_loss_samples(const std::filesystem::path& path) {
    const auto table = csv::read(path);
    csv::require_header(table, {"sample_index", "member_index", "shock", "loss_fraction"}, path);
    LossDistribution losses;
    losses.conditioning = path.filename().string();
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& f = table.rows[r];
        const std::size_t row = r + 1;
        if (f.size() != 4) throw SchemaError(path.string() + ": malformed row " + std::to_string(row));
        LossSample s;
        const auto sample = csv::parse_int(f[0], row, "sample_index");
        const auto member = csv::parse_int(f[1], row, "member_index");
        if (sample < 0 || member < 0) throw ValidationError("negative index", row);
        s.sample_index = static_cast<std::size_t>(sample);
        s.member_index = static_cast<std::size_t>(member);
        s.shock = csv::parse_double(f[2], row, "shock");
        s.loss_fraction = csv::parse_double(f[3], row, "loss_fraction");
        if (!(s.loss_fraction >= 0.0 && s.loss_fraction <= 1.0))
            throw ValidationError("loss_fraction outside [0, 1]", row);
        losses.samples.push_back(s);
    }
    if (losses.samples.empty()) throw SchemaError(path.string() + ": no loss samples");
    return losses;
}

}  // namespace contagion
