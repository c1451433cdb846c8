// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "contagion/balance_sheets.hpp"
#include "contagion/cli.hpp"
#include "contagion/contagion.hpp"
#include "contagion/experiment.hpp"
#include "contagion/random.hpp"
#include "contagion/risk.hpp"
#include "contagion/topology.hpp"
#include "contagion/weights.hpp"
#include "contagion_fixtures.hpp"
#include "oracles/brute_force.hpp"

using namespace contagion;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(const char* id, bool ok, const std::string& detail) {
    std::printf("[%s] %-4s %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

constexpr std::uint64_t kPopulationSeed = 7;
constexpr std::uint64_t kMasterSeed = 2007;

struct DensityRun {
    double K;
    FitnessCalibration cal;
    TopologyEnsemble ensemble;
};

// Criteria 1 and 2 share the 227-bank ensembles; criterion 3 weights them.
std::vector<DensityRun> density_and_calibration(const BankPopulation& pop) {
    const double reference_mean[] = {1502.20, 3003.10, 4995.90};
    const double reference_sd[] = {28.85, 35.06, 37.25};
    const double targets[] = {1500.0, 3000.0, 5000.0};

    std::vector<DensityRun> runs;
    bool density_ok = true;
    bool residual_ok = true;
    std::string density_detail;
    std::string residual_detail;
    const auto start = Clock::now();
    for (int k = 0; k < 3; ++k) {
        const double K = targets[k];
        auto cal = calibrate_z(pop, K);
        auto ens = sample_ensemble(cal, 50, kMasterSeed + static_cast<std::uint64_t>(k));
        const auto stats = density_stats(ens);
        const double predicted_sd = std::sqrt(edge_count_variance(cal.z, cal.fitness));
        const double se = predicted_sd / std::sqrt(50.0);
        const bool mean_ok = std::abs(stats.mean - K) <= 3.0 * se;
        const bool sd_ok = stats.sd >= predicted_sd / 2.0 && stats.sd <= predicted_sd * 2.0;
        density_ok = density_ok && mean_ok && sd_ok;
        density_detail += fmt("\n       K=%.0f mean=%.2f (3se=%.2f) sd=%.2f predicted=%.2f | reference mean=%.2f sd=%.2f",
                              K, stats.mean, 3.0 * se, stats.sd, predicted_sd, reference_mean[k], reference_sd[k]);

        const double residual = std::abs(expected_edge_count(cal.z, cal.fitness) - K);
        residual_ok = residual_ok && residual <= 1e-9 * K;
        residual_detail += fmt(" K=%.0f:%.3g", K, residual);
        runs.push_back({K, std::move(cal), std::move(ens)});
    }
    const double elapsed = seconds_since(start);
    report("1", density_ok && elapsed < 60.0,
           fmt("density calibration, 227 banks, 50 members, %.2fs", elapsed) + density_detail);
    report("2", residual_ok, "calibration residual |E[edges]-K| <= 1e-9 K:" + residual_detail);
    return runs;
}

void weight_constraints(const BankPopulation& pop, const std::vector<DensityRun>& runs) {
    std::size_t members = 0;
    std::size_t violations = 0;
    std::size_t real_excess = 0;
    for (const auto& run : runs) {
        for (const auto& topo : run.ensemble.members) {
            const auto net = assign_weights(topo, pop);
            ++members;
            violations += constraint_violations(net, pop);
            std::vector<std::int64_t> lent(pop.size(), 0), borrowed(pop.size(), 0);
            std::vector<double> lent_real(pop.size(), 0.0), borrowed_real(pop.size(), 0.0);
            for (const auto& e : net.edges) {
                lent[e.lender] += e.units;
                borrowed[e.borrower] += e.units;
                lent_real[e.lender] += net.weight(e);
                borrowed_real[e.borrower] += net.weight(e);
            }
            for (NodeId i = 0; i < pop.size(); ++i) {
                const auto cap_a = static_cast<std::int64_t>(std::floor(pop[i].interbank_assets / net.increment + 1e-9));
                const auto cap_l =
                    static_cast<std::int64_t>(std::floor(pop[i].interbank_liabilities / net.increment + 1e-9));
                violations += (lent[i] > cap_a) + (borrowed[i] > cap_l);
                real_excess += (lent_real[i] > pop[i].interbank_assets + 1e-9) +
                               (borrowed_real[i] > pop[i].interbank_liabilities + 1e-9);
            }
        }
    }
    report("3", violations == 0 && real_excess == 0,
           fmt("weight constraints on %zu members: grid violations=%zu, real-valued excess=%zu", members, violations,
               real_excess));
}

void oracle_equivalence() {
    Engine rng(derive_seed(kMasterSeed, 4));
    double worst_h = 0.0;
    double worst_R = 0.0;
    std::size_t mismatched = 0;
    for (int k = 0; k < 1000; ++k) {
        const std::size_t n = 1 + static_cast<std::size_t>(uniform01(rng) * 5.0);
        auto c = random_case(rng, std::min<std::size_t>(n, 5));
        for (bool cascade : {false, true}) {
            const auto psi = random_shock(rng, c.values.size(), cascade);
            const auto got = cascade ? default_cascade(c.W, psi, c.values) : debtrank(c.W, psi, c.values);
            const auto want = oracle::recursion(c.dense, psi, c.values, cascade);
            double dh = 0.0;
            for (std::size_t i = 0; i < psi.size(); ++i) dh = std::max(dh, std::abs(got.final_h[i] - want.h[i]));
            const double dR = std::abs(got.impact_currency - want.R);
            worst_h = std::max(worst_h, dh);
            worst_R = std::max(worst_R, dR);
            mismatched += (dh > 1e-12 || dR > 1e-12 || got.steps != want.T);
        }
    }
    report("4", mismatched == 0,
           fmt("oracle equivalence, 1000 networks x 2 algorithms: mismatches=%zu max|dh|=%.2g max|dR|=%.2g",
               mismatched, worst_h, worst_R));
}

bool leq_all(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i] + tol) return false;
    return true;
}

void monotonicity() {
    constexpr int kCases = 500;
    Engine rng(derive_seed(kMasterSeed, 5));
    std::size_t trace_bad = 0, steps_bad = 0, fraction_bad = 0;
    std::size_t psi_bad = 0, w_bad = 0, psi_support_bad = 0, w_support_bad = 0;

    for (int k = 0; k < kCases; ++k) {
        const std::size_t n = 2 + static_cast<std::size_t>(uniform01(rng) * 7.0);
        auto c = random_case(rng, n);
        for (bool cascade : {false, true}) {
            const auto psi = random_shock(rng, n, cascade);
            ContagionTrace trace;
            const auto r = cascade ? default_cascade(c.W, psi, c.values, &trace) : debtrank(c.W, psi, c.values, &trace);
            bool ok = !trace.h.empty() && leq_all(psi, trace.h.front(), 0.0);
            for (std::size_t t = 0; t < trace.h.size(); ++t) {
                for (double x : trace.h[t]) ok = ok && x >= 0.0 && x <= 1.0;
                if (t > 0) ok = ok && leq_all(trace.h[t - 1], trace.h[t], 0.0);
            }
            trace_bad += !ok;
            steps_bad += r.steps > n + 1;
            fraction_bad += !(r.impact_fraction >= 0.0 && r.impact_fraction <= 1.0);
        }

        const auto psi = random_shock(rng, n, false);
        const auto base = debtrank(c.W, psi, c.values).final_h;

        // Unrestricted increases may switch a zero entry on.
        auto psi_up = psi;
        for (auto& x : psi_up) x = std::min(1.0, x + uniform01(rng) * 0.3);
        psi_bad += !leq_all(base, debtrank(c.W, psi_up, c.values).final_h, 1e-12);

        ImpactMatrix w_up(n);
        for (NodeId j = 0; j < n; ++j)
            for (NodeId i = 0; i < n; ++i)
                if (i != j) w_up.set(j, i, std::min(1.0, c.dense[j][i] + uniform01(rng) * 0.3));
        w_bad += !leq_all(base, debtrank(w_up, psi, c.values).final_h, 1e-12);

        // Increases restricted to entries that are already positive.
        auto psi_sup = psi;
        for (auto& x : psi_sup)
            if (x > 0.0) x = std::min(1.0, x + uniform01(rng) * 0.3);
        psi_support_bad += !leq_all(base, debtrank(c.W, psi_sup, c.values).final_h, 1e-12);

        ImpactMatrix w_sup(n);
        for (NodeId j = 0; j < n; ++j)
            for (NodeId i = 0; i < n; ++i)
                if (i != j && c.dense[j][i] > 0.0) w_sup.set(j, i, std::min(1.0, c.dense[j][i] + uniform01(rng) * 0.3));
        w_support_bad += !leq_all(base, debtrank(w_sup, psi, c.values).final_h, 1e-12);
    }

    report("5a", trace_bad == 0, fmt("h bounded in [0,1] and nondecreasing in t: %zu/%d bad", trace_bad, 2 * kCases));
    report("5b", psi_bad == 0 && w_bad == 0,
           fmt("DebtRank final h nondecreasing in psi and W (any increase): psi %zu/%d bad, W %zu/%d bad", psi_bad,
               kCases, w_bad, kCases));
    report("5c", psi_support_bad == 0 && w_support_bad == 0,
           fmt("DebtRank final h nondecreasing in psi and W (positive entries only): psi %zu/%d bad, W %zu/%d bad",
               psi_support_bad, kCases, w_support_bad, kCases));
    report("5d", steps_bad == 0, fmt("termination within n+1 steps: %zu/%d bad", steps_bad, 2 * kCases));
    report("5e", fraction_bad == 0, fmt("impact_fraction in [0,1]: %zu/%d bad", fraction_bad, 2 * kCases));
}

void early_warning() {
    const auto start = Clock::now();
    const auto pop = generate_synthetic_population(30, kPopulationSeed);
    const auto cal = calibrate_z(pop, 200.0);
    const auto topos = sample_ensemble(cal, 20, kMasterSeed);
    std::vector<WeightedNetwork> nets;
    for (const auto& t : topos.members) nets.push_back(assign_weights(t, pop));
    const auto schedule = build_decay_schedule(pop, 10, 0.3);
    const auto node = largest_by_assets(pop, 1);
    const std::vector<Algorithm> algs{Algorithm::DebtRank, Algorithm::Cascade};
    const auto sweep = run_failure_sweep(nets, schedule, node, algs);
    const double elapsed = seconds_since(start);

    std::string table;
    bool warning_step = false;
    for (std::size_t s = 1; s <= 10; ++s) {
        const double dr = sweep.aggregate(node[0], s, Algorithm::DebtRank).mean;
        const double dc = sweep.aggregate(node[0], s, Algorithm::Cascade).mean;
        warning_step = warning_step || (dc < 0.02 && dr > 0.05);
        table += fmt("\n       step %2zu debtrank=%.4f cascade=%.4f", s, dr, dc);
    }
    const double gap = std::abs(sweep.aggregate(node[0], 10, Algorithm::DebtRank).mean -
                                sweep.aggregate(node[0], 10, Algorithm::Cascade).mean);
    std::size_t decreasing = 0;
    for (std::size_t m = 0; m < nets.size(); ++m)
        for (std::size_t s = 2; s <= 10; ++s)
            decreasing += sweep.impacts(node[0], s, Algorithm::DebtRank)[m] <
                          sweep.impacts(node[0], s - 1, Algorithm::DebtRank)[m];

    report("6a", warning_step && elapsed < 300.0,
           fmt("early warning, largest bank %zu: step with cascade < 0.02 and debtrank > 0.05 (%.2fs)", node[0],
               elapsed) +
               table);
    report("6b", gap < 0.15, fmt("final-step gap |debtrank - cascade| = %.4f < 0.15", gap));
    report("6c", decreasing == 0, fmt("per-member debtrank trajectories nondecreasing: %zu decreases", decreasing));
}

void var_checks() {
    Engine rng(derive_seed(kMasterSeed, 7));
    std::size_t mismatched = 0;
    std::size_t non_monotone = 0;
    for (int k = 0; k < 1000; ++k) {
        const std::size_t n = 1 + static_cast<std::size_t>(uniform01(rng) * 200.0);
        std::vector<double> xs(n);
        const bool ties = uniform01(rng) < 0.5;
        for (auto& x : xs) x = ties ? std::floor(uniform01(rng) * 10.0) / 10.0 : uniform01(rng);
        const double alpha = uniform(rng, 0.01, 0.99);
        mismatched += value_at_risk(xs, alpha).var_value != oracle::var_by_counting(xs, alpha);

        double previous = -1.0;
        for (int step = 1; step < 20; ++step) {
            const double v = value_at_risk(xs, step * 0.05).var_value;
            non_monotone += v < previous;
            previous = v;
        }
    }
    std::vector<double> uniform(100);
    for (int i = 0; i < 100; ++i) uniform[i] = (i + 1) / 100.0;
    std::vector<double> shuffled = uniform;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const double v95 = value_at_risk(shuffled, 0.95).var_value;
    report("7", mismatched == 0 && non_monotone == 0 && v95 == uniform[94],
           fmt("VaR vs counting oracle on 1000 sets: mismatches=%zu, alpha-monotone violations=%zu, "
               "uniform 1..100 at 0.95 -> %.2f",
               mismatched, non_monotone, v95));
}

void sampler() {
    ShockDistribution dist;
    dist.seed = kMasterSeed;
    const auto xs = sample_shocks(dist);
    double sum = 0.0;
    bool in_range = xs.size() == 1000;
    for (double x : xs) {
        sum += x;
        in_range = in_range && x >= 0.0 && x <= 1.0;
    }
    const double mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    report("8", in_range && std::abs(mean - 0.5) <= 0.01 && std::abs(sd - 0.05) <= 0.01,
           fmt("truncated normal sampler, %zu draws: in [0,1]=%s mean=%.4f sd=%.4f", xs.size(),
               in_range ? "yes" : "no", mean, sd));
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        files[fs::relative(entry.path(), root).generic_string()] = buf.str();
    }
    return files;
}

void determinism() {
    const fs::path base = fs::temp_directory_path() / fmt("contagion_acceptance_%d", static_cast<int>(::getpid()));
    fs::remove_all(base);
    bool ran = true;
    for (const char* name : {"a", "b"}) {
        const auto dir = (base / name).string();
        const auto ens = dir + "/ensemble";
        ran = ran && cli::run({"synth", "--n", "40", "--seed", "7", "-o", dir + "/banks.csv"}) == 0;
        ran = ran && cli::run({"estimate", "--population", dir + "/banks.csv", "--edges", "200",
                               "--size", "8", "--seed", "2007", "-o", ens}) == 0;
        ran = ran && cli::run({"experiment", "--ensemble", ens, "--nodes", "top5", "-o",
                               dir + "/experiment"}) == 0;
        ran = ran && cli::run({"losses", "--ensemble", ens, "--shock-node", "0", "--samples", "100",
                               "--seed", "2007", "-o", dir + "/losses.csv"}) == 0;
        ran = ran && cli::run({"var", "--input", dir + "/losses.csv", "-o", dir + "/var.json"}) == 0;
    }
    const auto a = ran ? snapshot(base / "a") : decltype(snapshot(base)){};
    const auto b = ran ? snapshot(base / "b") : decltype(snapshot(base)){};
    fs::remove_all(base);
    report("9", ran && !a.empty() && a == b,
           fmt("determinism, synth -> estimate -> experiment -> losses -> var twice: %zu files, identical=%s",
               a.size(), ran && a == b ? "yes" : "no"));
}

}  // namespace

int main() {
    const auto pop = generate_synthetic_population(227, kPopulationSeed);
    const auto runs = density_and_calibration(pop);
    weight_constraints(pop, runs);
    oracle_equivalence();
    monotonicity();
    early_warning();
    var_checks();
    sampler();
    determinism();
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
