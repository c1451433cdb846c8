#pragma once

// Test-only reference implementations. Deliberately naive and independent
// of the library code paths they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

enum class S { U, D, I };

struct Outcome {
    std::vector<double> h;
    double R = 0.0;
    std::size_t T = 0;
};

/// Literal time-indexed recursion over a dense matrix M[j][i] (impact of j on
/// i). `cascade` switches the state rule to "distressed only on default".
inline Outcome recursion(const std::vector<std::vector<double>>& M, const std::vector<double>& psi,
                         const std::vector<double>& v, bool cascade) {
    const std::size_t n = psi.size();
    std::vector<std::vector<double>> h(1, psi);
    std::vector<std::vector<S>> s(1, std::vector<S>(n, S::U));
    for (std::size_t i = 0; i < n; ++i) s[0][i] = psi[i] != 0.0 ? S::D : S::U;

    for (std::size_t t = 1;; ++t) {
        bool any = false;
        for (std::size_t j = 0; j < n; ++j) any = any || s[t - 1][j] == S::D;
        if (!any) {
            Outcome out;
            out.h = h[t - 1];
            out.T = t;
            for (std::size_t i = 0; i < n; ++i) out.R += h[t - 1][i] * v[i] - h[0][i] * v[i];
            return out;
        }
        std::vector<double> ht(n);
        std::vector<S> st(n);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = h[t - 1][i];
            for (std::size_t j = 0; j < n; ++j)
                if (s[t - 1][j] == S::D) acc += M[j][i] * h[t - 1][j];
            ht[i] = std::min(1.0, acc);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const bool trigger = cascade ? ht[i] >= 1.0 - 1e-12 : ht[i] > 0.0;
            if (s[t - 1][i] == S::D)
                st[i] = S::I;
            else if (trigger && s[t - 1][i] != S::I)
                st[i] = S::D;
            else
                st[i] = s[t - 1][i];
        }
        h.push_back(ht);
        s.push_back(st);
    }
}

/// Exceedance-count VaR: try every sample as a candidate, keep the smallest
/// one whose strict exceedance share is within 1 - alpha.
inline double var_by_counting(const std::vector<double>& samples, double alpha) {
    double best = 0.0;
    bool found = false;
    for (double candidate : samples) {
        std::size_t above = 0;
        for (double x : samples) above += x > candidate ? 1 : 0;
        if (static_cast<double>(above) <= (1.0 - alpha) * static_cast<double>(samples.size()) + 1e-9) {
            if (!found || candidate < best) best = candidate;
            found = true;
        }
    }
    return best;
}

/// Least-squares slope of log(value) against log(rank) over the `tail`
/// largest values.
inline double rank_plot_slope(std::vector<double> values, std::size_t tail) {
    std::sort(values.begin(), values.end(), std::greater<>());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t r = 0; r < tail; ++r) {
        const double x = std::log(static_cast<double>(r + 1));
        const double y = std::log(values[r]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(tail);
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

/// Pareto draws via std::exponential_distribution: log(X / scale) ~ Exp(shape).
inline std::vector<double> pareto_samples(std::size_t n, double shape, double scale, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::exponential_distribution<double> e(shape);
    std::vector<double> out(n);
    for (auto& x : out) x = scale * std::exp(e(rng));
    return out;
}

}  // namespace oracle
