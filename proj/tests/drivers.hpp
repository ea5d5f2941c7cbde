#pragma once

// Synthetic driver signals shared by the numeric test suites.

#include <cmath>
#include <random>
#include <vector>

#include "brp/rough_path.hpp"

namespace brp::testing {

// Truncated Weierstrass-type sum sampled on a uniform grid: a piecewise-linear
// signal that looks alpha-Holder above the grid scale.
inline GridPath oscillation_path(std::size_t n, double T, double alpha, unsigned seed = 1,
                                 int dim = 1, double amplitude = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
    int K = 0;
    while ((std::size_t{1} << (K + 2)) < n) ++K;
    GridPath p;
    std::vector<std::vector<double>> phases(dim, std::vector<double>(K + 1));
    std::vector<std::vector<double>> phases2(dim, std::vector<double>(K + 1));
    for (int d = 0; d < dim; ++d)
        for (int k = 0; k <= K; ++k) {
            phases[d][k] = phase(rng);
            phases2[d][k] = phase(rng);
        }
    for (std::size_t i = 0; i < n; ++i) {
        double t = T * static_cast<double>(i) / static_cast<double>(n - 1);
        std::vector<double> v(dim, 0.0);
        for (int d = 0; d < dim; ++d)
            for (int k = 0; k <= K; ++k) {
                double freq = std::pow(2.0, k);
                double amp = amplitude * std::pow(freq, -alpha);
                v[d] += amp * (std::cos(freq * 3.141592653589793 * t / T + phases[d][k]) +
                               0.5 * std::sin(freq * 6.283185307179586 * t / T + phases2[d][k]));
            }
        p.times.push_back(t);
        p.values.push_back(v);
    }
    return p;
}

inline GridPath smooth_wave_path(std::size_t n, double T, int dim = 1) {
    GridPath p;
    for (std::size_t i = 0; i < n; ++i) {
        double t = T * static_cast<double>(i) / static_cast<double>(n - 1);
        std::vector<double> v(dim);
        for (int d = 0; d < dim; ++d)
            v[d] = std::sin((1.0 + 0.5 * d) * t) + 0.3 * std::cos(2.0 * t + d);
        p.times.push_back(t);
        p.values.push_back(v);
    }
    return p;
}

inline GridPath perturb_path(const GridPath& base, double scale, unsigned seed = 2) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    GridPath p = base;
    for (std::size_t i = 1; i < p.values.size(); ++i)
        for (double& v : p.values[i]) {
            double t = p.times[i] / p.times.back();
            v += scale * (std::sin(7.0 * t * 6.28318) + 0.3 * u(rng)) * t * (1.0 - t) * 4.0;
        }
    return p;
}

}  // namespace brp::testing
