#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace brp {

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    bool exact = false;  // all samples were at the noise floor
};

// Least-squares slope of log(y) against log(x). Pairs with y <= floor are
// dropped; if everything is at the floor the data is reported as exact.
inline LogLogFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys,
                            double floor = 1e-15) {
    if (xs.size() != ys.size()) throw std::invalid_argument("fit_loglog: size mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0)) throw std::invalid_argument("fit_loglog: nonpositive abscissa");
        if (ys[i] > floor) {
            lx.push_back(std::log(xs[i]));
            ly.push_back(std::log(ys[i]));
        }
    }
    LogLogFit f;
    if (lx.size() < 2) {
        f.exact = true;
        return f;
    }
    double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fit_loglog: degenerate abscissae");
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

// Chunked parallel loop; jobs <= 1 runs inline.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::size_t workers = std::min<std::size_t>(jobs, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

inline bool is_reciprocal_integer(double alpha, double tol = 1e-9) {
    if (!(alpha > 0.0) || alpha >= 1.0) return true;  // outside (0,1) counts as invalid too
    double inv = 1.0 / alpha;
    return std::abs(inv - std::round(inv)) < tol;
}

}  // namespace brp
