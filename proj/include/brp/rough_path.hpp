#pragma once

// Grid-sampled branched rough paths.
//
// A path is stored as the family X_{0,t_i} of truncated characters; every
// increment X_{s,t} is derived through the antipode and the truncated
// convolution, so Chen's identity holds by construction up to rounding.
// Piecewise-linear signals are lifted exactly: on a linear segment every
// iterated integral is a monomial in (t-s) whose coefficient follows a
// closed recursion, and segments are concatenated with Chen's identity.

#include <array>
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

#include "brp/tables.hpp"
#include "brp/util.hpp"

namespace brp {

struct GridPath {
    std::vector<double> times;
    std::vector<std::vector<double>> values;  // [time][dimension]

    int dimension() const { return values.empty() ? 0 : static_cast<int>(values.front().size()); }

    void validate() const {
        if (times.size() < 2) throw std::invalid_argument("GridPath: need at least two samples");
        if (values.size() != times.size())
            throw std::invalid_argument("GridPath: times/values size mismatch");
        for (std::size_t i = 0; i + 1 < times.size(); ++i)
            if (!(times[i] < times[i + 1]))
                throw std::invalid_argument("GridPath: times must be strictly increasing");
        for (const auto& v : values)
            if (static_cast<int>(v.size()) != dimension())
                throw std::invalid_argument("GridPath: ragged value rows");
    }
};

struct NormOptions {
    int jobs = 1;
    bool dyadic_pairs_only = false;  // shortcut for large grids
    std::size_t max_grid = 4096;     // refuse full pair sweeps beyond this
};

struct RoughPathDistanceReport {
    std::vector<std::pair<int, double>> per_forest;  // (forest index, Holder distance)
    double max = 0.0;
};

class BranchedRoughPath {
public:
    BranchedRoughPath(double alpha, int labels, std::vector<double> times,
                      std::vector<std::vector<double>> values_from_origin,
                      int degree_cap = kDefaultDegreeCap)
        : alpha_(check_alpha(alpha)),
          N_(static_cast<int>(std::floor(1.0 / alpha))),
          labels_(labels),
          tab_(algebra_tables(labels, N_, degree_cap)),
          times_(std::move(times)),
          vals_(std::move(values_from_origin)) {
        if (vals_.size() != times_.size())
            throw std::invalid_argument("BranchedRoughPath: times/values mismatch");
        for (const auto& row : vals_)
            if (row.size() != tab_->forests.size())
                throw std::invalid_argument("BranchedRoughPath: bad value row width");
    }

    static double check_alpha(double alpha) {
        if (is_reciprocal_integer(alpha))
            throw std::invalid_argument("alpha must lie in (0,1) and avoid 1/n");
        return alpha;
    }

    static BranchedRoughPath lift_piecewise_linear(const GridPath& path, double alpha,
                                                   int degree_cap = kDefaultDegreeCap) {
        path.validate();
        check_alpha(alpha);
        int N = static_cast<int>(std::floor(1.0 / alpha));
        if (N > degree_cap)
            throw std::invalid_argument("lift_piecewise_linear: degree above safety cap");
        int d = path.dimension();
        auto tab = algebra_tables(d, N, degree_cap);
        const std::size_t nf = tab->forests.size();
        std::vector<std::vector<double>> vals(path.times.size(), std::vector<double>(nf, 0.0));
        vals[0][0] = 1.0;
        std::vector<double> seg(nf), powers(N + 1);
        for (std::size_t i = 0; i + 1 < path.times.size(); ++i) {
            double dt = path.times[i + 1] - path.times[i];
            std::vector<double> slope(d);
            for (int a = 0; a < d; ++a) slope[a] = (path.values[i + 1][a] - path.values[i][a]) / dt;
            // monomial coefficients: C_1 = 1, C_[h]_a = C_h v_a / (|h|+1),
            // products multiply; segment value is C_f dt^{|f|}
            powers[0] = 1.0;
            for (int k = 1; k <= N; ++k) powers[k] = powers[k - 1] * dt;
            for (std::size_t f = 0; f < nf; ++f) {
                if (f == 0) {
                    seg[f] = 1.0;
                    continue;
                }
                const Forest& forest = tab->forests[f];
                if (forest.is_tree()) {
                    const Tree& t = forest.trees().front();
                    std::vector<Tree> ch = t.children();
                    int child_idx = tab->index(Forest(std::move(ch)));
                    seg[f] = seg[child_idx] * slope[t.label()] / tab->degree[f];
                } else {
                    seg[f] = seg[tab->split_tree[f]] * seg[tab->split_rest[f]];
                }
            }
            // Chen concatenation X_{0,t_{i+1}} = X_{0,t_i} * X_{t_i,t_{i+1}}
            for (std::size_t f = 0; f < nf; ++f) {
                double acc = 0.0;
                for (const auto& term : tab->coproduct_pairs[f])
                    acc += term.coeff * vals[i][term.left] * seg[term.right] *
                           powers[tab->degree[term.right]];
                vals[i + 1][f] = acc;
            }
        }
        return BranchedRoughPath(alpha, d, path.times, std::move(vals), degree_cap);
    }

    double alpha() const { return alpha_; }
    int N() const { return N_; }
    int labels() const { return labels_; }
    const std::vector<double>& times() const { return times_; }
    std::size_t grid_size() const { return times_.size(); }
    const AlgebraTables& tables() const { return *tab_; }
    std::shared_ptr<const AlgebraTables> tables_ptr() const { return tab_; }
    double duration() const { return times_.back() - times_.front(); }

    const std::vector<double>& at(std::size_t i) const { return vals_.at(i); }
    std::vector<std::vector<double>>& mutable_values() { return vals_; }

    double value(std::size_t i, const Forest& f) const { return vals_.at(i)[tab_->index(f)]; }

    // <X_{0,i}, series> for a rational forest series (degree <= N)
    double value(std::size_t i, const ForestSeries& s) const {
        double acc = 0.0;
        for (const auto& [f, c] : s.terms()) acc += c.to_double() * vals_.at(i)[tab_->index(f)];
        return acc;
    }

    // X_{0,s}^{-1} = X_{0,s} o S, evaluated on every forest
    std::vector<double> inverse_at(std::size_t s) const {
        const std::size_t nf = tab_->forests.size();
        std::vector<double> inv(nf, 0.0);
        for (std::size_t f = 0; f < nf; ++f)
            for (const auto& term : tab_->antipode_rows[f]) inv[f] += term.coeff * vals_[s][term.index];
        return inv;
    }

    // X_{s,t} = X_{0,s}^{-1} * X_{0,t} over all forests of degree <= N
    std::vector<double> increment(std::size_t s, std::size_t t) const {
        require_grid_index(s);
        require_grid_index(t);
        return increment_with_inverse(inverse_at(s), t);
    }

    std::vector<double> increment_with_inverse(const std::vector<double>& inv_s,
                                               std::size_t t) const {
        const std::size_t nf = tab_->forests.size();
        std::vector<double> out(nf, 0.0);
        for (std::size_t f = 0; f < nf; ++f) {
            double acc = 0.0;
            for (const auto& term : tab_->coproduct_pairs[f])
                acc += term.coeff * inv_s[term.left] * vals_[t][term.right];
            out[f] = acc;
        }
        return out;
    }

    // max over sampled triples and forests of the normalized Chen defect
    double chen_defect(std::size_t max_triples = 20000) const {
        const std::size_t n = times_.size();
        double worst = 0.0;
        std::vector<std::array<std::size_t, 3>> triples = sample_triples(n, max_triples);
        for (const auto& [s, u, t] : triples) {
            auto inv_s = inverse_at(s);
            auto x_su = increment_with_inverse(inv_s, u);
            auto x_st = increment_with_inverse(inv_s, t);
            auto x_ut = increment(u, t);
            for (std::size_t f = 1; f < tab_->forests.size(); ++f) {
                double delta = x_st[f] - x_su[f] - x_ut[f];
                double sew = 0.0;
                for (const auto& term : tab_->reduced_pairs[f])
                    sew += term.coeff * x_su[term.left] * x_ut[term.right];
                double err = std::abs(delta - sew) / (1.0 + std::abs(x_st[f]));
                if (err > worst) worst = err;
            }
        }
        return worst;
    }

    // max over grid points and product splits of |X^{h1 h2} - X^{h1} X^{h2}|,
    // normalized; zero for characters
    double multiplicativity_defect() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < times_.size(); ++i) {
            for (std::size_t f = 1; f < tab_->forests.size(); ++f) {
                if (tab_->forests[f].is_tree()) continue;
                double prod = vals_[i][tab_->split_tree[f]] * vals_[i][tab_->split_rest[f]];
                double err = std::abs(vals_[i][f] - prod) / (1.0 + std::abs(vals_[i][f]));
                if (err > worst) worst = err;
            }
        }
        return worst;
    }

    double holder_norm(const NormOptions& opts = {}) const {
        return distance_impl(nullptr, opts).max;
    }

    RoughPathDistanceReport distance_report(const BranchedRoughPath& other,
                                            const NormOptions& opts = {}) const {
        require_same_grid(other);
        return distance_impl(&other, opts);
    }

    double distance(const BranchedRoughPath& other, const NormOptions& opts = {}) const {
        return distance_report(other, opts).max;
    }

    void require_same_grid(const BranchedRoughPath& other) const {
        if (labels_ != other.labels_ || N_ != other.N_ || times_ != other.times_)
            throw std::invalid_argument("rough paths must share grid, alphabet and degree");
    }

    void require_grid_index(std::size_t i) const {
        if (i >= times_.size()) throw std::invalid_argument("grid index out of range");
    }

    // pairs (s,t) used by the discrete Holder sups
    std::vector<std::pair<std::size_t, std::size_t>> norm_pairs(const NormOptions& opts) const {
        const std::size_t n = times_.size();
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        if (!opts.dyadic_pairs_only) {
            if (n > opts.max_grid)
                throw std::invalid_argument(
                    "grid too large for the full pair sweep; enable dyadic_pairs_only");
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t t = s + 1; t < n; ++t) pairs.emplace_back(s, t);
        } else {
            for (std::size_t gap = 1; gap < n; gap *= 2)
                for (std::size_t s = 0; s + gap < n; ++s) pairs.emplace_back(s, s + gap);
        }
        return pairs;
    }

private:
    double alpha_;
    int N_;
    int labels_;
    std::shared_ptr<const AlgebraTables> tab_;
    std::vector<double> times_;
    std::vector<std::vector<double>> vals_;

    static std::vector<std::array<std::size_t, 3>> sample_triples(std::size_t n,
                                                                  std::size_t max_triples) {
        std::vector<std::array<std::size_t, 3>> out;
        std::size_t total = n >= 3 ? n * (n - 1) * (n - 2) / 6 : 0;
        if (total <= max_triples) {
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t u = s + 1; u < n; ++u)
                    for (std::size_t t = u + 1; t < n; ++t) out.push_back({s, u, t});
            return out;
        }
        // deterministic subsample: adjacent triples plus seeded random draws
        for (std::size_t s = 0; s + 2 < n; ++s) out.push_back({s, s + 1, s + 2});
        std::mt19937_64 rng(12345);
        std::uniform_int_distribution<std::size_t> dist(0, n - 1);
        while (out.size() < max_triples) {
            std::size_t a = dist(rng), b = dist(rng), c = dist(rng);
            if (a < b && b < c) out.push_back({a, b, c});
        }
        return out;
    }

    RoughPathDistanceReport distance_impl(const BranchedRoughPath* other,
                                          const NormOptions& opts) const {
        const std::size_t nf = tab_->forests.size();
        auto pairs = norm_pairs(opts);
        RoughPathDistanceReport report;
        std::vector<double> sup(nf, 0.0);

        const std::size_t n = times_.size();
        std::vector<std::vector<double>> sup_by_s(n, std::vector<double>(nf, 0.0));
        // group pairs by s so the inverse is computed once per base point
        std::vector<std::vector<std::size_t>> t_by_s(n);
        for (const auto& [s, t] : pairs) t_by_s[s].push_back(t);
        parallel_for(n, opts.jobs, [&](std::size_t s) {
            if (t_by_s[s].empty()) return;
            auto inv_s = inverse_at(s);
            std::vector<double> inv_s_other;
            if (other) inv_s_other = other->inverse_at(s);
            for (std::size_t t : t_by_s[s]) {
                auto x = increment_with_inverse(inv_s, t);
                std::vector<double> y;
                if (other) y = other->increment_with_inverse(inv_s_other, t);
                double dt = times_[t] - times_[s];
                for (std::size_t f = 1; f < nf; ++f) {
                    double diff = other ? x[f] - y[f] : x[f];
                    double q = std::abs(diff) / std::pow(dt, tab_->degree[f] * alpha_);
                    if (q > sup_by_s[s][f]) sup_by_s[s][f] = q;
                }
            }
        });
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t f = 1; f < nf; ++f)
                if (sup_by_s[s][f] > sup[f]) sup[f] = sup_by_s[s][f];

        for (std::size_t f = 1; f < nf; ++f) {
            report.per_forest.emplace_back(static_cast<int>(f), sup[f]);
            if (sup[f] > report.max) report.max = sup[f];
        }
        return report;
    }
};

}  // namespace brp
