#pragma once

// Paths controlled by a branched rough path.
//
// A controlled path stores one scalar grid function per forest of degree
// <= N-1. Its remainders
//   R^h_{s,t} = dZ^h_{s,t} - sum_{hbar} <delta_hbar * delta_h, Z_s> X^{hbar}_{s,t}
// use the exact convolution coefficients from the algebra tables. Norms are
// discrete Holder sups over grid pairs; the rough integral is the compensated
// sum over the stored grid (the Sewing Lemma makes the partition choice
// immaterial, and the grid is the finest resolution we own).

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "brp/rough_path.hpp"

namespace brp {

struct RemainderTable {
    // parallel arrays: (component index, s, t) -> value
    struct Entry {
        int component;
        std::size_t s, t;
        double value;
    };
    std::vector<Entry> entries;
    std::vector<double> holder_norm;  // per component, exponent (N-|h|) alpha
};

struct IntegralRateReport {
    std::vector<double> scales;   // |t-s| per dyadic level
    std::vector<double> defects;  // max germ defect at that scale
    LogLogFit fit;
    bool exact = false;
};

struct BoundCheckReport {
    double ratio = 0.0;
    bool degenerate = false;  // denominator vanished
};

class ControlledPath {
public:
    ControlledPath(std::shared_ptr<const BranchedRoughPath> ref,
                   std::vector<std::vector<double>> comps)
        : ref_(std::move(ref)), comps_(std::move(comps)) {
        if (!ref_) throw std::invalid_argument("ControlledPath: null reference");
        if (comps_.size() != ref_->grid_size())
            throw std::invalid_argument("ControlledPath: grid mismatch");
        const std::size_t nc = ref_->tables().n_components;
        for (const auto& row : comps_)
            if (row.size() != nc) throw std::invalid_argument("ControlledPath: bad component row");
    }

    static ControlledPath zero(std::shared_ptr<const BranchedRoughPath> ref) {
        std::size_t n = ref->grid_size(), nc = ref->tables().n_components;
        return ControlledPath(std::move(ref), std::vector<std::vector<double>>(n, std::vector<double>(nc, 0.0)));
    }

    // solution of dY = dX^a started at 0: Z^1 = X^{[a]}, Z^{[a]} = 1
    static ControlledPath tautological(std::shared_ptr<const BranchedRoughPath> ref, int label = 0) {
        ControlledPath z = zero(ref);
        const auto& tab = z.ref().tables();
        int ia = tab.index(Forest(Tree(label)));
        for (std::size_t i = 0; i < z.grid_size(); ++i) {
            z.comps_[i][0] = ref->at(i)[ia];
            z.comps_[i][ia] = 1.0;
        }
        return z;
    }

    const BranchedRoughPath& ref() const { return *ref_; }
    std::shared_ptr<const BranchedRoughPath> ref_ptr() const { return ref_; }
    std::size_t grid_size() const { return comps_.size(); }
    int components() const { return ref_->tables().n_components; }
    double alpha() const { return ref_->alpha(); }
    int N() const { return ref_->N(); }

    double component(std::size_t i, int comp) const { return comps_.at(i)[comp]; }
    double component(std::size_t i, const Forest& h) const {
        return comps_.at(i)[component_index(h)];
    }
    std::vector<std::vector<double>>& mutable_components() { return comps_; }
    const std::vector<std::vector<double>>& values() const { return comps_; }

    int component_index(const Forest& h) const {
        const auto& tab = ref_->tables();
        int idx = tab.index(h);
        if (idx >= tab.n_components)
            throw std::invalid_argument("ControlledPath: forest of degree >= N rejected");
        return idx;
    }

    // <series, Z_i> for a dual series supported on the component range
    double pair(std::size_t i, const ForestSeries& s) const {
        double acc = 0.0;
        for (const auto& [f, c] : s.terms()) acc += c.to_double() * comps_.at(i)[component_index(f)];
        return acc;
    }

    bool same_fiber(const ControlledPath& o) const { return ref_ == o.ref_; }

    void require_compatible(const ControlledPath& o) const {
        if (ref_->N() != o.ref_->N() || ref_->labels() != o.ref_->labels() ||
            ref_->times() != o.ref_->times() || ref_->alpha() != o.ref_->alpha())
            throw std::invalid_argument("controlled paths must share grid, alpha and degree");
    }

    friend ControlledPath operator+(const ControlledPath& a, const ControlledPath& b) {
        if (!a.same_fiber(b)) throw std::invalid_argument("fiber mismatch in controlled-path sum");
        ControlledPath r = a;
        for (std::size_t i = 0; i < r.comps_.size(); ++i)
            for (std::size_t c = 0; c < r.comps_[i].size(); ++c) r.comps_[i][c] += b.comps_[i][c];
        return r;
    }
    friend ControlledPath operator-(const ControlledPath& a, const ControlledPath& b) {
        if (!a.same_fiber(b)) throw std::invalid_argument("fiber mismatch in controlled-path difference");
        ControlledPath r = a;
        for (std::size_t i = 0; i < r.comps_.size(); ++i)
            for (std::size_t c = 0; c < r.comps_[i].size(); ++c) r.comps_[i][c] -= b.comps_[i][c];
        return r;
    }
    friend ControlledPath operator*(double lambda, const ControlledPath& a) {
        ControlledPath r = a;
        for (auto& row : r.comps_)
            for (auto& v : row) v *= lambda;
        return r;
    }

    // compensation weights at base point s: W[h][hbar] multiplies X^{hbar}_{s,t}
    std::vector<std::vector<double>> star_weights(std::size_t s) const {
        const auto& tab = ref_->tables();
        const int nc = tab.n_components;
        std::vector<std::vector<double>> w(nc, std::vector<double>(nc, 0.0));
        for (int h = 0; h < nc; ++h)
            for (int hb = 1; hb < nc; ++hb) {
                if (tab.degree[h] + tab.degree[hb] > ref_->N() - 1) continue;
                double acc = 0.0;
                for (const auto& term : tab.star_comp[h][hb]) acc += term.coeff * comps_[s][term.index];
                w[h][hb] = acc;
            }
        return w;
    }

    double remainder(const Forest& h, std::size_t s, std::size_t t) const {
        int hc = component_index(h);
        auto inc = ref_->increment(s, t);
        auto w = star_weights(s);
        return remainder_from(hc, s, t, w, inc);
    }

    RemainderTable remainder_table(const NormOptions& opts = {}) const {
        const auto& tab = ref_->tables();
        const int nc = tab.n_components;
        RemainderTable table;
        table.holder_norm.assign(nc, 0.0);
        auto pairs = ref_->norm_pairs(opts);
        for (const auto& [s, t] : pairs) {
            auto inc = ref_->increment(s, t);
            auto w = star_weights(s);
            double dt = ref_->times()[t] - ref_->times()[s];
            for (int h = 0; h < nc; ++h) {
                double r = remainder_from(h, s, t, w, inc);
                table.entries.push_back({h, s, t, r});
                double q = std::abs(r) / std::pow(dt, (ref_->N() - tab.degree[h]) * ref_->alpha());
                if (q > table.holder_norm[h]) table.holder_norm[h] = q;
            }
        }
        return table;
    }

    // ||Z|| at Holder exponent beta (the alpha norm when beta == alpha)
    double norm(double beta, const NormOptions& opts = {}) const {
        return norm_or_distance(nullptr, beta, opts);
    }
    double norm(const NormOptions& opts = {}) const { return norm(ref_->alpha(), opts); }

    // ||Z ; Zt|| with each path compensated by its own reference
    double distance(const ControlledPath& o, double beta, const NormOptions& opts = {}) const {
        require_compatible(o);
        return norm_or_distance(&o, beta, opts);
    }
    double distance(const ControlledPath& o, const NormOptions& opts = {}) const {
        return distance(o, ref_->alpha(), opts);
    }

    // I^a_X(Z): compensated-sum integral in the empty slot, [h]_a slots copy Z^h
    ControlledPath rough_integral(int label) const {
        const auto& tab = ref_->tables();
        if (label < 0 || label >= ref_->labels())
            throw std::invalid_argument("rough_integral: label not in alphabet");
        const std::size_t n = grid_size();
        const int nc = tab.n_components;
        std::vector<std::vector<double>> out(n, std::vector<double>(nc, 0.0));
        // prefix compensated sums
        double acc = 0.0;
        out[0][0] = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            auto inc = ref_->increment(i, i + 1);
            for (int h = 0; h < nc; ++h) acc += comps_[i][h] * inc[tab.graft_root_index[h][label]];
            out[i + 1][0] = acc;
        }
        // grafted components
        for (int g = 1; g < nc; ++g) {
            const Forest& f = tab.forests[g];
            if (!f.is_tree() || f.trees().front().label() != label) continue;
            int h = tab.index(Forest(std::vector<Tree>(f.trees().front().children())));
            for (std::size_t i = 0; i < n; ++i) out[i][g] = comps_[i][h];
        }
        return ControlledPath(ref_, std::move(out));
    }

    // germ defect |int_s^t - sum_h Z^h_s X^{[h]a}_{s,t}| across dyadic window widths
    IntegralRateReport integral_remainder_rate(int label, const std::vector<int>& levels,
                                               double noise_floor = 1e-15) const {
        if (levels.size() < 4)
            throw std::invalid_argument("integral_remainder_rate: need >= 4 dyadic scales");
        ControlledPath integral = rough_integral(label);
        const auto& tab = ref_->tables();
        const std::size_t n = grid_size();
        IntegralRateReport report;
        for (int k : levels) {
            std::size_t width = (n - 1) >> k;
            if (width == 0) throw std::invalid_argument("integral_remainder_rate: scale below grid");
            double worst = 0.0;
            for (std::size_t s = 0; s + width < n; s += width) {
                std::size_t t = s + width;
                auto inc = ref_->increment(s, t);
                double germ = 0.0;
                for (int h = 0; h < tab.n_components; ++h)
                    germ += comps_[s][h] * inc[tab.graft_root_index[h][label]];
                double defect = std::abs(integral.comps_[t][0] - integral.comps_[s][0] - germ);
                if (defect > worst) worst = defect;
            }
            report.scales.push_back(ref_->duration() * static_cast<double>(width) /
                                    static_cast<double>(n - 1));
            report.defects.push_back(worst);
        }
        report.fit = fit_loglog(report.scales, report.defects, noise_floor);
        report.exact = report.fit.exact;
        return report;
    }

    // ratio of prp:int.bounded, guarded
    BoundCheckReport integral_bound_check(int label, const NormOptions& opts = {}) const {
        BoundCheckReport r;
        double zn = norm(opts);
        double xn = ref_->holder_norm(opts);
        double talpha = std::pow(ref_->duration(), ref_->alpha());
        double denom = (1.0 + talpha) * (1.0 + xn) * zn;
        double numer = rough_integral(label).norm(opts);
        if (denom < 1e-300) {
            r.degenerate = true;
            return r;
        }
        r.ratio = numer / denom;
        return r;
    }

    // ratio of cont:int_map, guarded
    static BoundCheckReport integral_continuity_check(const ControlledPath& z,
                                                      const ControlledPath& zt, int label,
                                                      const NormOptions& opts = {}) {
        BoundCheckReport r;
        double denom = z.distance(zt, opts) + z.ref().distance_report(zt.ref(), opts).max;
        double numer = z.rough_integral(label).distance(zt.rough_integral(label), opts);
        if (denom < 1e-300) {
            r.degenerate = true;
            return r;
        }
        r.ratio = numer / denom;
        return r;
    }

private:
    std::shared_ptr<const BranchedRoughPath> ref_;
    std::vector<std::vector<double>> comps_;  // [time][component]

    double remainder_from(int h, std::size_t s, std::size_t t,
                          const std::vector<std::vector<double>>& w,
                          const std::vector<double>& inc) const {
        const auto& tab = ref_->tables();
        double r = comps_[t][h] - comps_[s][h];
        for (int hb = 1; hb < tab.n_components; ++hb) {
            if (tab.degree[h] + tab.degree[hb] > ref_->N() - 1) continue;
            r -= w[h][hb] * inc[hb];
        }
        return r;
    }

    double norm_or_distance(const ControlledPath* other, double beta,
                            const NormOptions& opts) const {
        const auto& tab = ref_->tables();
        const int nc = tab.n_components;
        const std::size_t n = grid_size();
        std::vector<double> sup(nc, 0.0);
        auto pairs = ref_->norm_pairs(opts);
        std::vector<std::vector<std::size_t>> t_by_s(n);
        for (const auto& [s, t] : pairs) t_by_s[s].push_back(t);
        std::vector<std::vector<double>> sup_by_s(n, std::vector<double>(nc, 0.0));
        parallel_for(n, opts.jobs, [&](std::size_t s) {
            if (t_by_s[s].empty()) return;
            auto inv_s = ref_->inverse_at(s);
            auto w = star_weights(s);
            std::vector<double> inv_s_o;
            std::vector<std::vector<double>> wo;
            if (other) {
                inv_s_o = other->ref_->inverse_at(s);
                wo = other->star_weights(s);
            }
            for (std::size_t t : t_by_s[s]) {
                auto inc = ref_->increment_with_inverse(inv_s, t);
                std::vector<double> inc_o;
                if (other) inc_o = other->ref_->increment_with_inverse(inv_s_o, t);
                double dt = ref_->times()[t] - ref_->times()[s];
                for (int h = 0; h < nc; ++h) {
                    double r = remainder_from(h, s, t, w, inc);
                    if (other) r -= other->remainder_from(h, s, t, wo, inc_o);
                    double q = std::abs(r) / std::pow(dt, (ref_->N() - tab.degree[h]) * beta);
                    if (q > sup_by_s[s][h]) sup_by_s[s][h] = q;
                }
            }
        });
        double total = 0.0;
        for (int h = 0; h < nc; ++h) {
            double s0 = 0.0;
            for (std::size_t s = 0; s < n; ++s) s0 = std::max(s0, sup_by_s[s][h]);
            double init = other ? std::abs(comps_[0][h] - other->comps_[0][h]) : std::abs(comps_[0][h]);
            total += init + s0;
        }
        return total;
    }
};

}  // namespace brp
