#pragma once

// Rough differential equations driven by branched rough paths.
//
// Vector fields are vectors of multivariate polynomials with rational
// coefficients, so elementary differentials and the grafting identity
//   D^n f_tau : (f_rho1,...,f_rhon) = f_{tau <- rho1...rhon}
// are exact polynomial statements. The solver is the explicit one-step
// B-series update
//   Y_{t} = Y_s + sum_{trees, |tau| <= N} f_tau(Y_s) X^tau_{s,t} / sigma(tau)
// marched over the grid; the solution lift carries f_tau(Y_t)/sigma(tau) on
// tree components.

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "brp/controlled.hpp"

namespace brp {

class Poly {
public:
    using Terms = std::map<std::vector<int>, Rational>;

    explicit Poly(int nvars) : nvars_(nvars) {}

    static Poly constant(int nvars, const Rational& c) {
        Poly p(nvars);
        p.add(std::vector<int>(nvars, 0), c);
        return p;
    }
    static Poly variable(int nvars, int i) {
        Poly p(nvars);
        std::vector<int> e(nvars, 0);
        e.at(i) = 1;
        p.add(e, Rational(1));
        return p;
    }

    int nvars() const { return nvars_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add(const std::vector<int>& exp, const Rational& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.emplace(exp, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        Poly r = a;
        for (const auto& [e, c] : b.terms_) r.add(e, c);
        return r;
    }
    friend Poly operator-(const Poly& a, const Poly& b) {
        Poly r = a;
        for (const auto& [e, c] : b.terms_) r.add(e, -c);
        return r;
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly r(a.nvars_);
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                std::vector<int> e = ea;
                for (int i = 0; i < r.nvars_; ++i) e[i] += eb[i];
                r.add(e, ca * cb);
            }
        return r;
    }
    friend Poly operator*(const Rational& c, const Poly& a) {
        Poly r(a.nvars_);
        for (const auto& [e, q] : a.terms_) r.add(e, c * q);
        return r;
    }
    friend bool operator==(const Poly& a, const Poly& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    Poly derivative(int var) const {
        Poly r(nvars_);
        for (const auto& [e, c] : terms_) {
            if (e[var] == 0) continue;
            std::vector<int> d = e;
            --d[var];
            r.add(d, Rational(e[var]) * c);
        }
        return r;
    }

    double eval(const std::vector<double>& y) const {
        double acc = 0.0;
        for (const auto& [e, c] : terms_) {
            double m = c.to_double();
            for (int i = 0; i < nvars_; ++i)
                for (int k = 0; k < e[i]; ++k) m *= y[i];
            acc += m;
        }
        return acc;
    }

private:
    int nvars_;
    Terms terms_;
};

struct PolyVectorField {
    int noise_dim = 0;  // number of driving labels
    int state_dim = 0;
    std::vector<std::vector<Poly>> fields;  // [label][coordinate]

    void validate() const {
        if (static_cast<int>(fields.size()) != noise_dim)
            throw std::invalid_argument("PolyVectorField: field count != noise dimension");
        for (const auto& f : fields) {
            if (static_cast<int>(f.size()) != state_dim)
                throw std::invalid_argument("PolyVectorField: component count != state dimension");
            for (const Poly& p : f)
                if (p.nvars() != state_dim)
                    throw std::invalid_argument("PolyVectorField: wrong variable count");
        }
    }

    static PolyVectorField zero(int noise_dim, int state_dim) {
        PolyVectorField F;
        F.noise_dim = noise_dim;
        F.state_dim = state_dim;
        F.fields.assign(noise_dim, std::vector<Poly>(state_dim, Poly(state_dim)));
        return F;
    }
};

// frozen multi-directional derivative D^m phi : (v_1,...,v_m), componentwise
inline std::vector<Poly> multi_derivative(const std::vector<Poly>& phi,
                                          const std::vector<std::vector<Poly>>& dirs) {
    const int n = static_cast<int>(phi.size());
    const int m = static_cast<int>(dirs.size());
    std::vector<Poly> out(n, Poly(n));
    std::vector<int> alpha(m, 0);
    while (true) {
        for (int beta = 0; beta < n; ++beta) {
            Poly term = phi[beta];
            for (int j = 0; j < m; ++j) term = term.derivative(alpha[j]);
            if (!term.is_zero()) {
                for (int j = 0; j < m; ++j) term = term * dirs[j][alpha[j]];
                out[beta] = out[beta] + term;
            }
        }
        int k = 0;
        for (; k < m; ++k) {
            if (++alpha[k] < n) break;
            alpha[k] = 0;
        }
        if (k == m) break;
    }
    return out;
}

// Exact elementary differentials f_tau, memoized per field.
class ElementaryDifferentials {
public:
    explicit ElementaryDifferentials(PolyVectorField field, int degree_cap = kDefaultDegreeCap)
        : field_(std::move(field)), cap_(degree_cap) {
        field_.validate();
    }

    const PolyVectorField& field() const { return field_; }

    const std::vector<Poly>& differential(const Tree& tau) {
        if (tau.degree() > cap_)
            throw std::invalid_argument("elementary differential: tree degree above cap");
        auto it = memo_.find(tau);
        if (it != memo_.end()) return it->second;
        if (tau.label() < 0 || tau.label() >= field_.noise_dim)
            throw std::invalid_argument("elementary differential: label outside the alphabet");
        std::vector<Poly> result;
        if (tau.children().empty()) {
            result = field_.fields[tau.label()];
        } else {
            std::vector<std::vector<Poly>> dirs;
            for (const Tree& c : tau.children()) dirs.push_back(differential(c));
            result = multi_derivative(field_.fields[tau.label()], dirs);
        }
        return memo_.emplace(tau, std::move(result)).first->second;
    }

    // f_h for a linear combination of trees (forests that are not single
    // trees have no elementary differential)
    std::vector<Poly> differential(const ForestSeries& series) {
        std::vector<Poly> out(field_.state_dim, Poly(field_.state_dim));
        for (const auto& [f, c] : series.terms()) {
            if (!f.is_tree()) continue;
            const auto& d = differential(f.trees().front());
            for (int i = 0; i < field_.state_dim; ++i) out[i] = out[i] + c * d[i];
        }
        return out;
    }

    std::vector<double> eval(const Tree& tau, const std::vector<double>& y) {
        const auto& d = differential(tau);
        std::vector<double> out(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i].eval(y);
        return out;
    }

private:
    PolyVectorField field_;
    int cap_;
    std::map<Tree, std::vector<Poly>> memo_;
};

// D^n f_tau : (f_rho1,...,f_rhon) == f_{tau <- rho1...rhon}, exactly.
inline bool check_grafting_identity(ElementaryDifferentials& ed, const Tree& tau,
                                    const std::vector<Tree>& rhos) {
    std::vector<std::vector<Poly>> dirs;
    for (const Tree& rho : rhos) dirs.push_back(ed.differential(rho));
    std::vector<Poly> lhs = multi_derivative(ed.differential(tau), dirs);
    std::vector<Poly> rhs = ed.differential(graft_onto_tree(tau, Forest(rhos)));
    return lhs == rhs;
}

struct RDESolution {
    std::vector<double> times;
    std::vector<std::vector<double>> Y;    // [time][coordinate]
    std::vector<ControlledPath> lifted;    // one controlled path per coordinate
};

class RDESolver {
public:
    RDESolver(std::shared_ptr<const BranchedRoughPath> X, PolyVectorField field,
              double divergence_guard = 1e9)
        : X_(std::move(X)), ed_(std::move(field)), guard_(divergence_guard) {
        if (ed_.field().noise_dim != X_->labels())
            throw std::invalid_argument("RDESolver: field noise dimension != driver alphabet");
        const auto& tab = X_->tables();
        for (std::size_t f = 1; f < tab.forests.size(); ++f) {
            if (!tab.forests[f].is_tree()) continue;
            tree_index_.push_back(static_cast<int>(f));
            tree_.push_back(tab.forests[f].trees().front());
            inv_sigma_.push_back(1.0 / tab.sigma[f]);
        }
    }

    const BranchedRoughPath& driver() const { return *X_; }
    ElementaryDifferentials& differentials() { return ed_; }

    // one explicit B-series step from state y over [s,t]
    std::vector<double> step(const std::vector<double>& y, std::size_t s, std::size_t t) {
        auto inc = X_->increment(s, t);
        return step_with_increment(y, inc);
    }

    RDESolution solve(const std::vector<double>& xi) {
        if (static_cast<int>(xi.size()) != ed_.field().state_dim)
            throw std::invalid_argument("RDESolver: initial condition dimension mismatch");
        const std::size_t n = X_->grid_size();
        RDESolution sol;
        sol.times = X_->times();
        sol.Y.assign(n, xi);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            auto inc = X_->increment(i, i + 1);
            sol.Y[i + 1] = step_with_increment(sol.Y[i], inc);
            for (double v : sol.Y[i + 1])
                if (!(std::abs(v) <= guard_))
                    throw std::runtime_error("RDESolver: divergence guard tripped at t = " +
                                             std::to_string(sol.times[i + 1]));
        }
        sol.lifted = lift_solution(sol.Y);
        return sol;
    }

    // f(Y) as a controlled path per coordinate: <h, f(Y)> = f_{[h]_a}(Y)/sigma(h)
    std::vector<ControlledPath> compose_field(const std::vector<std::vector<double>>& Y,
                                              int label) {
        const auto& tab = X_->tables();
        const std::size_t n = Y.size();
        std::vector<std::vector<std::vector<double>>> comps(
            ed_.field().state_dim,
            std::vector<std::vector<double>>(n, std::vector<double>(tab.n_components, 0.0)));
        for (int h = 0; h < tab.n_components; ++h) {
            Tree grafted = graft_root(tab.forests[h], label);
            const auto& poly = ed_.differential(grafted);
            double inv_sigma = 1.0 / tab.sigma[h];
            for (std::size_t i = 0; i < n; ++i)
                for (int beta = 0; beta < ed_.field().state_dim; ++beta)
                    comps[beta][i][h] = poly[beta].eval(Y[i]) * inv_sigma;
        }
        std::vector<ControlledPath> out;
        for (int beta = 0; beta < ed_.field().state_dim; ++beta)
            out.emplace_back(X_, std::move(comps[beta]));
        return out;
    }

private:
    std::shared_ptr<const BranchedRoughPath> X_;
    ElementaryDifferentials ed_;
    double guard_;
    std::vector<int> tree_index_;
    std::vector<Tree> tree_;
    std::vector<double> inv_sigma_;

    std::vector<double> step_with_increment(const std::vector<double>& y,
                                            const std::vector<double>& inc) {
        std::vector<double> out = y;
        for (std::size_t k = 0; k < tree_.size(); ++k) {
            double w = inc[tree_index_[k]] * inv_sigma_[k];
            if (w == 0.0) continue;
            auto v = ed_.eval(tree_[k], y);
            for (std::size_t b = 0; b < out.size(); ++b) out[b] += w * v[b];
        }
        return out;
    }

    std::vector<ControlledPath> lift_solution(const std::vector<std::vector<double>>& Y) {
        const auto& tab = X_->tables();
        const std::size_t n = Y.size();
        std::vector<ControlledPath> out;
        for (int beta = 0; beta < ed_.field().state_dim; ++beta) {
            std::vector<std::vector<double>> comps(n, std::vector<double>(tab.n_components, 0.0));
            for (std::size_t i = 0; i < n; ++i) comps[i][0] = Y[i][beta];
            for (int h = 1; h < tab.n_components; ++h) {
                if (!tab.forests[h].is_tree()) continue;
                const auto& poly = ed_.differential(tab.forests[h].trees().front());
                double inv_sigma = 1.0 / tab.sigma[h];
                for (std::size_t i = 0; i < n; ++i)
                    comps[i][h] = poly[beta].eval(Y[i]) * inv_sigma;
            }
            out.emplace_back(X_, std::move(comps));
        }
        return out;
    }
};

struct ItoLyonsReport {
    double distance = 0.0;     // summed over coordinates
    double denominator = 0.0;  // |xi - xit| + rho_alpha(X, Xt)
    double ratio = 0.0;
    bool degenerate = false;
};

inline ItoLyonsReport ito_lyons_stability(const std::vector<double>& xi,
                                          std::shared_ptr<const BranchedRoughPath> X,
                                          const std::vector<double>& xit,
                                          std::shared_ptr<const BranchedRoughPath> Xt,
                                          const PolyVectorField& field,
                                          const NormOptions& opts = {}) {
    X->require_same_grid(*Xt);
    RDESolver a(X, field), b(Xt, field);
    auto sa = a.solve(xi);
    auto sb = b.solve(xit);
    ItoLyonsReport r;
    for (std::size_t beta = 0; beta < sa.lifted.size(); ++beta)
        r.distance += sa.lifted[beta].distance(sb.lifted[beta], opts);
    double dxi = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i) dxi += std::abs(xi[i] - xit[i]);
    r.denominator = dxi + X->distance(*Xt, opts);
    if (r.denominator < 1e-300) {
        r.degenerate = true;
        return r;
    }
    r.ratio = r.distance / r.denominator;
    return r;
}

}  // namespace brp
