#pragma once

// Controlled paths from smooth data and back.
//
// gamma() realizes the recursive construction
//   Gamma_X(f)^h = f^h                                  at top degree,
//   Gamma_X(f)^h = sum_{p prim, |p|<N-|h|} int Gamma_X(f)^{p* star h} dX^p + f^h
// with every rough integral evaluated as a compensated sum whose germ runs
// over natural-growth words rho T p and dual weights rho* * p* * h fetched
// exactly from the primitive basis.
//
// local_affine_fit() interleaves the same recursion with the affine choice of
// f on a grid window, so the result interpolates a given controlled path at
// the window ends. glue() concatenates windows; approximate() does both over
// a dissection, and convergence_study() measures the beta-norm decay.

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "brp/controlled.hpp"
#include "brp/primitives.hpp"

namespace brp {

struct SmoothControlData {
    std::shared_ptr<const AlgebraTables> tab;
    double epsilon = 0.0;
    std::vector<double> times;
    std::vector<std::vector<double>> comps;  // [time][component]

    double component(std::size_t i, const Forest& h) const {
        int idx = tab->index(h);
        if (idx >= tab->n_components)
            throw std::invalid_argument("SmoothControlData: forest of degree >= N");
        return comps.at(i)[idx];
    }

    // ||f|| = max_h sup |df^h_{s,t}| / |t-s|^{1-eps}
    double norm() const {
        double worst = 0.0;
        for (std::size_t s = 0; s < times.size(); ++s)
            for (std::size_t t = s + 1; t < times.size(); ++t) {
                double dt = std::pow(times[t] - times[s], 1.0 - epsilon);
                for (int h = 0; h < tab->n_components; ++h)
                    worst = std::max(worst, std::abs(comps[t][h] - comps[s][h]) / dt);
            }
        return worst;
    }
};

inline double default_epsilon(double alpha) {
    int N = static_cast<int>(std::floor(1.0 / alpha));
    return (1.0 - N * alpha) / 2.0;
}

inline void check_epsilon(double epsilon, double alpha) {
    int N = static_cast<int>(std::floor(1.0 / alpha));
    if (!(epsilon > 0.0) || !(epsilon < 1.0 - N * alpha))
        throw std::invalid_argument("epsilon must lie in (0, 1 - N*alpha)");
}

namespace detail {

// Precomputed germ data for one (alphabet, N) slice.
struct GammaPlan {
    struct GermTerm {
        std::vector<AlgebraTables::Term> weights;     // dual series over components
        std::vector<AlgebraTables::Term> increments;  // rho T p over forests of degree <= N-1
    };
    struct Integral {
        int primitive_degree;
        std::vector<GermTerm> terms;  // empty word first, then rho in word order
    };
    // [component h] -> integrals over primitives with |p| < N - |h|
    std::vector<std::vector<Integral>> integrals;
};

inline std::vector<AlgebraTables::Term> to_terms(const ForestSeries& s, const AlgebraTables& tab,
                                                 int max_degree) {
    std::vector<AlgebraTables::Term> out;
    for (const auto& [f, c] : s.terms()) {
        if (f.degree() > max_degree) continue;
        out.push_back({tab.index(f), c.to_double()});
    }
    return out;
}

inline const GammaPlan& gamma_plan(const PrimitiveBasis& basis, const AlgebraTables& tab) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, GammaPlan> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(tab.labels, tab.N);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    if (basis.alphabet() != tab.labels || basis.max_degree() < tab.N)
        throw std::invalid_argument("gamma: basis does not cover the path's alphabet and degree");

    const int N = tab.N;
    GammaPlan plan;
    plan.integrals.resize(tab.n_components);
    for (int h = 0; h < tab.n_components; ++h) {
        int n = tab.degree[h];
        if (n > N - 2) continue;  // top degree carries no integrals
        ForestSeries delta_h(tab.forests[h]);
        for (std::size_t pi = 0; pi < basis.primitives().size(); ++pi) {
            int pdeg = basis.primitive_degree(static_cast<int>(pi));
            if (pdeg >= N - n) continue;
            const TopWord* pword = basis.find_word({static_cast<int>(pi)});
            if (!pword) throw std::logic_error("gamma: primitive word missing");
            GammaPlan::Integral integral;
            integral.primitive_degree = pdeg;
            ForestSeries p_star_h = convolution(pword->dual, delta_h, N - 1, tab.labels);
            // empty word: germ term Gamma^{p* h} X^p
            GammaPlan::GermTerm lead;
            lead.weights = to_terms(p_star_h, tab, N - 1);
            lead.increments = to_terms(basis.primitives()[pi], tab, N - 1);
            integral.terms.push_back(std::move(lead));
            // words rho with |rho| < N - n - |p|
            for (const TopWord& rho : basis.words()) {
                if (rho.degree >= N - n - pdeg) continue;
                GammaPlan::GermTerm term;
                term.weights = to_terms(convolution(rho.dual, p_star_h, N - 1, tab.labels), tab, N - 1);
                term.increments =
                    to_terms(natural_growth(rho.element, basis.primitives()[pi]), tab, N - 1);
                if (!term.weights.empty() && !term.increments.empty())
                    integral.terms.push_back(std::move(term));
            }
            plan.integrals[h].push_back(std::move(integral));
        }
    }
    return cache.emplace(key, std::move(plan)).first->second;
}

// one germ: (sum_c w_c G_c(j)) * (sum_g v_g X^g_{j,j+1})
inline double germ_value(const GammaPlan::GermTerm& term,
                         const std::vector<std::vector<double>>& comps, std::size_t j,
                         const std::vector<double>& cell_inc) {
    double w = 0.0;
    for (const auto& t : term.weights) w += t.coeff * comps[j][t.index];
    double v = 0.0;
    for (const auto& t : term.increments) v += t.coeff * cell_inc[t.index];
    return w * v;
}

}  // namespace detail

// Gamma_X(f) on the full grid of X.
inline ControlledPath gamma(std::shared_ptr<const BranchedRoughPath> X,
                            const SmoothControlData& f, const PrimitiveBasis& basis) {
    const auto& tab = X->tables();
    check_epsilon(f.epsilon, X->alpha());
    if (!f.tab || f.times != X->times() || f.tab->labels != tab.labels || f.tab->N != tab.N)
        throw std::invalid_argument("gamma: control data grid mismatch");
    const auto& plan = detail::gamma_plan(basis, tab);
    const std::size_t n = X->grid_size();
    const int N = X->N();

    std::vector<std::vector<double>> cell_inc(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) cell_inc[j] = X->increment(j, j + 1);

    std::vector<std::vector<double>> comps(n, std::vector<double>(tab.n_components, 0.0));
    for (int deg = N - 1; deg >= 0; --deg) {
        for (int h = 0; h < tab.n_components; ++h) {
            if (tab.degree[h] != deg) continue;
            for (std::size_t j = 0; j < n; ++j) comps[j][h] = f.comps[j][h];
            for (const auto& integral : plan.integrals[h]) {
                double acc = 0.0;
                for (std::size_t j = 0; j + 1 < n; ++j) {
                    for (const auto& term : integral.terms)
                        acc += detail::germ_value(term, comps, j, cell_inc[j]);
                    comps[j + 1][h] += acc;
                }
            }
        }
    }
    return ControlledPath(std::move(X), std::move(comps));
}

// Recover f with gamma(X, f) == W for any controlled path W (the integrals are
// subtracted with germs built from W itself, so no recursion is needed).
inline SmoothControlData extract_control_data(const ControlledPath& W, const PrimitiveBasis& basis,
                                              double epsilon) {
    auto X = W.ref_ptr();
    const auto& tab = X->tables();
    check_epsilon(epsilon, X->alpha());
    const auto& plan = detail::gamma_plan(basis, tab);
    const std::size_t n = X->grid_size();

    SmoothControlData f;
    f.tab = X->tables_ptr();
    f.epsilon = epsilon;
    f.times = X->times();
    f.comps = W.values();
    for (int h = 0; h < tab.n_components; ++h) {
        for (const auto& integral : plan.integrals[h]) {
            double acc = 0.0;
            for (std::size_t j = 0; j + 1 < n; ++j) {
                auto cell = X->increment(j, j + 1);
                for (const auto& term : integral.terms)
                    acc += detail::germ_value(term, W.values(), j, cell);
                f.comps[j + 1][h] -= acc;
            }
        }
    }
    return f;
}

// A controlled-path fragment living on a contiguous index window.
struct LocalPiece {
    std::size_t start = 0;                    // grid index of the first sample
    std::vector<std::vector<double>> comps;   // [local time][component]
    std::size_t end() const { return start + comps.size() - 1; }
};

struct LocalAffineResult {
    LocalPiece piece;                         // Gamma_X(f) on the window
    std::vector<std::vector<double>> control; // the affine f on the window
};

// Affine control data on [grid[ia], grid[ib]] fitted to Z (eqn of the
// short-time approximation): top components interpolate Z; lower ones get the
// affine correction that matches dZ over the window after subtracting the
// primitive integrals.
inline LocalAffineResult local_affine_fit(const ControlledPath& Z, std::size_t ia, std::size_t ib,
                                          const PrimitiveBasis& basis) {
    const auto& X = Z.ref();
    const auto& tab = X.tables();
    if (ib <= ia || ib >= X.grid_size())
        throw std::invalid_argument("local_affine_fit: empty or out-of-range interval");
    const auto& plan = detail::gamma_plan(basis, tab);
    const std::size_t m = ib - ia + 1;
    const int N = X.N();
    double t0 = X.times()[ia], T = X.times()[ib] - t0;

    std::vector<std::vector<double>> cell_inc(m - 1);
    for (std::size_t j = 0; j + 1 < m; ++j) cell_inc[j] = X.increment(ia + j, ia + j + 1);

    LocalAffineResult out;
    out.piece.start = ia;
    out.piece.comps.assign(m, std::vector<double>(tab.n_components, 0.0));
    out.control.assign(m, std::vector<double>(tab.n_components, 0.0));
    auto& G = out.piece.comps;

    for (int deg = N - 1; deg >= 0; --deg) {
        for (int h = 0; h < tab.n_components; ++h) {
            if (tab.degree[h] != deg) continue;
            double z0 = Z.component(ia, h), dz = Z.component(ib, h) - z0;
            if (deg == N - 1) {
                for (std::size_t j = 0; j < m; ++j) {
                    double lam = (X.times()[ia + j] - t0) / T;
                    out.control[j][h] = z0 + lam * dz;
                    G[j][h] = out.control[j][h];
                }
                continue;
            }
            // prefix integrals for every admissible primitive
            std::vector<double> total(m, 0.0);
            for (const auto& integral : plan.integrals[h]) {
                double acc = 0.0;
                for (std::size_t j = 0; j + 1 < m; ++j) {
                    for (const auto& term : integral.terms)
                        acc += detail::germ_value(term, G, j, cell_inc[j]);
                    total[j + 1] += acc;
                }
            }
            for (std::size_t j = 0; j < m; ++j) {
                double lam = (X.times()[ia + j] - t0) / T;
                out.control[j][h] = z0 + lam * (dz - total[m - 1]);
                G[j][h] = out.control[j][h] + total[j];
            }
        }
    }
    return out;
}

// Concatenate contiguous pieces into a full-grid controlled path. Pieces must
// cover the grid and agree at shared endpoints.
inline ControlledPath glue(std::shared_ptr<const BranchedRoughPath> X,
                           const std::vector<LocalPiece>& pieces, double endpoint_tol = 1e-10) {
    if (pieces.empty()) throw std::invalid_argument("glue: no pieces");
    const auto& tab = X->tables();
    std::vector<std::vector<double>> comps(X->grid_size(),
                                           std::vector<double>(tab.n_components, 0.0));
    std::size_t expected = 0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        const auto& piece = pieces[k];
        if (piece.start != expected && !(k == 0 && piece.start == 0))
            throw std::invalid_argument("glue: pieces are not contiguous");
        for (std::size_t j = 0; j < piece.comps.size(); ++j) {
            std::size_t i = piece.start + j;
            if (i >= comps.size()) throw std::invalid_argument("glue: piece exceeds the grid");
            if (j == 0 && k > 0) {
                for (int h = 0; h < tab.n_components; ++h) {
                    double prev = comps[i][h], cur = piece.comps[j][h];
                    if (std::abs(prev - cur) > endpoint_tol * (1.0 + std::abs(prev)))
                        throw std::invalid_argument("glue: endpoint mismatch beyond tolerance");
                }
            }
            comps[i] = piece.comps[j];
        }
        expected = piece.end();
    }
    if (expected != X->grid_size() - 1) throw std::invalid_argument("glue: grid not covered");
    return ControlledPath(std::move(X), std::move(comps));
}

// Piecewise-affine approximation over a dissection given by grid indices.
inline ControlledPath approximate(const ControlledPath& Z, const std::vector<std::size_t>& mesh,
                                  const PrimitiveBasis& basis) {
    if (mesh.size() < 2 || mesh.front() != 0 || mesh.back() != Z.grid_size() - 1)
        throw std::invalid_argument("approximate: dissection must span the grid");
    std::vector<LocalPiece> pieces;
    for (std::size_t k = 0; k + 1 < mesh.size(); ++k)
        pieces.push_back(local_affine_fit(Z, mesh[k], mesh[k + 1], basis).piece);
    return glue(Z.ref_ptr(), pieces);
}

inline std::vector<std::size_t> dyadic_mesh(std::size_t grid_size, int level) {
    std::size_t cells = std::size_t{1} << level;
    if ((grid_size - 1) % cells != 0)
        throw std::invalid_argument("dyadic_mesh: grid does not divide into 2^level cells");
    std::vector<std::size_t> mesh;
    for (std::size_t k = 0; k <= cells; ++k) mesh.push_back(k * ((grid_size - 1) / cells));
    return mesh;
}

struct ConvergenceReport {
    std::vector<double> thetas;  // mesh sizes
    std::vector<double> errors;  // ||Z ; Ztilde||_beta
    LogLogFit fit;               // slope of error against theta
    bool monotone = true;        // nonincreasing within 10% noise
};

inline ConvergenceReport convergence_study(const ControlledPath& Z, double beta,
                                           const std::vector<int>& levels,
                                           const PrimitiveBasis& basis,
                                           const NormOptions& opts = {}) {
    if (!(beta < Z.alpha())) throw std::invalid_argument("convergence_study: beta must be < alpha");
    ConvergenceReport report;
    for (int level : levels) {
        auto mesh = dyadic_mesh(Z.grid_size(), level);
        auto approx = approximate(Z, mesh, basis);
        double theta = 0.0;
        for (std::size_t k = 0; k + 1 < mesh.size(); ++k)
            theta = std::max(theta, Z.ref().times()[mesh[k + 1]] - Z.ref().times()[mesh[k]]);
        report.thetas.push_back(theta);
        report.errors.push_back(Z.distance(approx, beta, opts));
    }
    for (std::size_t i = 0; i + 1 < report.errors.size(); ++i)
        if (report.errors[i + 1] > 1.1 * report.errors[i]) report.monotone = false;
    // fit the decay against theta (thetas shrink with the level)
    report.fit = fit_loglog(report.thetas, report.errors);
    return report;
}

struct StabilityReport {
    double distance = 0.0;
    double denominator = 0.0;
    double ratio = 0.0;
    bool degenerate = false;
};

// Theorem-style ratio ||Gamma_X(f);Gamma_Xt(f)||_alpha / (||f|| rho_alpha(X,Xt)).
inline StabilityReport gamma_stability(std::shared_ptr<const BranchedRoughPath> X,
                                       std::shared_ptr<const BranchedRoughPath> Xt,
                                       const SmoothControlData& f, const PrimitiveBasis& basis,
                                       const NormOptions& opts = {}) {
    X->require_same_grid(*Xt);
    StabilityReport r;
    auto gx = gamma(X, f, basis);
    auto gxt = gamma(Xt, f, basis);
    r.distance = gx.distance(gxt, opts);
    r.denominator = f.norm() * X->distance(*Xt, opts);
    if (r.denominator < 1e-300) {
        r.degenerate = true;
        return r;
    }
    r.ratio = r.distance / r.denominator;
    return r;
}

struct SmoothApproximationResult {
    bool ok = false;
    SmoothControlData control;      // f with ||Z - Gamma_X(f)||_beta <= delta/2
    double data_error = 0.0;        // first half of the budget
    int dissection_level = -1;
    std::vector<ControlledPath> approximations;  // Gamma_{X_eps}(f)
    std::vector<double> driver_errors;           // ||Gamma_X(f);Gamma_{X_eps}(f)||_beta
    std::vector<bool> certified;                 // data_error + driver_error <= delta
};

// Canonical smooth approximations: pick f within delta/2 of Z in the beta
// norm, then push f through the approximating drivers.
inline SmoothApproximationResult smooth_approximation(
    const ControlledPath& Z, const std::vector<std::shared_ptr<const BranchedRoughPath>>& drivers,
    const PrimitiveBasis& basis, double delta, double beta, double epsilon,
    const NormOptions& opts = {}) {
    if (!(beta < Z.alpha())) throw std::invalid_argument("smooth_approximation: beta >= alpha");
    SmoothApproximationResult out;
    std::size_t n = Z.grid_size();
    ControlledPath best = Z;
    // dissections stay strictly coarser than the grid: at grid scale the
    // affine fit reproduces the samples and the budget question is empty
    for (int level = 0; (std::size_t{1} << (level + 1)) <= (n - 1); ++level) {
        if ((n - 1) % (std::size_t{1} << level) != 0) break;
        auto approx = approximate(Z, dyadic_mesh(n, level), basis);
        double err = Z.distance(approx, beta, opts);
        if (err <= delta / 2) {
            out.ok = true;
            out.data_error = err;
            out.dissection_level = level;
            best = approx;
            break;
        }
    }
    if (!out.ok) return out;  // budget unattainable at this grid resolution
    out.control = extract_control_data(best, basis, epsilon);
    auto gx = gamma(Z.ref_ptr(), out.control, basis);
    for (const auto& driver : drivers) {
        auto approx = gamma(driver, out.control, basis);
        double err = gx.distance(approx, beta, opts);
        out.driver_errors.push_back(err);
        out.certified.push_back(out.data_error + err <= delta);
        out.approximations.push_back(std::move(approx));
    }
    return out;
}

}  // namespace brp
