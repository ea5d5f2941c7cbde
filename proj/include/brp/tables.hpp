#pragma once

// Numeric index tables for one (alphabet, degree) slice of the Hopf algebra.
//
// The analytic layer works in doubles over flat arrays; every coefficient
// here is fetched exactly from the rational algebra and converted once.
// Forests of degree <= N are indexed in canonical order, so the component
// range of controlled paths (degree <= N-1) is a prefix.

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "brp/hopf.hpp"

namespace brp {

struct AlgebraTables {
    int labels = 1;
    int N = 0;

    std::vector<Forest> forests;  // degree <= N, canonical order; index 0 is the empty forest
    std::map<Forest, int> index_of;
    std::vector<int> degree;
    int n_components = 0;  // forests of degree <= N-1 (prefix of the index range)

    struct PairTerm {
        int left, right;
        double coeff;
    };
    std::vector<std::vector<PairTerm>> coproduct_pairs;  // Delta f_i
    std::vector<std::vector<PairTerm>> reduced_pairs;    // Delta' f_i

    struct Term {
        int index;
        double coeff;
    };
    std::vector<std::vector<Term>> antipode_rows;  // S(f_i)

    // split of a nonempty forest into (first tree as forest, remaining forest)
    std::vector<int> split_tree, split_rest;
    // [f_i]_a for forests of degree <= N-1
    std::vector<std::vector<int>> graft_root_index;

    // star_comp[h][hbar]: coefficients of <delta_hbar * delta_h, .> over the
    // component range, i.e. the Z-weights multiplying X^{hbar} in delta Z^h.
    // Valid for |h| <= N-1 and 1 <= |hbar| <= N-1-|h| (empty otherwise).
    std::vector<std::vector<std::vector<Term>>> star_comp;

    std::vector<double> sigma;  // symmetry factors

    int index(const Forest& f) const {
        auto it = index_of.find(f);
        if (it == index_of.end()) throw std::invalid_argument("AlgebraTables: forest out of range");
        return it->second;
    }
};

inline std::shared_ptr<const AlgebraTables> algebra_tables(int labels, int N,
                                                           int degree_cap = kDefaultDegreeCap) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const AlgebraTables>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(labels, N);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    auto tab = std::make_shared<AlgebraTables>();
    tab->labels = labels;
    tab->N = N;
    tab->forests = enumerate_forests(N, labels, degree_cap);
    const int nf = static_cast<int>(tab->forests.size());
    for (int i = 0; i < nf; ++i) tab->index_of.emplace(tab->forests[i], i);
    tab->degree.resize(nf);
    tab->sigma.resize(nf);
    for (int i = 0; i < nf; ++i) {
        tab->degree[i] = tab->forests[i].degree();
        tab->sigma[i] = static_cast<double>(symmetry_factor(tab->forests[i]));
        if (tab->degree[i] <= N - 1) tab->n_components = i + 1;
    }

    tab->coproduct_pairs.resize(nf);
    tab->reduced_pairs.resize(nf);
    tab->antipode_rows.resize(nf);
    tab->split_tree.assign(nf, -1);
    tab->split_rest.assign(nf, -1);
    for (int i = 0; i < nf; ++i) {
        const Forest& f = tab->forests[i];
        for (const auto& [k, c] : coproduct(f).terms())
            tab->coproduct_pairs[i].push_back(
                {tab->index(k.first), tab->index(k.second), c.to_double()});
        if (!f.empty()) {
            const TensorSeries red = reduced_coproduct(f);
            for (const auto& [k, c] : red.terms())
                tab->reduced_pairs[i].push_back(
                    {tab->index(k.first), tab->index(k.second), c.to_double()});
            std::vector<Tree> rest(f.trees().begin() + 1, f.trees().end());
            tab->split_tree[i] = tab->index(Forest(f.trees().front()));
            tab->split_rest[i] = tab->index(Forest(std::move(rest)));
        }
        for (const auto& [g, c] : antipode(f).terms())
            tab->antipode_rows[i].push_back({tab->index(g), c.to_double()});
    }

    tab->graft_root_index.assign(tab->n_components, std::vector<int>(labels, -1));
    for (int i = 0; i < tab->n_components; ++i)
        for (int a = 0; a < labels; ++a)
            tab->graft_root_index[i][a] = tab->index(Forest(graft_root(tab->forests[i], a)));

    tab->star_comp.assign(tab->n_components, {});
    for (int h = 0; h < tab->n_components; ++h) {
        tab->star_comp[h].assign(tab->n_components, {});
        // coefficient of (hbar (x) h) in Delta g, collected over components g
        for (int g = 0; g < tab->n_components; ++g) {
            for (const auto& term : tab->coproduct_pairs[g]) {
                if (term.right != h || tab->degree[term.left] == 0) continue;
                if (term.left >= tab->n_components) continue;
                tab->star_comp[h][term.left].push_back({g, term.coeff});
            }
        }
    }

    cache.emplace(key, tab);
    return tab;
}

}  // namespace brp
