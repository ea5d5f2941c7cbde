#pragma once

// The decorated Connes-Kreimer Hopf algebra on rooted forests:
// coproduct, antipode, convolution of dual series, pre-Lie grafting and its
// symmetric-brace extension, natural growth, symmetry factors.
//
// Everything here is exact. Memo tables are global, guarded by a mutex, and
// keyed by the forests themselves, so results are shared across alphabets
// and reproducible.

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "brp/forest.hpp"
#include "brp/series.hpp"

namespace brp {

namespace detail {
struct HopfCache {
    std::recursive_mutex mu;
    std::map<Forest, TensorSeries> coproduct;
    std::map<Forest, ForestSeries> antipode;
    std::map<Forest, ForestSeries> pi1;
};
inline HopfCache& hopf_cache() {
    static HopfCache c;
    return c;
}
}  // namespace detail

// Delta h, built from Delta 1 = 1 (x) 1, multiplicativity, and
// Delta [h]_a = (id (x) [.]_a) Delta h + [h]_a (x) 1.
inline const TensorSeries& coproduct(const Forest& h) {
    auto& cache = detail::hopf_cache();
    std::lock_guard<std::recursive_mutex> lock(cache.mu);
    auto it = cache.coproduct.find(h);
    if (it != cache.coproduct.end()) return it->second;

    TensorSeries out;
    if (h.empty()) {
        out.add(Forest(), Forest(), Rational(1));
    } else if (h.is_tree()) {
        const Tree& t = h.trees().front();
        const TensorSeries& inner = coproduct(Forest(std::vector<Tree>(t.children())));
        for (const auto& [k, c] : inner.terms())
            out.add(k.first, Forest(graft_root(k.second, t.label())), c);
        out.add(h, Forest(), Rational(1));
    } else {
        // split off the first tree, multiply coproducts
        const Tree& t = h.trees().front();
        std::vector<Tree> rest(h.trees().begin() + 1, h.trees().end());
        out = coproduct(Forest(t)) * coproduct(Forest(std::move(rest)));
    }
    return cache.coproduct.emplace(h, std::move(out)).first->second;
}

inline TensorSeries reduced_coproduct(const Forest& h) {
    if (h.empty()) throw std::invalid_argument("reduced_coproduct: empty forest");
    TensorSeries out = coproduct(h);
    out.add(h, Forest(), Rational(-1));
    out.add(Forest(), h, Rational(-1));
    return out;
}

inline Rational counit(const Forest& h) { return h.empty() ? Rational(1) : Rational(0); }

// Antipode from m(S (x) id) Delta h = eps(h) 1:
// S(h) = -h - sum' S(h') h'' over the reduced coproduct.
inline const ForestSeries& antipode(const Forest& h) {
    auto& cache = detail::hopf_cache();
    std::lock_guard<std::recursive_mutex> lock(cache.mu);
    auto it = cache.antipode.find(h);
    if (it != cache.antipode.end()) return it->second;

    ForestSeries out;
    if (h.empty()) {
        out = ForestSeries::unit();
    } else {
        out.add(h, Rational(-1));
        const TensorSeries red = reduced_coproduct(h);
        for (const auto& [k, c] : red.terms())
            out += (-c) * (antipode(k.first) * ForestSeries(k.second));
    }
    return cache.antipode.emplace(h, std::move(out)).first->second;
}

inline ForestSeries antipode(const ForestSeries& x) {
    ForestSeries out;
    for (const auto& [f, c] : x.terms()) out += c * antipode(f);
    return out;
}

// Symmetry factor Sigma(h): the order of the group permuting identical
// branches, computed on the forest rooted at an auxiliary vertex. The helper
// is label-independent by construction.
inline std::uint64_t symmetry_factor(const Forest& h) {
    std::uint64_t sigma = 1;
    const auto& ts = h.trees();
    std::size_t i = 0;
    while (i < ts.size()) {
        std::size_t j = i;
        while (j < ts.size() && ts[j] == ts[i]) ++j;
        std::uint64_t m = j - i;
        for (std::uint64_t k = 2; k <= m; ++k) sigma *= k;
        std::uint64_t inner = symmetry_factor(Forest(std::vector<Tree>(ts[i].children())));
        for (std::uint64_t k = 0; k < m; ++k) sigma *= inner;
        i = j;
    }
    return sigma;
}

inline std::uint64_t symmetry_factor(const Tree& t) { return symmetry_factor(Forest(t)); }

// ----------------------------------------------------------------------------
// convolution of dual series (delta basis)
//
// Dual elements are stored as forest series x = sum x^h delta_h. Then
// (x * y)(g) = <x (x) y, Delta g>, i.e. the coefficient of g in x * y pairs
// the coproduct of g against the two factors.
inline ForestSeries convolution(const ForestSeries& x, const ForestSeries& y, int cutoff,
                                int alphabet, int degree_cap = kDefaultDegreeCap) {
    if (cutoff > degree_cap) throw std::invalid_argument("convolution: cutoff above safety cap");
    ForestSeries out;
    for (int n = 0; n <= cutoff; ++n) {
        for (const Forest& g : forests_of_degree(n, alphabet, degree_cap)) {
            Rational acc(0);
            for (const auto& [k, c] : coproduct(g).terms()) {
                Rational cx = x.coeff(k.first);
                if (cx.is_zero()) continue;
                Rational cy = y.coeff(k.second);
                if (cy.is_zero()) continue;
                acc += c * cx * cy;
            }
            out.add(g, acc);
        }
    }
    return out;
}

// ----------------------------------------------------------------------------
// grafting
//
// tree (x) forest: graft every tree of the forest onto some node of the tree,
// summed over all node assignments.
namespace detail {

inline Tree attach_extras(const Tree& t, const std::vector<std::vector<Tree>>& extras, int& cursor) {
    int my = cursor++;
    std::vector<Tree> children;
    for (const Tree& c : t.children()) children.push_back(attach_extras(c, extras, cursor));
    for (const Tree& e : extras[my]) children.push_back(e);
    return Tree(t.label(), std::move(children));
}

}  // namespace detail

inline ForestSeries graft_onto_tree(const Tree& t, const Forest& h) {
    const int nodes = t.degree();
    const auto& scions = h.trees();
    const std::size_t m = scions.size();
    ForestSeries out;
    std::vector<int> where(m, 0);
    while (true) {
        std::vector<std::vector<Tree>> extras(nodes);
        for (std::size_t i = 0; i < m; ++i) extras[where[i]].push_back(scions[i]);
        int cursor = 0;
        out.add(Forest(detail::attach_extras(t, extras, cursor)), Rational(1));
        std::size_t k = 0;
        for (; k < m; ++k) {
            if (++where[k] < nodes) break;
            where[k] = 0;
        }
        if (k == m) break;
    }
    return out;
}

// n-fold unshuffle of the symmetric-algebra coproduct: distribute the trees
// of h over `slots` ordered slots in all ways.
inline void for_each_tree_split(const Forest& h, int slots,
                                const std::function<void(const std::vector<Forest>&)>& fn) {
    const auto& ts = h.trees();
    const std::size_t m = ts.size();
    std::vector<int> where(m, 0);
    while (true) {
        std::vector<std::vector<Tree>> parts(slots);
        for (std::size_t i = 0; i < m; ++i) parts[where[i]].push_back(ts[i]);
        std::vector<Forest> out;
        out.reserve(slots);
        for (auto& p : parts) out.push_back(Forest(std::move(p)));
        fn(out);
        std::size_t k = 0;
        for (; k < m; ++k) {
            if (++where[k] < slots) break;
            where[k] = 0;
        }
        if (k == m) break;
    }
}

// x <- y on forests: h1...hn <- hbar = (h1 <- hbar_(1)) ... (hn <- hbar_(n))
// with the symmetric-algebra coproduct distributing hbar over the trees.
// The empty forest absorbs: 1 <- hbar = eps(hbar) 1.
inline ForestSeries grafting(const Forest& x, const Forest& y) {
    const auto& ts = x.trees();
    const int n = static_cast<int>(ts.size());
    ForestSeries out;
    if (n == 0) {
        if (y.empty()) out = ForestSeries::unit();
        return out;
    }
    for_each_tree_split(y, n, [&](const std::vector<Forest>& parts) {
        ForestSeries prod = ForestSeries::unit();
        for (int i = 0; i < n; ++i) {
            if (prod.is_zero()) return;
            prod = prod * graft_onto_tree(ts[i], parts[i]);
        }
        out += prod;
    });
    return out;
}

inline ForestSeries grafting(const ForestSeries& x, const ForestSeries& y) {
    ForestSeries out;
    for (const auto& [fx, cx] : x.terms())
        for (const auto& [fy, cy] : y.terms()) out += (cx * cy) * grafting(fx, fy);
    return out;
}

// Grossman-Larson style product at the level of zeta indices:
// zeta_hbar * zeta_h = zeta_{(h <- hbar_(1)) hbar_(2)}. One extra slot keeps
// the part of hbar that is multiplied, not grafted.
inline ForestSeries star_zeta(const Forest& hbar, const Forest& h) {
    const auto& ts = h.trees();
    const int n = static_cast<int>(ts.size());
    ForestSeries out;
    for_each_tree_split(hbar, n + 1, [&](const std::vector<Forest>& parts) {
        ForestSeries prod(parts[n]);  // leftover factor
        for (int i = 0; i < n; ++i) {
            if (prod.is_zero()) return;
            prod = prod * graft_onto_tree(ts[i], parts[i]);
        }
        out += prod;
    });
    return out;
}

inline ForestSeries star_zeta(const ForestSeries& xbar, const ForestSeries& x) {
    ForestSeries out;
    for (const auto& [fb, cb] : xbar.terms())
        for (const auto& [f, c] : x.terms()) out += (cb * c) * star_zeta(fb, f);
    return out;
}

// ----------------------------------------------------------------------------
// natural growth

// h T h': graft h onto every node of h', normalized by |h'|.
inline ForestSeries natural_growth(const Forest& h, const Forest& hp) {
    if (hp.empty()) throw std::invalid_argument("natural_growth: right factor has empty-forest term");
    ForestSeries out;
    const auto& ts = hp.trees();
    // node v of tree i: graft all of h there
    for (std::size_t i = 0; i < ts.size(); ++i) {
        for (int v = 0; v < ts[i].degree(); ++v) {
            std::vector<std::vector<Tree>> extras(ts[i].degree());
            extras[v] = h.trees();
            int cursor = 0;
            std::vector<Tree> forest_trees;
            for (std::size_t j = 0; j < ts.size(); ++j) {
                if (j == i)
                    forest_trees.push_back(detail::attach_extras(ts[i], extras, cursor));
                else
                    forest_trees.push_back(ts[j]);
            }
            out.add(Forest(std::move(forest_trees)), Rational(1));
        }
    }
    return Rational(1, hp.degree()) * out;
}

inline ForestSeries natural_growth(const ForestSeries& x, const ForestSeries& y) {
    ForestSeries out;
    for (const auto& [fy, cy] : y.terms()) {
        if (fy.empty())
            throw std::invalid_argument("natural_growth: right factor has empty-forest term");
        for (const auto& [fx, cx] : x.terms()) out += (cx * cy) * natural_growth(fx, fy);
    }
    return out;
}

// T(h1,...,hn) = ((h1 T h2) T h3) ... T hn, left-nested.
inline ForestSeries top_word(const std::vector<ForestSeries>& hs) {
    if (hs.empty()) throw std::invalid_argument("top_word: empty word");
    ForestSeries acc = hs.front();
    for (std::size_t i = 1; i < hs.size(); ++i) acc = natural_growth(acc, hs[i]);
    return acc;
}

// ----------------------------------------------------------------------------
// iterated coproducts (left iteration) and pairing helpers

inline std::vector<std::pair<std::vector<Forest>, Rational>> iterated_coproduct(const Forest& h,
                                                                                int parts) {
    std::vector<std::pair<std::vector<Forest>, Rational>> acc{{{h}, Rational(1)}};
    for (int step = 1; step < parts; ++step) {
        std::vector<std::pair<std::vector<Forest>, Rational>> next;
        for (const auto& [fs, c] : acc) {
            // expand the first slot (left iteration (Delta (x) id ... ) Delta)
            for (const auto& [k, ck] : coproduct(fs.front()).terms()) {
                std::vector<Forest> row{k.first, k.second};
                row.insert(row.end(), fs.begin() + 1, fs.end());
                next.emplace_back(std::move(row), c * ck);
            }
        }
        acc = std::move(next);
    }
    return acc;
}

// <x, series>: evaluate the dual series x (delta basis) against a primal series.
inline Rational pair_series(const ForestSeries& x, const ForestSeries& z) {
    Rational acc(0);
    for (const auto& [f, c] : x.terms()) acc += c * z.coeff(f);
    return acc;
}

}  // namespace brp
