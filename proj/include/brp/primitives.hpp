#pragma once

// Primitive elements and the natural-growth basis.
//
// pi1 is Foissy's projector onto primitives,
//   pi1(h) = h - sum' h^1 T pi1(h^2),  pi1 fixes single nodes.
// Applying it to forests in canonical order and keeping a maximal linearly
// independent set (exact row reduction) gives the primitive basis P. Words
// T(p_{i_1},...,p_{i_k}) then span the full algebra; the degreewise
// change-of-basis matrices are inverted exactly over Q.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "brp/hopf.hpp"

namespace brp {

inline const ForestSeries& primitive_projector(const Forest& h) {
    if (h.empty()) throw std::invalid_argument("primitive_projector: empty forest");
    auto& cache = detail::hopf_cache();
    std::lock_guard<std::recursive_mutex> lock(cache.mu);
    auto it = cache.pi1.find(h);
    if (it != cache.pi1.end()) return it->second;

    ForestSeries out(h);
    const TensorSeries red = reduced_coproduct(h);
    for (const auto& [k, c] : red.terms()) {
        const ForestSeries& inner = primitive_projector(k.second);
        if (!inner.is_zero()) out -= c * natural_growth(ForestSeries(k.first), inner);
    }
    return cache.pi1.emplace(h, std::move(out)).first->second;
}

inline ForestSeries primitive_projector(const ForestSeries& x) {
    ForestSeries out;
    for (const auto& [f, c] : x.terms()) out += c * primitive_projector(f);
    return out;
}

namespace detail {

using RatMatrix = std::vector<std::vector<Rational>>;

// Gauss-Jordan inverse over Q; throws if the matrix is singular.
inline RatMatrix invert(RatMatrix m, const std::string& what) {
    const std::size_t n = m.size();
    RatMatrix inv(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = Rational(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && m[piv][col].is_zero()) ++piv;
        if (piv == n) throw std::runtime_error(what + ": singular change-of-basis matrix");
        std::swap(m[piv], m[col]);
        std::swap(inv[piv], inv[col]);
        Rational d = m[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            m[col][j] /= d;
            inv[col][j] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || m[r][col].is_zero()) continue;
            Rational f = m[r][col];
            for (std::size_t j = 0; j < n; ++j) {
                m[r][j] -= f * m[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

}  // namespace detail

struct TopWord {
    std::vector<int> indices;  // 0-based positions into the primitive list
    int degree = 0;
    ForestSeries element;  // T(p_{i_1},...,p_{i_k}) expanded in the forest basis
    ForestSeries dual;     // rho^* = sum_h c_rho(h) h, as a delta-basis dual series
};

class PrimitiveBasis {
public:
    static PrimitiveBasis build(int alphabet, int N, int degree_cap = kDefaultDegreeCap) {
        if (N > degree_cap) throw std::invalid_argument("PrimitiveBasis: degree above safety cap");
        PrimitiveBasis b;
        b.alphabet_ = alphabet;
        b.N_ = N;
        b.extract_primitives();
        b.build_words();
        b.invert_degreewise();
        return b;
    }

    int alphabet() const { return alphabet_; }
    int max_degree() const { return N_; }

    const std::vector<ForestSeries>& primitives() const { return primitives_; }
    int primitive_degree(int i) const { return prim_degree_[i]; }
    const std::vector<int>& primitives_of_degree(int n) const { return prims_by_degree_[n]; }

    const std::vector<TopWord>& words() const { return words_; }
    const std::vector<int>& words_of_degree(int n) const { return words_by_degree_[n]; }

    // c_rho(h) for rho = words_[w].
    Rational change_of_basis(int w, const Forest& h) const { return words_[w].dual.coeff(h); }

    const TopWord* find_word(const std::vector<int>& indices) const {
        for (const auto& word : words_)
            if (word.indices == indices) return &word;
        return nullptr;
    }

private:
    int alphabet_ = 1;
    int N_ = 0;
    std::vector<ForestSeries> primitives_;
    std::vector<int> prim_degree_;
    std::vector<std::vector<int>> prims_by_degree_;  // [degree] -> primitive indices
    std::vector<TopWord> words_;
    std::vector<std::vector<int>> words_by_degree_;  // [degree] -> word indices

    void extract_primitives() {
        prims_by_degree_.assign(N_ + 1, {});
        for (int n = 1; n <= N_; ++n) {
            const auto& forests = forests_of_degree(n, alphabet_);
            std::map<Forest, std::size_t> col;
            for (const Forest& f : forests) col.emplace(f, col.size());
            std::vector<std::vector<Rational>> echelon;  // reduced rows, n-homogeneous
            for (const Forest& h : forests) {
                const ForestSeries& p = primitive_projector(h);
                if (p.is_zero()) continue;
                std::vector<Rational> row(forests.size(), Rational(0));
                for (const auto& [f, c] : p.terms()) row[col.at(f)] = c;
                for (const auto& er : echelon) {
                    std::size_t lead = 0;
                    while (er[lead].is_zero()) ++lead;
                    if (!row[lead].is_zero()) {
                        Rational f = row[lead] / er[lead];
                        for (std::size_t j = lead; j < row.size(); ++j) row[j] -= f * er[j];
                    }
                }
                bool zero = true;
                for (const auto& c : row)
                    if (!c.is_zero()) {
                        zero = false;
                        break;
                    }
                if (zero) continue;
                echelon.push_back(row);
                prims_by_degree_[n].push_back(static_cast<int>(primitives_.size()));
                primitives_.push_back(p);
                prim_degree_.push_back(n);
            }
        }
    }

    void build_words() {
        words_by_degree_.assign(N_ + 1, {});
        std::vector<int> indices;
        rec_words(indices, 0);
        // group by degree preserving generation (lexicographic) order
        for (std::size_t w = 0; w < words_.size(); ++w)
            words_by_degree_[words_[w].degree].push_back(static_cast<int>(w));
    }

    void rec_words(std::vector<int>& indices, int degree) {
        if (!indices.empty()) {
            TopWord word;
            word.indices = indices;
            word.degree = degree;
            std::vector<ForestSeries> parts;
            for (int i : indices) parts.push_back(primitives_[i]);
            word.element = top_word(parts);
            words_.push_back(std::move(word));
        }
        for (std::size_t i = 0; i < primitives_.size(); ++i) {
            int d = degree + prim_degree_[i];
            if (d > N_) continue;
            indices.push_back(static_cast<int>(i));
            rec_words(indices, d);
            indices.pop_back();
        }
    }

    void invert_degreewise() {
        for (int n = 1; n <= N_; ++n) {
            const auto& forests = forests_of_degree(n, alphabet_);
            const auto& widx = words_by_degree_[n];
            if (widx.size() != forests.size())
                throw std::runtime_error("PrimitiveBasis: word count mismatch at degree " +
                                         std::to_string(n));
            std::map<Forest, std::size_t> col;
            for (const Forest& f : forests) col.emplace(f, col.size());
            detail::RatMatrix m(widx.size(), std::vector<Rational>(forests.size(), Rational(0)));
            for (std::size_t w = 0; w < widx.size(); ++w)
                for (const auto& [f, c] : words_[widx[w]].element.terms()) m[w][col.at(f)] = c;
            detail::RatMatrix inv = detail::invert(std::move(m), "PrimitiveBasis degree " +
                                                                     std::to_string(n));
            // h_j = sum_w inv[j][w] * word_w, so rho^* = sum_j inv[j][w] h_j.
            for (std::size_t w = 0; w < widx.size(); ++w) {
                ForestSeries dual;
                for (std::size_t j = 0; j < forests.size(); ++j) dual.add(forests[j], inv[j][w]);
                words_[widx[w]].dual = std::move(dual);
            }
        }
    }
};

}  // namespace brp
