#pragma once

// Sparse linear combinations of forests (and of forest pairs, for Sweedler
// sums) with exact rational coefficients. Zero coefficients are never stored,
// terms are kept in canonical forest order, so printing is deterministic.
//
// A ForestSeries does double duty: it represents elements of the Hopf algebra
// and, via h -> delta_h, dual elements (forest series in the paper's sense).
// Which basis a dual series is expressed in (delta or zeta) is carried by the
// caller; conversion is scaling by symmetry factors.

#include <map>
#include <string>
#include <utility>

#include "brp/forest.hpp"
#include "brp/rational.hpp"

namespace brp {

class ForestSeries {
public:
    using Terms = std::map<Forest, Rational>;

    ForestSeries() = default;
    explicit ForestSeries(const Forest& f, Rational c = Rational(1)) { add(f, std::move(c)); }

    static ForestSeries unit() { return ForestSeries(Forest()); }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    Rational coeff(const Forest& f) const {
        auto it = terms_.find(f);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    void add(const Forest& f, const Rational& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.emplace(f, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    ForestSeries& operator+=(const ForestSeries& o) {
        for (const auto& [f, c] : o.terms_) add(f, c);
        return *this;
    }
    ForestSeries& operator-=(const ForestSeries& o) {
        for (const auto& [f, c] : o.terms_) add(f, -c);
        return *this;
    }
    friend ForestSeries operator+(ForestSeries a, const ForestSeries& b) { return a += b; }
    friend ForestSeries operator-(ForestSeries a, const ForestSeries& b) { return a -= b; }
    friend ForestSeries operator*(const Rational& c, const ForestSeries& s) {
        ForestSeries r;
        if (c.is_zero()) return r;
        for (const auto& [f, q] : s.terms_) r.terms_.emplace(f, c * q);
        return r;
    }
    ForestSeries operator-() const { return Rational(-1) * *this; }

    // Commutative product of forests, extended bilinearly.
    friend ForestSeries operator*(const ForestSeries& a, const ForestSeries& b) {
        ForestSeries r;
        for (const auto& [fa, ca] : a.terms_)
            for (const auto& [fb, cb] : b.terms_) r.add(fa * fb, ca * cb);
        return r;
    }

    friend bool operator==(const ForestSeries& a, const ForestSeries& b) {
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const ForestSeries& a, const ForestSeries& b) { return !(a == b); }

    ForestSeries truncated(int max_degree) const {
        ForestSeries r;
        for (const auto& [f, c] : terms_)
            if (f.degree() <= max_degree) r.terms_.emplace(f, c);
        return r;
    }

    // Degree-n homogeneous part.
    ForestSeries homogeneous(int n) const {
        ForestSeries r;
        for (const auto& [f, c] : terms_)
            if (f.degree() == n) r.terms_.emplace(f, c);
        return r;
    }

    std::string to_string(int alphabet_size) const {
        if (terms_.empty()) return "0";
        std::string s;
        bool first = true;
        for (const auto& [f, c] : terms_) {
            Rational a = c;
            if (first) {
                if (a.sign() < 0) {
                    s += "-";
                    a = -a;
                }
            } else {
                s += a.sign() < 0 ? " - " : " + ";
                if (a.sign() < 0) a = -a;
            }
            if (!(a == Rational(1))) s += a.to_string() + "*";
            s += to_literal(f, alphabet_size);
            first = false;
        }
        return s;
    }

private:
    Terms terms_;
};

class TensorSeries {
public:
    using Key = std::pair<Forest, Forest>;
    using Terms = std::map<Key, Rational>;

    TensorSeries() = default;

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    Rational coeff(const Forest& l, const Forest& r) const {
        auto it = terms_.find({l, r});
        return it == terms_.end() ? Rational(0) : it->second;
    }

    void add(const Forest& l, const Forest& r, const Rational& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.emplace(Key{l, r}, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    TensorSeries& operator+=(const TensorSeries& o) {
        for (const auto& [k, c] : o.terms_) add(k.first, k.second, c);
        return *this;
    }
    TensorSeries& operator-=(const TensorSeries& o) {
        for (const auto& [k, c] : o.terms_) add(k.first, k.second, -c);
        return *this;
    }
    friend TensorSeries operator+(TensorSeries a, const TensorSeries& b) { return a += b; }
    friend TensorSeries operator-(TensorSeries a, const TensorSeries& b) { return a -= b; }

    // Componentwise product in H (x) H: (a (x) b)(c (x) d) = ac (x) bd.
    friend TensorSeries operator*(const TensorSeries& a, const TensorSeries& b) {
        TensorSeries r;
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_)
                r.add(ka.first * kb.first, ka.second * kb.second, ca * cb);
        return r;
    }

    friend bool operator==(const TensorSeries& a, const TensorSeries& b) {
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const TensorSeries& a, const TensorSeries& b) { return !(a == b); }

private:
    Terms terms_;
};

}  // namespace brp
