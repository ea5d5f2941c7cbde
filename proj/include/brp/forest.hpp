#pragma once

// Decorated rooted trees and forests in canonical form.
//
// Children of a node and the trees of a forest are kept sorted by a fixed
// total order (degree, then label, then children lexicographically), so
// structural equality, ordering and hashing are all decidable and stable.
// The canonical order is also the enumeration and printing order used by
// every table in this library.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace brp {

inline constexpr int kDefaultDegreeCap = 8;

class Tree {
public:
    Tree(int label, std::vector<Tree> children) : label_(label), children_(std::move(children)) {
        std::sort(children_.begin(), children_.end());
        size_ = 1;
        for (const Tree& c : children_) size_ += c.size_;
    }
    explicit Tree(int label) : Tree(label, {}) {}

    int label() const { return label_; }
    const std::vector<Tree>& children() const { return children_; }
    int degree() const { return size_; }

    friend bool operator==(const Tree& a, const Tree& b) {
        return a.size_ == b.size_ && a.label_ == b.label_ && a.children_ == b.children_;
    }
    friend bool operator!=(const Tree& a, const Tree& b) { return !(a == b); }
    friend bool operator<(const Tree& a, const Tree& b) {
        if (a.size_ != b.size_) return a.size_ < b.size_;
        if (a.label_ != b.label_) return a.label_ < b.label_;
        return std::lexicographical_compare(a.children_.begin(), a.children_.end(),
                                            b.children_.begin(), b.children_.end());
    }

private:
    int label_;
    std::vector<Tree> children_;
    int size_;
};

class Forest {
public:
    Forest() = default;
    explicit Forest(std::vector<Tree> trees) : trees_(std::move(trees)) {
        std::sort(trees_.begin(), trees_.end());
        for (const Tree& t : trees_) degree_ += t.degree();
    }
    explicit Forest(Tree t) : Forest(std::vector<Tree>{std::move(t)}) {}

    const std::vector<Tree>& trees() const { return trees_; }
    int degree() const { return degree_; }
    bool empty() const { return trees_.empty(); }
    bool is_tree() const { return trees_.size() == 1; }

    friend bool operator==(const Forest& a, const Forest& b) { return a.trees_ == b.trees_; }
    friend bool operator!=(const Forest& a, const Forest& b) { return !(a == b); }
    friend bool operator<(const Forest& a, const Forest& b) {
        if (a.degree_ != b.degree_) return a.degree_ < b.degree_;
        return std::lexicographical_compare(a.trees_.begin(), a.trees_.end(),
                                            b.trees_.begin(), b.trees_.end());
    }

    // Commutative forest product: multiset union.
    friend Forest operator*(const Forest& a, const Forest& b) {
        std::vector<Tree> ts = a.trees_;
        ts.insert(ts.end(), b.trees_.begin(), b.trees_.end());
        return Forest(std::move(ts));
    }

private:
    std::vector<Tree> trees_;
    int degree_ = 0;
};

// [h]_a : graft all trees of h onto a new root labeled a.
inline Tree graft_root(const Forest& h, int label) { return Tree(label, h.trees()); }

// ----------------------------------------------------------------------------
// literals
//
// tree   := '[' label? tree* ']'        label is a single lower-case letter
// forest := tree* (optionally whitespace separated) | '1'
//
// With a single-letter alphabet the label is omitted on output.

inline char label_char(int label) {
    if (label < 0 || label > 25) throw std::out_of_range("label out of range for literal");
    return static_cast<char>('a' + label);
}

inline std::string to_literal(const Tree& t, int alphabet_size) {
    std::string s = "[";
    if (alphabet_size > 1) s += label_char(t.label());
    for (const Tree& c : t.children()) s += to_literal(c, alphabet_size);
    s += "]";
    return s;
}

inline std::string to_literal(const Forest& f, int alphabet_size) {
    if (f.empty()) return "1";
    std::string s;
    for (const Tree& t : f.trees()) s += to_literal(t, alphabet_size);
    return s;
}

namespace detail {
struct LiteralParser {
    std::string_view s;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw std::invalid_argument("forest literal, position " + std::to_string(pos) + ": " + msg);
    }
    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    Tree parse_tree() {
        if (pos >= s.size() || s[pos] != '[') fail("expected '['");
        ++pos;
        int label = 0;
        if (pos < s.size() && s[pos] >= 'a' && s[pos] <= 'z') label = s[pos++] - 'a';
        std::vector<Tree> children;
        while (pos < s.size() && s[pos] == '[') children.push_back(parse_tree());
        if (pos >= s.size() || s[pos] != ']') fail("expected ']'");
        ++pos;
        return Tree(label, std::move(children));
    }
    Forest parse_forest() {
        skip_ws();
        if (pos < s.size() && s[pos] == '1') {
            ++pos;
            skip_ws();
            if (pos != s.size()) fail("trailing input after empty forest");
            return Forest();
        }
        std::vector<Tree> trees;
        while (pos < s.size()) {
            skip_ws();
            if (pos == s.size()) break;
            trees.push_back(parse_tree());
        }
        if (trees.empty()) fail("empty literal");
        return Forest(std::move(trees));
    }
};
}  // namespace detail

inline Forest parse_forest(std::string_view s) {
    detail::LiteralParser p{s};
    return p.parse_forest();
}

// ----------------------------------------------------------------------------
// enumeration

namespace detail {

// Enumeration memo. One recursive mutex guards the whole computation; results
// are immutable once inserted, so returning references is safe.
struct EnumCache {
    std::recursive_mutex mu;
    // (alphabet, degree) -> trees / forests of exactly that degree, canonically ordered
    std::map<std::pair<int, int>, std::vector<Tree>> trees;
    std::map<std::pair<int, int>, std::vector<Forest>> forests;
};

inline EnumCache& enum_cache() {
    static EnumCache c;
    return c;
}

inline const std::vector<Forest>& forests_of_degree_locked(int n, int alphabet);

inline const std::vector<Tree>& trees_of_degree_locked(int n, int alphabet) {
    auto& cache = enum_cache();
    auto it = cache.trees.find({alphabet, n});
    if (it != cache.trees.end()) return it->second;
    std::vector<Tree> out;
    for (const Forest& h : forests_of_degree_locked(n - 1, alphabet))
        for (int a = 0; a < alphabet; ++a) out.push_back(graft_root(h, a));
    std::sort(out.begin(), out.end());
    return cache.trees.emplace(std::make_pair(alphabet, n), std::move(out)).first->second;
}

inline const std::vector<Forest>& forests_of_degree_locked(int n, int alphabet) {
    auto& cache = enum_cache();
    auto it = cache.forests.find({alphabet, n});
    if (it != cache.forests.end()) return it->second;
    std::vector<Forest> out;
    if (n == 0) {
        out.push_back(Forest());
    } else {
        std::vector<const std::vector<Tree>*> trees_by_degree(n + 1, nullptr);
        for (int k = 1; k <= n; ++k) trees_by_degree[k] = &trees_of_degree_locked(k, alphabet);
        // Nondecreasing sequences of trees (canonical order) with total degree n.
        std::vector<Tree> current;
        std::function<void(int, int, int)> rec = [&](int remaining, int min_deg, int min_idx) {
            if (remaining == 0) {
                out.push_back(Forest(current));
                return;
            }
            for (int k = min_deg; k <= remaining; ++k) {
                const auto& ts = *trees_by_degree[k];
                for (int i = (k == min_deg ? min_idx : 0); i < static_cast<int>(ts.size()); ++i) {
                    current.push_back(ts[i]);
                    rec(remaining - k, k, i);
                    current.pop_back();
                }
            }
        };
        rec(n, 1, 0);
        std::sort(out.begin(), out.end());
    }
    return cache.forests.emplace(std::make_pair(alphabet, n), std::move(out)).first->second;
}

}  // namespace detail

// All forests of degree exactly n over labels {0..alphabet-1}, canonical order.
inline const std::vector<Forest>& forests_of_degree(int n, int alphabet,
                                                    int degree_cap = kDefaultDegreeCap) {
    if (n < 0) throw std::invalid_argument("forests_of_degree: negative degree");
    if (alphabet < 1) throw std::invalid_argument("forests_of_degree: empty alphabet");
    if (n > degree_cap) throw std::invalid_argument("forests_of_degree: degree above safety cap");
    auto& cache = detail::enum_cache();
    std::lock_guard<std::recursive_mutex> lock(cache.mu);
    return detail::forests_of_degree_locked(n, alphabet);
}

// All forests of degree <= n (including the empty forest), canonical order.
inline std::vector<Forest> enumerate_forests(int n, int alphabet,
                                             int degree_cap = kDefaultDegreeCap) {
    std::vector<Forest> out;
    for (int k = 0; k <= n; ++k) {
        const auto& fs = forests_of_degree(k, alphabet, degree_cap);
        out.insert(out.end(), fs.begin(), fs.end());
    }
    return out;
}

inline const std::vector<Tree>& trees_of_degree(int n, int alphabet,
                                                int degree_cap = kDefaultDegreeCap) {
    if (n < 1) throw std::invalid_argument("trees_of_degree: degree must be positive");
    if (alphabet < 1) throw std::invalid_argument("trees_of_degree: empty alphabet");
    if (n > degree_cap) throw std::invalid_argument("trees_of_degree: degree above safety cap");
    auto& cache = detail::enum_cache();
    std::lock_guard<std::recursive_mutex> lock(cache.mu);
    return detail::trees_of_degree_locked(n, alphabet);
}

}  // namespace brp
