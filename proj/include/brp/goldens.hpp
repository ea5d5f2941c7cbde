#pragma once

// Embedded reference tables in the forest-literal text format, and the exact
// checks against them. Used by the CLI's --golden mode and the acceptance
// suite; every comparison is exact rational equality via the canonical
// printer.

#include <string>
#include <vector>

#include "brp/primitives.hpp"

namespace brp::goldens {

inline std::string zeta_string(const ForestSeries& s, int labels) {
    if (s.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [f, c] : s.terms()) {
        Rational a = c;
        if (first) {
            if (a.sign() < 0) {
                out += "-";
                a = -a;
            }
        } else {
            out += a.sign() < 0 ? " - " : " + ";
            if (a.sign() < 0) a = -a;
        }
        if (!(a == Rational(1))) out += a.to_string() + "*";
        out += "z(" + to_literal(f, labels) + ")";
        first = false;
    }
    return out;
}

struct StarGolden {
    const char* left;
    const char* right;
    bool zeta;
    int labels;
    const char* expect;
};

inline const std::vector<StarGolden>& star_products() {
    static const std::vector<StarGolden> table = {
        {"[]", "[]", true, 1, "z([][]) + z([[]])"},
        {"[][]", "[]", true, 1, "z([][][]) + 2*z([][[]]) + z([[][]])"},
        {"[]", "[][]", true, 1, "z([][][]) + 2*z([][[]])"},
        {"[[]]", "[]", true, 1, "z([][[]]) + z([[[]]])"},
        {"[]", "[[]]", true, 1, "z([][[]]) + z([[][]]) + z([[[]]])"},
        {"[]", "[]", false, 1, "2*[][] + [[]]"},
        {"[][]", "[]", false, 1, "3*[][][] + [][[]] + [[][]]"},
        {"[a]", "[b]", false, 2, "[a][b] + [b[a]]"},
        {"[a]", "[a]", false, 2, "2*[a][a] + [a[a]]"},
    };
    return table;
}

struct Pi1Golden {
    const char* input;
    const char* expect;
};

inline const std::vector<Pi1Golden>& pi1_table() {
    static const std::vector<Pi1Golden> table = {
        {"[]", "[]"},
        {"[][]", "[][] - 2*[[]]"},
        {"[][][]", "[][][] - 3*[][[]] + 3*[[[]]]"},
        {"[][][][]",
         "[][][][] - 4*[][][[]] - 2*[][[][]] + 4*[][[[]]] + 4*[[]][[]] + 2*[[][][]] - "
         "4*[[][[]]] + 2*[[[][]]] - 4*[[[[]]]]"},
        {"[][][[]]", "-[][[][]] + [[]][[]] + [[][][]] - 2*[[][[]]] + [[[][]]]"},
    };
    return table;
}

struct TopGolden {
    std::vector<int> indices;  // 0-based positions in the primitive list
    const char* expect;
};

inline const std::vector<TopGolden>& top_completion_table() {
    static const std::vector<TopGolden> table = {
        {{0, 0}, "[[]]"},
        {{0, 0, 0}, "[[[]]]"},
        {{1, 0}, "[[][]] - 2*[[[]]]"},
        {{0, 1}, "[][[]] - [[][]] - [[[]]]"},
        {{0, 0, 1}, "[][[[]]] - [[][[]]] - [[[[]]]]"},
        {{0, 1, 0}, "[[][[]]] - [[[][]]] - [[[[]]]]"},
        {{1, 0, 0}, "[[[][]]] - 2*[[[[]]]]"},
        {{1, 1}, "[][[][]] - 2*[][[[]]] - [[][][]] + 2*[[][[]]] - [[[][]]] + 2*[[[[]]]]"},
        {{2, 0}, "[[][][]] - 3*[[][[]]] + 3*[[[[]]]]"},
        {{0, 2}, "[][][[]] - [][[][]] - [][[[]]] - [[]][[]] + [[][[]]] + [[[][]]] + [[[[]]]]"},
        {{0, 0, 0, 0}, "[[[[]]]]"},
    };
    return table;
}

struct GoldenReport {
    int matched = 0;
    int total = 0;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty() && matched == total; }
};

inline GoldenReport check_star_products() {
    GoldenReport r;
    for (const StarGolden& g : star_products()) {
        ++r.total;
        Forest left = parse_forest(g.left), right = parse_forest(g.right);
        std::string got;
        if (g.zeta) {
            got = zeta_string(star_zeta(left, right), g.labels);
        } else {
            int cutoff = left.degree() + right.degree();
            got = convolution(ForestSeries(left), ForestSeries(right), cutoff, g.labels)
                      .to_string(g.labels);
        }
        if (got == g.expect)
            ++r.matched;
        else
            r.failures.push_back(std::string(g.left) + " * " + g.right + ": got " + got +
                                 ", expected " + g.expect);
    }
    return r;
}

inline GoldenReport check_pi1_table() {
    GoldenReport r;
    for (const Pi1Golden& g : pi1_table()) {
        ++r.total;
        std::string got = primitive_projector(parse_forest(g.input)).to_string(1);
        if (got == g.expect)
            ++r.matched;
        else
            r.failures.push_back(std::string("pi1(") + g.input + "): got " + got + ", expected " +
                                 g.expect);
    }
    return r;
}

inline GoldenReport check_primitive_dimensions(const PrimitiveBasis& basis) {
    GoldenReport r;
    const int expect[] = {1, 1, 1, 2};
    for (int n = 1; n <= 4; ++n) {
        ++r.total;
        int got = static_cast<int>(basis.primitives_of_degree(n).size());
        if (got == expect[n - 1])
            ++r.matched;
        else
            r.failures.push_back("primitive dimension at degree " + std::to_string(n) + ": got " +
                                 std::to_string(got) + ", expected " +
                                 std::to_string(expect[n - 1]));
    }
    return r;
}

inline GoldenReport check_top_completion(const PrimitiveBasis& basis) {
    GoldenReport r;
    for (const TopGolden& g : top_completion_table()) {
        ++r.total;
        const TopWord* w = basis.find_word(g.indices);
        if (!w) {
            r.failures.push_back("missing top word");
            continue;
        }
        std::string got = w->element.to_string(1);
        if (got == g.expect)
            ++r.matched;
        else
            r.failures.push_back("top word: got " + got + ", expected " + g.expect);
    }
    return r;
}

}  // namespace brp::goldens
