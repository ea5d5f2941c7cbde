#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "brp/primitives.hpp"
#include "test_util.hpp"

using namespace brp;
using namespace brp::testing;

TEST_CASE("pi1 tables, levels 1-4") {
    CHECK(primitive_projector(F("[]")) == lc({{1, "[]"}}));
    CHECK(primitive_projector(F("[][]")) == lc({{1, "[][]"}, {-2, "[[]]"}}));
    CHECK(primitive_projector(F("[][][]")) ==
          lc({{1, "[][][]"}, {-3, "[][[]]"}, {3, "[[[]]]"}}));
    CHECK(primitive_projector(F("[][][][]")) ==
          lc({{1, "[][][][]"},
              {-4, "[][][[]]"},
              {4, "[][[[]]]"},
              {-4, "[[[[]]]]"},
              {4, "[[]][[]]"},
              {2, "[[][][]]"},
              {-4, "[[][[]]]"},
              {2, "[[[][]]]"},
              {-2, "[][[][]]"}}));
    CHECK(primitive_projector(F("[][][[]]")) ==
          lc({{1, "[[][][]]"},
              {1, "[[]][[]]"},
              {-2, "[[][[]]]"},
              {1, "[[[][]]]"},
              {-1, "[][[][]]"}}));
}

TEST_CASE("pi1 lands in the primitives and kills top-word complements") {
    for (const Forest& h : enumerate_forests(4, 1)) {
        if (h.empty()) continue;
        const ForestSeries& p = primitive_projector(h);
        if (p.is_zero()) continue;
        TensorSeries red;
        for (const auto& [f, c] : p.terms()) {
            if (f.degree() == 1) continue;  // single nodes are primitive
            const TensorSeries rf = reduced_coproduct(f);
            for (const auto& [k, ck] : rf.terms()) red.add(k.first, k.second, c * ck);
        }
        CHECK(red.is_zero());
    }
    // trees of degree >= 2 project to zero in the undecorated case
    CHECK(primitive_projector(F("[[]]")).is_zero());
    CHECK(primitive_projector(F("[[][]]")).is_zero());
    CHECK(primitive_projector(F("[[[]]]")).is_zero());
}

TEST_CASE("primitive basis, single label, N = 4") {
    PrimitiveBasis b = PrimitiveBasis::build(1, 4);
    REQUIRE(b.primitives().size() == 5);
    CHECK(b.primitives_of_degree(1).size() == 1);
    CHECK(b.primitives_of_degree(2).size() == 1);
    CHECK(b.primitives_of_degree(3).size() == 1);
    CHECK(b.primitives_of_degree(4).size() == 2);
    // the pivots are pi1 of the first forests in canonical order
    CHECK(b.primitives()[0] == primitive_projector(F("[]")));
    CHECK(b.primitives()[1] == primitive_projector(F("[][]")));
    CHECK(b.primitives()[2] == primitive_projector(F("[][][]")));
    CHECK(b.primitives()[3] == primitive_projector(F("[][][][]")));
    CHECK(b.primitives()[4] == primitive_projector(F("[][][[]]")));

    // every p in P satisfies Delta' p = 0, exactly
    for (const ForestSeries& p : b.primitives()) {
        TensorSeries red;
        for (const auto& [f, c] : p.terms()) {
            const TensorSeries rf = reduced_coproduct(f);
            for (const auto& [k, ck] : rf.terms()) red.add(k.first, k.second, c * ck);
        }
        CHECK(red.is_zero());
    }

    // |P^T| per degree equals the forest dimension: 1 + 2 + 4 + 9 = 16
    std::size_t total = 0;
    for (int n = 1; n <= 4; ++n) {
        CHECK(b.words_of_degree(n).size() == forests_of_degree(n, 1).size());
        total += b.words_of_degree(n).size();
    }
    CHECK(total == 16);
}

TEST_CASE("appendix top-basis completion tables, levels 2-4") {
    PrimitiveBasis b = PrimitiveBasis::build(1, 4);
    auto word = [&](std::initializer_list<int> idx) {
        const TopWord* w = b.find_word(std::vector<int>(idx));
        REQUIRE(w != nullptr);
        return w->element;
    };
    // level 2
    CHECK(word({0, 0}) == lc({{1, "[[]]"}}));
    // level 3
    CHECK(word({0, 0, 0}) == lc({{1, "[[[]]]"}}));
    CHECK(word({1, 0}) == lc({{1, "[[][]]"}, {-2, "[[[]]]"}}));
    CHECK(word({0, 1}) == lc({{1, "[][[]]"}, {-1, "[[[]]]"}, {-1, "[[][]]"}}));
    // level 4
    CHECK(word({0, 0, 1}) == lc({{1, "[][[[]]]"}, {-1, "[[[[]]]]"}, {-1, "[[][[]]]"}}));
    CHECK(word({0, 1, 0}) == lc({{1, "[[][[]]]"}, {-1, "[[[[]]]]"}, {-1, "[[[][]]]"}}));
    CHECK(word({1, 0, 0}) == lc({{1, "[[[][]]]"}, {-2, "[[[[]]]]"}}));
    CHECK(word({1, 1}) == lc({{1, "[][[][]]"},
                              {-1, "[[[][]]]"},
                              {-1, "[[][][]]"},
                              {-2, "[][[[]]]"},
                              {2, "[[[[]]]]"},
                              {2, "[[][[]]]"}}));
    CHECK(word({2, 0}) == lc({{1, "[[][][]]"}, {-3, "[[][[]]]"}, {3, "[[[[]]]]"}}));
    CHECK(word({0, 2}) == lc({{1, "[][][[]]"},
                              {-1, "[[]][[]]"},
                              {-1, "[][[[]]]"},
                              {-1, "[][[][]]"},
                              {1, "[[[[]]]]"},
                              {1, "[[[][]]]"},
                              {1, "[[][[]]]"}}));
    CHECK(word({0, 0, 0, 0}) == lc({{1, "[[[[]]]]"}}));
}

TEST_CASE("duals are orthonormal against the top words") {
    for (int labels : {1, 2}) {
        int N = labels == 1 ? 4 : 3;
        PrimitiveBasis b = PrimitiveBasis::build(labels, N);
        for (const TopWord& w : b.words())
            for (const TopWord& v : b.words()) {
                if (w.degree != v.degree) continue;  // graded pairing
                Rational got = pair_series(w.dual, v.element);
                CHECK(got == (w.indices == v.indices ? Rational(1) : Rational(0)));
            }
    }
}

TEST_CASE("change of basis reconstructs every forest") {
    PrimitiveBasis b = PrimitiveBasis::build(1, 4);
    for (int n = 1; n <= 4; ++n)
        for (const Forest& h : forests_of_degree(n, 1)) {
            ForestSeries rebuilt;
            for (int w : b.words_of_degree(n))
                rebuilt += b.change_of_basis(w, h) * b.words()[w].element;
            CHECK(rebuilt == ForestSeries(h));
        }
}

TEST_CASE("Foissy telescoping of reduced coproducts on primitive words") {
    PrimitiveBasis b = PrimitiveBasis::build(1, 4);
    for (const TopWord& w : b.words()) {
        if (w.degree > 4) continue;
        TensorSeries lhs;
        for (const auto& [f, c] : w.element.terms()) {
            if (f.degree() == 1) continue;
            const TensorSeries rf = reduced_coproduct(f);
            for (const auto& [k, ck] : rf.terms())
                lhs.add(k.first, k.second, c * ck);
        }
        TensorSeries rhs;
        const auto& idx = w.indices;
        for (std::size_t j = 1; j < idx.size(); ++j) {
            std::vector<ForestSeries> left, right;
            for (std::size_t i = 0; i < j; ++i) left.push_back(b.primitives()[idx[i]]);
            for (std::size_t i = j; i < idx.size(); ++i) right.push_back(b.primitives()[idx[i]]);
            ForestSeries lw = top_word(left), rw = top_word(right);
            for (const auto& [lf, lcf] : lw.terms())
                for (const auto& [rf, rcf] : rw.terms()) rhs.add(lf, rf, lcf * rcf);
        }
        CHECK(lhs == rhs);
    }
}

TEST_CASE("two-label basis is square and well-formed") {
    PrimitiveBasis b = PrimitiveBasis::build(2, 3);
    CHECK(b.primitives_of_degree(1).size() == 2);
    CHECK(b.primitives_of_degree(2).size() == 3);
    for (int n = 1; n <= 3; ++n)
        CHECK(b.words_of_degree(n).size() == forests_of_degree(n, 2).size());
}
