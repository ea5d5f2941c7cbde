#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "brp/rational.hpp"

using brp::BigInt;
using brp::Rational;

TEST_CASE("BigInt arithmetic agrees with int64 on small operands") {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<std::int64_t> dist(-1000000000ll, 1000000000ll);
    for (int i = 0; i < 2000; ++i) {
        std::int64_t a = dist(rng), b = dist(rng);
        CHECK((BigInt(a) + BigInt(b)).to_int64() == a + b);
        CHECK((BigInt(a) - BigInt(b)).to_int64() == a - b);
        CHECK((BigInt(a) * BigInt(b)).to_int64() == a * b);  // |ab| <= 1e18 fits
        CHECK(BigInt::cmp(BigInt(a), BigInt(b)) == (a < b ? -1 : a == b ? 0 : 1));
        CHECK(BigInt::parse(std::to_string(a)) == BigInt(a));
        CHECK(BigInt(a).to_string() == std::to_string(a));
    }
}

TEST_CASE("BigInt multiplication and divmod against int64 oracle") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::int64_t> dist(-2000000000ll, 2000000000ll);
    for (int i = 0; i < 2000; ++i) {
        std::int64_t a = dist(rng), b = dist(rng);
        __int128 p = static_cast<__int128>(a) * b;
        BigInt bp = BigInt(a) * BigInt(b);
        // compare via string of the 128-bit product
        bool neg = p < 0;
        unsigned __int128 up = neg ? -static_cast<unsigned __int128>(p) : p;
        std::string s;
        if (up == 0) s = "0";
        while (up) {
            s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(up % 10)));
            up /= 10;
        }
        if (neg && s != "0") s.insert(s.begin(), '-');
        CHECK(bp.to_string() == s);

        if (b != 0) {
            BigInt q, r;
            BigInt::divmod(BigInt(a), BigInt(b), q, r);
            CHECK(q.to_int64() == a / b);
            CHECK(r.to_int64() == a % b);
            CHECK(q * BigInt(b) + r == BigInt(a));
        }
    }
}

TEST_CASE("BigInt handles multi-limb values") {
    BigInt f(1);
    for (int k = 2; k <= 30; ++k) f = f * BigInt(k);
    CHECK(f.to_string() == "265252859812191058636308480000000");
    CHECK(BigInt::parse("265252859812191058636308480000000") == f);
    BigInt q, r;
    BigInt::divmod(f, BigInt::parse("982451653"), q, r);
    CHECK(q * BigInt::parse("982451653") + r == f);
    CHECK(BigInt::gcd(f, BigInt(1) - BigInt(1)).to_string() == f.to_string());
    CHECK(BigInt::gcd(BigInt(0), BigInt(-6)).to_int64() == 6);
}

TEST_CASE("Rational normalization, arithmetic, parsing") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(2, -4) == Rational(-1, 2));
    CHECK(Rational(0, 5) == Rational(0));
    CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
    CHECK((Rational(1, 3) - Rational(1, 3)).is_zero());
    CHECK((Rational(3, 4) * Rational(2, 9)) == Rational(1, 6));
    CHECK((Rational(3, 4) / Rational(9, 2)) == Rational(1, 6));
    CHECK(Rational::parse("-7/21") == Rational(-1, 3));
    CHECK(Rational::parse("5") == Rational(5));
    CHECK(Rational(-1, 3).to_string() == "-1/3");
    CHECK(Rational(4).to_string() == "4");
    CHECK(Rational(1, 2).to_double() == doctest::Approx(0.5));
    CHECK_THROWS(Rational(1, 0));
}

TEST_CASE("Rational field axioms on random values") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::int64_t> dist(-50, 50);
    for (int i = 0; i < 500; ++i) {
        std::int64_t pn = dist(rng), qn = dist(rng), rn = dist(rng);
        Rational p(pn, 7), q(qn, 11), r(rn, 13);
        CHECK((p + q) * r == p * r + q * r);
        CHECK(p + (q + r) == (p + q) + r);
        CHECK(p * (q * r) == (p * q) * r);
        if (!q.is_zero()) CHECK(p / q * q == p);
    }
}
