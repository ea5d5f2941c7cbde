#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "brp/rde.hpp"
#include "drivers.hpp"
#include "test_util.hpp"

using namespace brp;
using namespace brp::testing;

namespace {

std::shared_ptr<const BranchedRoughPath> lift(const GridPath& p, double alpha) {
    return std::make_shared<BranchedRoughPath>(BranchedRoughPath::lift_piecewise_linear(p, alpha));
}

GridPath time_path(std::size_t n, double T) {
    GridPath p;
    for (std::size_t i = 0; i < n; ++i) {
        double t = T * static_cast<double>(i) / static_cast<double>(n - 1);
        p.times.push_back(t);
        p.values.push_back({t});
    }
    return p;
}

// 1-d field f(y) = c2 y^2 + c1 y + c0
PolyVectorField scalar_field(const Rational& c2, const Rational& c1, const Rational& c0) {
    PolyVectorField F;
    F.noise_dim = 1;
    F.state_dim = 1;
    Poly y = Poly::variable(1, 0);
    F.fields = {{c2 * (y * y) + c1 * y + Poly::constant(1, c0)}};
    return F;
}

}  // namespace

TEST_CASE("polynomial arithmetic, derivative, evaluation") {
    Poly x = Poly::variable(2, 0), y = Poly::variable(2, 1);
    Poly p = x * x * y + Rational(3) * y;  // x^2 y + 3y
    CHECK(p.derivative(0) == Rational(2) * (x * y));
    CHECK(p.derivative(1) == x * x + Poly::constant(2, Rational(3)));
    CHECK(p.eval({2.0, 5.0}) == doctest::Approx(20.0 + 15.0));
    CHECK((p - p).is_zero());
}

TEST_CASE("elementary differentials: identity, single node, ladder") {
    // f(y) = y^2 in one dimension
    ElementaryDifferentials ed(scalar_field(Rational(1), Rational(0), Rational(0)));
    Poly y = Poly::variable(1, 0);
    CHECK(ed.differential(Tree(0))[0] == y * y);                       // f_{[ ]} = f
    CHECK(ed.differential(Tree(0, {Tree(0)}))[0] ==
          Rational(2) * (y * y * y));                                  // Df.f = 2y^3
    // D^2 f : (f, f) = 2 y^4 on the cherry
    CHECK(ed.differential(Tree(0, {Tree(0), Tree(0)}))[0] == Rational(2) * (y * y * y * y));
}

TEST_CASE("grafting identity for elementary differentials") {
    // base case: Df_i . f_rho = f_{[rho]_i}
    ElementaryDifferentials ed(scalar_field(Rational(1), Rational(-2), Rational(1, 2)));
    for (int d = 1; d <= 3; ++d)
        for (const Tree& rho : trees_of_degree(d, 1))
            CHECK(check_grafting_identity(ed, Tree(0), {rho}));
    // quadratic field, tau = [[]], rho = []
    CHECK(check_grafting_identity(ed, Tree(0, {Tree(0)}), {Tree(0)}));
    // zero field: both sides vanish
    ElementaryDifferentials zed(PolyVectorField::zero(1, 1));
    CHECK(check_grafting_identity(zed, Tree(0, {Tree(0)}), {Tree(0)}));
    // two-dimensional state, two noises, mixed labels
    PolyVectorField F;
    F.noise_dim = 2;
    F.state_dim = 2;
    Poly u = Poly::variable(2, 0), v = Poly::variable(2, 1);
    F.fields = {{u * v + Poly::constant(2, Rational(1)), v * v},
                {u * u - v, Rational(2) * u}};
    ElementaryDifferentials ed2(F);
    for (int dt = 1; dt <= 2; ++dt)
        for (const Tree& tau : trees_of_degree(dt, 2))
            for (int dr = 1; dr <= 2; ++dr)
                for (const Tree& rho : trees_of_degree(dr, 2))
                    CHECK(check_grafting_identity(ed2, tau, {rho}));
    // a two-direction instance
    CHECK(check_grafting_identity(ed2, Tree(0), {Tree(1), Tree(0, {Tree(1)})}));
}

TEST_CASE("one step on dY = lambda Y dt reproduces the Taylor polynomial") {
    double lambda = 1.3, h = 0.25;
    auto X = lift(time_path(2, h), 0.3);  // single linear segment, N = 3
    RDESolver solver(X, scalar_field(Rational(0), Rational(13, 10), Rational(0)));
    auto y1 = solver.step({1.0}, 0, 1);
    double taylor = 1.0 + lambda * h + lambda * lambda * h * h / 2 +
                    lambda * lambda * lambda * h * h * h / 6;
    CHECK(y1[0] == doctest::Approx(taylor).epsilon(1e-15));
}

TEST_CASE("one step on dY = Y^2 dt reproduces the geometric expansion") {
    double h = 0.125, xi = 0.7;
    auto X = lift(time_path(2, h), 0.3);
    RDESolver solver(X, scalar_field(Rational(1), Rational(0), Rational(0)));
    auto y1 = solver.step({xi}, 0, 1);
    // exact flow xi/(1 - xi h) truncated at h^3: xi + xi^2 h + xi^3 h^2 + xi^4 h^3
    double expect = xi + xi * xi * h + std::pow(xi, 3) * h * h + std::pow(xi, 4) * h * h * h;
    CHECK(y1[0] == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("zero field freezes the state") {
    auto X = lift(oscillation_path(33, 1.0, 0.3, 3), 0.3);
    RDESolver solver(X, PolyVectorField::zero(1, 1));
    auto sol = solver.solve({2.5});
    for (const auto& y : sol.Y) CHECK(y[0] == 2.5);
}

TEST_CASE("dY = Y dX against the exponential oracle at step 1e-3") {
    std::size_t n = 1001;
    auto path = smooth_wave_path(n, 1.0);
    auto X = lift(path, 0.3);
    RDESolver solver(X, scalar_field(Rational(0), Rational(1), Rational(0)));
    double xi = 0.8;
    auto sol = solver.solve({xi});
    double dx = path.values[n - 1][0] - path.values[0][0];
    CHECK(std::abs(sol.Y[n - 1][0] - xi * std::exp(dx)) <= 1e-6);
}

TEST_CASE("two commuting noises: exponential in both coordinates") {
    std::size_t n = 501;
    auto path = smooth_wave_path(n, 1.0, 2);
    auto X = lift(path, 0.3);
    PolyVectorField F;
    F.noise_dim = 2;
    F.state_dim = 1;
    Poly y = Poly::variable(1, 0);
    F.fields = {{Rational(1, 2) * y}, {Rational(-1) * y}};
    RDESolver solver(X, F);
    auto sol = solver.solve({1.0});
    double da = path.values[n - 1][0] - path.values[0][0];
    double db = path.values[n - 1][1] - path.values[0][1];
    CHECK(std::abs(sol.Y[n - 1][0] - std::exp(0.5 * da - db)) <= 1e-6);
}

TEST_CASE("one-step order: local error fits at N+1") {
    double xi = 0.3;
    auto flow = [&](double h) { return xi / (xi + (1.0 - xi) * std::exp(-h)); };  // logistic
    PolyVectorField F = scalar_field(Rational(-1), Rational(1), Rational(0));     // y(1-y)
    std::vector<double> hs, errs;
    for (int k = 3; k <= 6; ++k) {
        double h = std::pow(2.0, -k);
        auto X = lift(time_path(2, h), 0.3);
        RDESolver solver(X, F);
        double err = std::abs(solver.step({xi}, 0, 1)[0] - flow(h));
        hs.push_back(h);
        errs.push_back(err);
    }
    auto fit = fit_loglog(hs, errs);
    CHECK(fit.slope >= 4.0 - 0.15);
}

TEST_CASE("divergence guard trips with a diagnostic") {
    auto X = lift(time_path(101, 5.0), 0.3);
    RDESolver solver(X, scalar_field(Rational(1), Rational(0), Rational(0)));
    CHECK_THROWS_AS(solver.solve({10.0}), std::runtime_error);  // dY = Y^2, blows up before t=5
}

TEST_CASE("solution lift is a controlled path") {
    double alpha = 0.3;
    PolyVectorField F = scalar_field(Rational(-1, 4), Rational(1), Rational(1, 10));

    // rough driver: finite norms
    auto Xr = lift(oscillation_path(257, 1.0, alpha, 7, 1, 0.2), alpha);
    RDESolver rough_solver(Xr, F);
    auto rough = rough_solver.solve({0.5});
    CHECK(rough.lifted[0].norm() < 1e6);
    for (std::size_t i = 0; i < rough.Y.size(); ++i)
        CHECK(rough.lifted[0].component(i, parse_forest("1")) == rough.Y[i][0]);

    // smooth driver: one-sided remainder rates hold with room to spare
    auto X = lift(smooth_wave_path(257, 1.0), alpha);
    RDESolver solver(X, F);
    auto sol = solver.solve({0.5});
    const auto& lifted = sol.lifted[0];
    const auto& tab = X->tables();
    std::size_t n = lifted.grid_size();
    for (int h = 0; h < tab.n_components; ++h) {
        std::vector<double> ws, rs;
        for (int k = 2; k <= 5; ++k) {
            std::size_t w = (n - 1) >> k;
            double worst = 0.0;
            for (std::size_t s = 0; s + w < n; s += w)
                worst = std::max(worst, std::abs(lifted.remainder(tab.forests[h], s, s + w)));
            ws.push_back(static_cast<double>(w) / (n - 1));
            rs.push_back(worst);
        }
        auto fit = fit_loglog(ws, rs, 1e-12);
        if (!fit.exact) CHECK(fit.slope >= (X->N() - tab.degree[h]) * alpha - 0.2);
    }
}

TEST_CASE("fixed-point consistency through the rough integral") {
    double alpha = 0.3;
    auto X = lift(smooth_wave_path(201, 1.0), alpha);
    PolyVectorField F = scalar_field(Rational(-1, 4), Rational(1), Rational(1, 10));
    RDESolver solver(X, F);
    auto sol = solver.solve({0.5});
    auto composed = solver.compose_field(sol.Y, 0)[0];
    auto integral = composed.rough_integral(0);
    for (std::size_t i = 0; i < sol.Y.size(); ++i) {
        double lhs = sol.Y[i][0] - sol.Y[0][0];
        double rhs = integral.component(i, parse_forest("1"));
        CHECK(lhs == doctest::Approx(rhs).epsilon(5e-5).scale(1.0));
    }
}

TEST_CASE("Ito-Lyons stability ratios are flat across sweeps") {
    double alpha = 0.3;
    auto base = oscillation_path(65, 1.0, alpha, 11);
    auto X = lift(base, alpha);
    PolyVectorField F = scalar_field(Rational(-1, 4), Rational(1), Rational(0));

    auto same = ito_lyons_stability({0.5}, X, {0.5}, X, F);
    CHECK(same.degenerate);
    CHECK(same.distance <= 1e-12);

    std::vector<double> ratios;
    for (double d : {1e-1, 1e-2, 1e-3, 1e-4}) {
        auto r = ito_lyons_stability({0.5}, X, {0.5 + d}, X, F);
        CHECK_FALSE(r.degenerate);
        ratios.push_back(r.ratio);
    }
    CHECK(*std::max_element(ratios.begin(), ratios.end()) /
              *std::min_element(ratios.begin(), ratios.end()) <
          10.0);

    ratios.clear();
    for (double scale : {1e-2, 1e-3, 1e-4}) {
        auto Xt = lift(perturb_path(base, scale), alpha);
        auto r = ito_lyons_stability({0.5}, X, {0.5}, Xt, F);
        CHECK_FALSE(r.degenerate);
        ratios.push_back(r.ratio);
    }
    CHECK(*std::max_element(ratios.begin(), ratios.end()) /
              *std::min_element(ratios.begin(), ratios.end()) <
          10.0);
}

TEST_CASE("input guards") {
    auto X = lift(time_path(11, 1.0), 0.3);
    CHECK_THROWS_AS(RDESolver(X, PolyVectorField::zero(2, 1)), std::invalid_argument);
    RDESolver solver(X, scalar_field(Rational(0), Rational(1), Rational(0)));
    CHECK_THROWS_AS(solver.solve({1.0, 2.0}), std::invalid_argument);
    PolyVectorField bad;
    bad.noise_dim = 1;
    bad.state_dim = 1;
    bad.fields = {{Poly(2)}};
    CHECK_THROWS_AS(ElementaryDifferentials{bad}, std::invalid_argument);
}
