#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hess2/solver.hpp"

using namespace hess2;
using Catch::Approx;

namespace {

std::function<double(const Point&)> quadratic_g(const std::vector<double>& d, double offset) {
    return [d, offset](const Point& p) {
        double v = offset;
        for (std::size_t i = 0; i < d.size(); ++i) v += 0.5 * d[i] * p[i] * p[i];
        return v;
    };
}

double max_err_vs(const ScalarField& u, const std::function<double(const Point&)>& g) {
    double e = 0.0;
    u.domain().for_each_node(
        [&](const MultiIndex& ix) { e = std::max(e, std::abs(u[ix] - g(u.domain().point(ix)))); });
    return e;
}

}  // namespace

TEST_CASE("grid domain validation") {
    CHECK_THROWS_AS(GridDomain(3, -1, 1, 4), std::invalid_argument);  // m >= 5
    CHECK_THROWS_AS(GridDomain(4, -1, 1, 9), std::invalid_argument);  // n in {2,3}
    CHECK_THROWS_AS(GridDomain(3, 1, -1, 9), std::invalid_argument);
    const GridDomain dom(3, -1, 1, 9);
    CHECK(dom.spacing() == Approx(0.25));
    CHECK(dom.node_count() == 9 * 9 * 9);
}

TEST_CASE("discrete hessian exact on quadratics") {
    const GridDomain dom(3, -1, 1, 9);
    // u = x^T M x / 2 with symmetric M including off-diagonal entries
    const auto f = ScalarField::from_function(dom, [](const Point& p) {
        return 0.5 * (2.0 * p[0] * p[0] + 1.0 * p[1] * p[1] - 0.4 * p[2] * p[2]) +
               0.3 * p[0] * p[1] - 0.1 * p[0] * p[2] + 0.25 * p[1] * p[2];
    });
    dom.for_each_interior([&](const MultiIndex& ix) {
        const SymTensor h = discrete_hessian(f, ix);
        CHECK(h(0, 0) == Approx(2.0).margin(1e-11));
        CHECK(h(1, 1) == Approx(1.0).margin(1e-11));
        CHECK(h(2, 2) == Approx(-0.4).margin(1e-11));
        CHECK(h(0, 1) == Approx(0.3).margin(1e-11));
        CHECK(h(0, 2) == Approx(-0.1).margin(1e-11));
        CHECK(h(1, 2) == Approx(0.25).margin(1e-11));
    });

    const auto c = ScalarField::from_function(dom, [](const Point&) { return 3.7; });
    dom.for_each_interior(
        [&](const MultiIndex& ix) { CHECK(discrete_hessian(c, ix).max_abs() == 0.0); });

    SECTION("boundary node raises") {
        CHECK_THROWS_AS(discrete_hessian(f, MultiIndex{0, 3, 3}), std::out_of_range);
    }

    SECTION("normalized isotropic quadratic has sigma_2 = 1") {
        const auto q = ScalarField::from_function(dom, [](const Point& p) {
            return (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] - 1.0) / (2.0 * std::sqrt(3.0));
        });
        dom.for_each_interior([&](const MultiIndex& ix) {
            const SymTensor h = discrete_hessian(q, ix);
            CHECK(sigma_k_mat(h, 2) == Approx(1.0).margin(1e-10));
        });
    }
}

TEST_CASE("barrier satisfies the equation identically") {
    for (int n : {2, 3}) {
        const GridDomain dom(n, -1, 1, 9);
        const auto w = barrier_initial_guess(dom, 0.5);
        const auto r = residual(w);
        CHECK(r.max_norm_interior() <= 1e-11);
        dom.for_each_interior([&](const MultiIndex& ix) {
            const SymTensor h = discrete_hessian(w, ix);
            CHECK(in_gamma_k(h, 2).inside);
        });
    }

    SECTION("a = 0 on the unit box centers the paraboloid at zero") {
        const GridDomain dom(3, -1, 1, 9);
        const auto w = barrier_initial_guess(dom, 0.0);
        CHECK(w[MultiIndex{4, 4, 4}] == Approx(0.0).margin(1e-15));
    }
}

TEST_CASE("residual of perturbed barrier is first-order in the bump") {
    const GridDomain dom(3, -1, 1, 9);
    const auto w = barrier_initial_guess(dom, 1.0);
    const double r0 = residual(w).max_norm_interior();
    CHECK(r0 <= 1e-11);

    auto bump = [&](double delta) {
        ScalarField f = w;
        const MultiIndex center{4, 4, 4};
        f[center] += delta;
        return residual(f).max_norm_interior();
    };
    const double r1 = bump(1e-6);
    const double r2 = bump(2e-6);
    CHECK(r1 > 0.0);
    CHECK(r2 == Approx(2.0 * r1).epsilon(1e-3));  // first-order response
}

TEST_CASE("newton reproduces quadratic data") {
    SECTION("n=3 isotropic, from the quadratic guess") {
        const GridDomain dom(3, -1, 1, 9);
        const double c = 1.0 / std::sqrt(3.0);
        const auto g = quadratic_g({c, c, c}, -1.0);
        const auto init = ScalarField::from_function(dom, g);
        const auto rep = newton_solve(dom, g, {}, init);
        CHECK(rep.iterations <= 1);
        CHECK(max_err_vs(rep.field, g) <= 1e-10);
        CHECK(rep.gamma2_certified);
    }

    SECTION("n=2 anisotropic diag(2, 1/2), from the barrier") {
        const GridDomain dom(2, -1, 1, 17);
        const auto g = quadratic_g({2.0, 0.5}, 0.0);
        const auto rep = newton_solve(dom, g);
        CHECK(max_err_vs(rep.field, g) <= 1e-9);
        CHECK(rep.iterations <= 25);
        CHECK(rep.gamma2_certified);
    }

    SECTION("n=3 Gamma_2 saddle diag(1.5, 1, -0.2), from the quadratic guess") {
        const GridDomain dom(3, -1, 1, 9);
        const auto g = quadratic_g({1.5, 1.0, -0.2}, 0.0);
        const auto init = ScalarField::from_function(dom, g);
        const auto rep = newton_solve(dom, g, {}, init);
        CHECK(max_err_vs(rep.field, g) <= 1e-10);
        CHECK(rep.gamma2_certified);
    }
}

TEST_CASE("newton g=0 solve: sandwich, certificate, monotone history") {
    const GridDomain dom(3, -1, 1, 9);
    const auto rep = newton_solve(dom, [](const Point&) { return 0.0; });
    CHECK(rep.gamma2_certified);
    CHECK(rep.residual_history.back() <= 1e-10);
    for (std::size_t i = 1; i < rep.residual_history.size(); ++i)
        CHECK(rep.residual_history[i] < rep.residual_history[i - 1]);

    // barrier sandwich w <= u <= 0 with a = max_boundary |x|^2 / sqrt(2n(n-1))
    const double a = 3.0 / std::sqrt(12.0);
    const auto w = barrier_initial_guess(dom, a);
    dom.for_each_node([&](const MultiIndex& ix) {
        CHECK(rep.field[ix] >= w[ix] - 1e-9);
        CHECK(rep.field[ix] <= 1e-12);
    });

    SECTION("grid symmetry of the solution") {
        const int m = dom.nodes_per_axis();
        dom.for_each_node([&](const MultiIndex& ix) {
            const MultiIndex mirrored{m - 1 - ix[0], ix[1], ix[2]};
            CHECK(rep.field[ix] == Approx(rep.field[mirrored]).margin(1e-9));
            const MultiIndex swapped{ix[1], ix[0], ix[2]};
            CHECK(rep.field[ix] == Approx(rep.field[swapped]).margin(1e-9));
        });
    }

    SECTION("ellipticity certificate: positive linearization spectrum") {
        CHECK(rep.min_linearization_eigenvalue > 0.0);
    }
}

TEST_CASE("newton failure modes") {
    SECTION("max_newton exceeded carries the history") {
        const GridDomain dom(3, -1, 1, 9);
        SolveConfig cfg;
        cfg.max_newton = 1;
        try {
            newton_solve(dom, [](const Point&) { return 0.0; }, cfg);
            FAIL("expected NonconvergenceError");
        } catch (const NonconvergenceError& e) {
            CHECK(e.residual_history.size() >= 1);
        }
    }

    SECTION("initial guess outside Gamma_2 reports the node") {
        const GridDomain dom(2, -1, 1, 9);
        // concave initial data violates sigma_1 > 0 everywhere
        const auto bad = ScalarField::from_function(
            dom, [](const Point& p) { return -(p[0] * p[0] + p[1] * p[1]); });
        CHECK_THROWS_AS(
            newton_solve(dom, [](const Point&) { return 0.0; }, {}, bad),
            EllipticityLossError);
    }

    SECTION("config validation") {
        SolveConfig cfg;
        cfg.tol_residual = -1.0;
        const GridDomain dom(2, -1, 1, 9);
        CHECK_THROWS_AS(newton_solve(dom, [](const Point&) { return 0.0; }, cfg),
                        std::invalid_argument);
    }
}
