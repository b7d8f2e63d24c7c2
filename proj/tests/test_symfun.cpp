#include <catch2/catch_amalgamated.hpp>

#include "hess2/symfun.hpp"
#include "oracles.hpp"

using namespace hess2;
using Catch::Approx;

TEST_CASE("sigma_k on spectra") {
    CHECK(sigma_k(Spectrum{1, 1, 1}, 2) == Approx(3.0));
    CHECK(sigma_k(Spectrum{2, 2, -0.75}, 2) == Approx(1.0));  // 2*2 + 2*(-3/4) + 2*(-3/4)
    CHECK(sigma_k(Spectrum{1.5, 1, -0.2}, 3) == Approx(-0.3));
    CHECK(sigma_k(Spectrum{1.5, 1, -0.2}, 0) == 1.0);
    CHECK_THROWS_AS(sigma_k(Spectrum{1, 1, 1}, 4), std::domain_error);
    CHECK_THROWS_AS(sigma_k(Spectrum{1, 1, 1}, -1), std::domain_error);
}

TEST_CASE("sigma_k matches subset enumeration") {
    rng::Stream st(101);
    for (int n = 2; n <= 8; ++n) {
        for (int rep = 0; rep < 500; ++rep) {
            std::vector<double> lam(static_cast<std::size_t>(n));
            for (auto& x : lam) x = st.signed_log_uniform(1e-2, 1e2);
            const Spectrum s(lam);
            for (int k = 0; k <= n; ++k) {
                const double expect = oracle::sigma_k_enum(s.values(), k);
                std::vector<double> absv = s.values();
                for (auto& x : absv) x = std::abs(x);
                const double scale = 1.0 + oracle::sigma_k_enum(absv, k);
                CHECK(std::abs(sigma_k(s, k) - expect) <= 1e-12 * scale);
            }
        }
    }
}

TEST_CASE("sigma_k_mat from invariants") {
    CHECK(sigma_k_mat(SymTensor::identity(3), 2) == Approx(3.0));
    CHECK(sigma_k_mat(SymTensor::diag({2, 2, -0.75}), 2) == Approx(1.0));
    CHECK(sigma_k_mat(SymTensor::diag({2, 2, -0.75}), 2) ==
          Approx(oracle::sigma_k_minors(SymTensor::diag({2, 2, -0.75}), 2)));

    SECTION("rotation invariance of sigma_2") {
        rng::Stream st(7);
        const SymTensor w = oracle::random_conjugate({1.5, 1.0, -0.2}, st);
        CHECK(sigma_k_mat(w, 2) == Approx(1.0).margin(1e-10));
    }

    SECTION("asymmetric input rejected at construction") {
        CHECK_THROWS_AS(SymTensor::from_rows({{1, 2, 0}, {2.0000001, 1, 0}, {0, 0, 1}}),
                        std::invalid_argument);
    }
}

TEST_CASE("sigma_k_mat vs principal-minor enumeration (random)") {
    rng::Stream st(2024);
    for (int n = 2; n <= 6; ++n) {
        for (int rep = 0; rep < 200; ++rep) {
            const SymTensor w = oracle::random_sym(n, st);
            for (int k = 1; k <= n; ++k) {
                const double expect = oracle::sigma_k_minors(w, k);
                const double scale = 1.0 + std::pow(w.max_abs() * n, k);
                CHECK(std::abs(sigma_k_mat(w, k) - expect) <= 1e-10 * scale);
            }
        }
    }
}

TEST_CASE("sigma2_gradient") {
    const SymTensor g = sigma2_gradient(SymTensor::diag({2, 2, -0.75}));
    CHECK(g(0, 0) == Approx(1.25));
    CHECK(g(1, 1) == Approx(1.25));
    CHECK(g(2, 2) == Approx(4.0));
    CHECK(g(0, 1) == 0.0);

    const SymTensor zero(3);
    CHECK(sigma2_gradient(zero).max_abs() == 0.0);

    SECTION("Euler contraction sigma_2^{ij} W_ij = 2 sigma_2") {
        const SymTensor w = SymTensor::diag({1.5, 1.0, -0.2});
        const SymTensor g2 = sigma2_gradient(w);
        double contraction = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) contraction += g2(i, j) * w(i, j);
        CHECK(contraction == Approx(2.0).epsilon(1e-12));  // 2 sigma_2 = 2

        rng::Stream st(33);
        for (int rep = 0; rep < 1000; ++rep) {
            const SymTensor r = oracle::random_sym(3, st);
            const SymTensor gr = sigma2_gradient(r);
            double c = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) c += gr(i, j) * r(i, j);
            const double s2 = sigma_k_mat(r, 2);
            CHECK(std::abs(c - 2.0 * s2) <= 1e-12 * (1.0 + std::abs(s2)) * 100);
        }
    }

    SECTION("positive definite on Gamma_2") {
        rng::Stream st(55);
        SampleConfig cfg;
        int found = 0;
        while (found < 10000) {
            auto lam = hess2::detail::draw_gamma2_diag(st, cfg);
            if (lam.empty()) continue;
            ++found;
            const SymTensor rot = oracle::random_conjugate(lam, st);
            const Spectrum eig = eigenvalues_sym(sigma2_gradient(rot));
            CHECK(eig[rot.dim() - 1] > 0.0);
        }
    }
}

TEST_CASE("in_gamma_k") {
    CHECK(in_gamma_k(Spectrum{1, 1, 1}, 3).inside);
    const auto t2 = in_gamma_k(Spectrum{2, 2, -0.75}, 2);
    CHECK(t2.inside);
    CHECK(t2.margins[0] == Approx(3.25));
    CHECK(t2.margins[1] == Approx(1.0));
    const auto t3 = in_gamma_k(Spectrum{2, 2, -0.75}, 3);
    CHECK_FALSE(t3.inside);
    CHECK(t3.margins[2] == Approx(-3.0));

    SECTION("cone nesting") {
        rng::Stream st(77);
        for (int rep = 0; rep < 2000; ++rep) {
            std::vector<double> lam(4);
            for (auto& x : lam) x = st.signed_log_uniform(1e-2, 1e2);
            const Spectrum s(lam);
            for (int k = 4; k >= 2; --k)
                if (in_gamma_k(s, k).inside)
                    for (int j = 1; j < k; ++j) CHECK(in_gamma_k(s, j).inside);
        }
    }
}

TEST_CASE("eigenvalues_sym") {
    const Spectrum a = eigenvalues_sym(SymTensor::diag({3, 1, 2}));
    CHECK(a[0] == 3.0);
    CHECK(a[1] == 2.0);
    CHECK(a[2] == 1.0);

    const Spectrum b = eigenvalues_sym(SymTensor::from_rows({{0, 1}, {1, 0}}));
    CHECK(b[0] == Approx(1.0));
    CHECK(b[1] == Approx(-1.0));

    SECTION("conjugation oracle, closed-form path") {
        rng::Stream st(11);
        for (int rep = 0; rep < 500; ++rep) {
            const SymTensor w = oracle::random_conjugate({1.5, 1.0, -0.2}, st);
            const Spectrum e = eigenvalues_sym(w);
            CHECK(std::abs(e[0] - 1.5) <= 1e-12 * 10);
            CHECK(std::abs(e[1] - 1.0) <= 1e-12 * 10);
            CHECK(std::abs(e[2] + 0.2) <= 1e-12 * 10);
        }
    }

    SECTION("iterative path reconstruction") {
        rng::Stream st(13);
        for (int n = 4; n <= 8; ++n) {
            for (int rep = 0; rep < 100; ++rep) {
                const SymTensor w = oracle::random_sym(n, st);
                const auto dec = eigen_sym(w);
                // ||W - Q Lambda Q^T|| <= 1e-12 (1 + ||W||)
                double err = 0.0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        double s = 0.0;
                        for (int k = 0; k < n; ++k)
                            s += dec.q_colmajor[static_cast<std::size_t>(k * n + i)] * dec.values[k] *
                                 dec.q_colmajor[static_cast<std::size_t>(k * n + j)];
                        err = std::max(err, std::abs(w(i, j) - s));
                    }
                CHECK(err <= 1e-12 * (1.0 + w.frobenius()));
            }
        }
    }

    SECTION("closed-form path agrees with Jacobi") {
        rng::Stream st(17);
        for (int n : {2, 3}) {
            for (int rep = 0; rep < 500; ++rep) {
                const SymTensor w = oracle::random_sym(n, st);
                const Spectrum closed = eigenvalues_sym(w);
                const auto jac = eigen_sym(w);
                for (int i = 0; i < n; ++i)
                    CHECK(std::abs(closed[i] - jac.values[i]) <= 1e-10 * (1.0 + w.max_abs()));
            }
        }
    }
}

TEST_CASE("eigenvalues vs sigma consistency (random)") {
    rng::Stream st(19);
    for (int n = 2; n <= 8; ++n) {
        for (int rep = 0; rep < 150; ++rep) {
            const SymTensor w = oracle::random_sym(n, st);
            const Spectrum e = eigenvalues_sym(w);
            for (int k = 1; k <= n; ++k) {
                const double via_mat = sigma_k_mat(w, k);
                const double via_eig = oracle::sigma_k_enum(e.values(), k);
                const double scale = oracle::sigma_cond_scale(e.values(), k);
                CHECK(std::abs(via_mat - via_eig) <= 1e-10 * scale);
            }
        }
    }
}

TEST_CASE("orthogonal invariance of sigma_k_mat") {
    rng::Stream st(23);
    for (int n = 2; n <= 6; ++n) {
        for (int rep = 0; rep < 200; ++rep) {
            std::vector<double> d(static_cast<std::size_t>(n));
            for (auto& x : d) x = st.signed_log_uniform(1e-2, 1e2);
            const SymTensor rot = oracle::random_conjugate(d, st);
            for (int k = 1; k <= n; ++k) {
                const double a = sigma_k_mat(SymTensor::diag(d), k);
                const double b = sigma_k_mat(rot, k);
                const double scale = oracle::sigma_cond_scale(d, k);
                CHECK(std::abs(a - b) <= 1e-10 * scale);
            }
        }
    }
}

TEST_CASE("shift_spectrum") {
    const Spectrum s = shift_spectrum(Spectrum{1.5, 1, -0.2}, 0.2);
    CHECK(s[0] == Approx(1.7));
    CHECK(s[1] == Approx(1.2));
    CHECK(s[2] == Approx(0.0).margin(1e-15));
    CHECK(sigma_k(s, 3) == Approx(0.0).margin(1e-14));  // 1.7 * 1.2 * 0

    const Spectrum id = shift_spectrum(Spectrum{2, 1, 0}, 0.0);
    CHECK(id[0] == 2.0);
    CHECK(id[1] == 1.0);
    CHECK(id[2] == 0.0);
}
