#pragma once

// Test-only oracles, independent of the library's evaluation paths:
// subset enumeration for elementary symmetric functions, principal-minor
// enumeration for matrix invariants, and seeded random rotations.

#include <cmath>
#include <cstdint>
#include <vector>

#include "hess2/sampling.hpp"
#include "hess2/symfun.hpp"

namespace oracle {

/// sigma_k by direct enumeration of all k-subsets.
inline double sigma_k_enum(const std::vector<double>& lam, int k) {
    const int n = static_cast<int>(lam.size());
    if (k == 0) return 1.0;
    double total = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != k) continue;
        double prod = 1.0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) prod *= lam[static_cast<std::size_t>(i)];
        total += prod;
    }
    return total;
}

/// Determinant of a k x k submatrix by Gaussian elimination with pivoting.
inline double det_dense(std::vector<double> a, int k) {
    double det = 1.0;
    for (int col = 0; col < k; ++col) {
        int piv = col;
        for (int r = col + 1; r < k; ++r)
            if (std::abs(a[static_cast<std::size_t>(r * k + col)]) >
                std::abs(a[static_cast<std::size_t>(piv * k + col)]))
                piv = r;
        if (a[static_cast<std::size_t>(piv * k + col)] == 0.0) return 0.0;
        if (piv != col) {
            for (int c = 0; c < k; ++c)
                std::swap(a[static_cast<std::size_t>(piv * k + c)], a[static_cast<std::size_t>(col * k + c)]);
            det = -det;
        }
        det *= a[static_cast<std::size_t>(col * k + col)];
        for (int r = col + 1; r < k; ++r) {
            const double f = a[static_cast<std::size_t>(r * k + col)] / a[static_cast<std::size_t>(col * k + col)];
            for (int c = col; c < k; ++c)
                a[static_cast<std::size_t>(r * k + c)] -= f * a[static_cast<std::size_t>(col * k + c)];
        }
    }
    return det;
}

/// sigma_k of a matrix as the sum of k x k principal minors, enumerated.
inline double sigma_k_minors(const hess2::SymTensor& w, int k) {
    const int n = w.dim();
    if (k == 0) return 1.0;
    double total = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != k) continue;
        std::vector<int> idx;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) idx.push_back(i);
        std::vector<double> sub(static_cast<std::size_t>(k * k));
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c)
                sub[static_cast<std::size_t>(r * k + c)] =
                    w(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
        total += det_dense(sub, k);
    }
    return total;
}

/// Random rotation built from seeded Givens rotations (orthogonal by
/// construction), applied as Q^T D Q.
inline hess2::SymTensor random_conjugate(const std::vector<double>& diag, hess2::rng::Stream& st) {
    const int n = static_cast<int>(diag.size());
    std::vector<double> a(static_cast<std::size_t>(n * n), 0.0);
    for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i * n + i)] = diag[static_cast<std::size_t>(i)];

    auto rotate = [&](int p, int q, double theta) {
        const double c = std::cos(theta), s = std::sin(theta);
        for (int k = 0; k < n; ++k) {  // rows
            const double ap = a[static_cast<std::size_t>(p * n + k)], aq = a[static_cast<std::size_t>(q * n + k)];
            a[static_cast<std::size_t>(p * n + k)] = c * ap - s * aq;
            a[static_cast<std::size_t>(q * n + k)] = s * ap + c * aq;
        }
        for (int k = 0; k < n; ++k) {  // columns
            const double ap = a[static_cast<std::size_t>(k * n + p)], aq = a[static_cast<std::size_t>(k * n + q)];
            a[static_cast<std::size_t>(k * n + p)] = c * ap - s * aq;
            a[static_cast<std::size_t>(k * n + q)] = s * ap + c * aq;
        }
    };
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) rotate(p, q, st.uniform(0.0, 6.283185307179586));

    // exact symmetrization guards the strict constructor against roundoff
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(n),
                                          std::vector<double>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                0.5 * (a[static_cast<std::size_t>(i * n + j)] + a[static_cast<std::size_t>(j * n + i)]);
    return hess2::SymTensor::from_rows(rows);
}

/// Random symmetric matrix with entries log-uniform in magnitude.
inline hess2::SymTensor random_sym(int n, hess2::rng::Stream& st, double lo = 1e-2,
                                   double hi = 1e2) {
    hess2::SymTensor w(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) w.set(i, j, st.signed_log_uniform(lo, hi));
    return w;
}

/// Conditioning scale for comparing two sigma_k evaluation routes: the
/// Newton-identity recursion combines terms of size e_{k-i}(|lam|) p_i(|lam|),
/// so agreement can only be expected relative to their sum.
inline double sigma_cond_scale(const std::vector<double>& lam, int k) {
    const int n = static_cast<int>(lam.size());
    std::vector<double> a(lam);
    for (auto& x : a) x = std::abs(x);
    std::vector<double> p(static_cast<std::size_t>(k + 1), 0.0);
    for (int i = 1; i <= k; ++i)
        for (int j = 0; j < n; ++j) p[static_cast<std::size_t>(i)] += std::pow(a[static_cast<std::size_t>(j)], i);
    double scale = 1.0 + sigma_k_enum(a, k);
    for (int i = 1; i <= k; ++i)
        scale += sigma_k_enum(a, k - i) * p[static_cast<std::size_t>(i)];
    return scale;
}

}  // namespace oracle
