#pragma once

// Margin evaluation for the eigenvalue inequalities on the Gamma_2 cone:
// the third-derivative quadratic bound, its sigma_2 = 1 specialization,
// the shifted-spectrum chain, its derived-shift corollary, and the n = 3
// log-Laplacian quadratic-form inequality with its epsilon window.

#include <cmath>
#include <string>
#include <vector>

#include "hess2/margin.hpp"
#include "hess2/symfun.hpp"

namespace hess2 {

inline constexpr double kSurfaceTol = 1e-10;  // |sigma_2 - 1| and |eta| slack on sampled inputs

namespace detail {

struct DiagSorted {
    std::vector<double> w;   // diagonal, non-increasing
    std::vector<double> xi;  // same permutation applied
    bool was_diagonal = true;
    bool sorted_applied = false;
};

// Lemma inputs assume diagonal W with W_11 >= ... >= W_nn. Sorting a diagonal
// pair (W, xi) by a common permutation loses no generality, so unsorted inputs
// are permuted rather than rejected; a flag records it.
inline DiagSorted diag_sorted(const SymTensor& w, const std::vector<double>& xi_diag) {
    const int n = w.dim();
    DiagSorted out;
    out.was_diagonal = w.is_diagonal();
    std::vector<int> ord(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ord[static_cast<std::size_t>(i)] = i;
    const auto d = w.diagonal();
    std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) {
        return d[static_cast<std::size_t>(a)] > d[static_cast<std::size_t>(b)];
    });
    out.w.resize(static_cast<std::size_t>(n));
    out.xi.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        out.w[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(ord[static_cast<std::size_t>(i)])];
        out.xi[static_cast<std::size_t>(i)] =
            xi_diag.empty() ? 0.0 : xi_diag[static_cast<std::size_t>(ord[static_cast<std::size_t>(i)])];
        if (ord[static_cast<std::size_t>(i)] != i) out.sorted_applied = true;
    }
    return out;
}

inline double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace detail

/// Quadratic third-derivative bound for diagonal sorted W in Gamma_2 and
/// symmetric xi with eta = sum_i sigma_2^{ii} xi_ii:
///   -sum_{i != j} xi_ii xi_jj
///     >= (n-1)/(2 s2) [2 s2 xi_11 - W_11 eta]^2 / [(n-1) W_11^2 + 2(n-2) s2]
///        - eta^2 / (2 s2).
inline MarginReport check_lemma_CQ(const SymTensor& w, const SymTensor& xi) {
    const int n = w.dim();
    MarginReport rep;
    rep.name = "lemma_CQ";

    auto ds = detail::diag_sorted(w, xi.diagonal());
    rep.sorted_applied = ds.sorted_applied;
    rep.hypotheses.push_back({"W_diagonal", ds.was_diagonal});
    rep.hypotheses.push_back({"xi_diagonal_part_used", true, false});

    const Spectrum lam(ds.w);
    const auto cone = in_gamma_k(lam, 2);
    rep.hypotheses.push_back({"W_in_gamma2", cone.inside});

    rep.witness = {{"W_diag", ds.w}, {"xi_diag", ds.xi}};
    if (rep.vacuous()) return rep;

    const double s1 = sigma_k(lam, 1);
    const double s2 = sigma_k(lam, 2);
    const double w11 = ds.w[0];

    double eta = 0.0, eta_abs = 0.0;
    double sum_xi = 0.0, sum_xi_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double coef = s1 - ds.w[static_cast<std::size_t>(i)];  // sigma_2^{ii}
        eta += coef * ds.xi[static_cast<std::size_t>(i)];
        eta_abs += std::abs(coef * ds.xi[static_cast<std::size_t>(i)]);
        sum_xi += ds.xi[static_cast<std::size_t>(i)];
        sum_xi_sq += ds.xi[static_cast<std::size_t>(i)] * ds.xi[static_cast<std::size_t>(i)];
    }

    // lhs = -(S^2 - Q) with S = sum xi_ii, Q = sum xi_ii^2.
    const double lhs = -(sum_xi * sum_xi - sum_xi_sq);
    const double num = 2.0 * s2 * ds.xi[0] - w11 * eta;
    const double den = (n - 1) * w11 * w11 + 2.0 * (n - 2) * s2;
    const double t1 = (n - 1) / (2.0 * s2) * (num * num) / den;
    const double t2 = eta * eta / (2.0 * s2);
    const double rhs = t1 - t2;

    const double addends = sum_xi * sum_xi + sum_xi_sq + t1 + t2 +
                           eta_abs * eta_abs / (2.0 * s2);
    rep.parts.push_back(detail::make_part("quadratic_bound", lhs, rhs, addends));
    rep.witness.push_back({"eta", {eta}});
    return rep;
}

/// sigma_2 = 1 specialization with the differentiated-equation constraint
/// eta = 0:  -sum_{i != j} xi_ii xi_jj >= 2(n-1) xi_11^2 / [(n-1) W_11^2 + 2(n-2)].
inline MarginReport check_corollary_third_derivative(const SymTensor& w, const SymTensor& xi) {
    const int n = w.dim();
    MarginReport rep;
    rep.name = "cor_third_derivative";

    auto ds = detail::diag_sorted(w, xi.diagonal());
    rep.sorted_applied = ds.sorted_applied;
    rep.hypotheses.push_back({"W_diagonal", ds.was_diagonal});

    const Spectrum lam(ds.w);
    const auto cone = in_gamma_k(lam, 2);
    rep.hypotheses.push_back({"W_in_gamma2", cone.inside});

    const double s1 = sigma_k(lam, 1);
    const double s2 = sigma_k(lam, 2);
    rep.hypotheses.push_back({"sigma2_equals_1", std::abs(s2 - 1.0) <= kSurfaceTol});

    double eta = 0.0;
    double sum_xi = 0.0, sum_xi_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        eta += (s1 - ds.w[static_cast<std::size_t>(i)]) * ds.xi[static_cast<std::size_t>(i)];
        sum_xi += ds.xi[static_cast<std::size_t>(i)];
        sum_xi_sq += ds.xi[static_cast<std::size_t>(i)] * ds.xi[static_cast<std::size_t>(i)];
    }
    rep.hypotheses.push_back({"eta_equals_0", std::abs(eta) <= kSurfaceTol});

    rep.witness = {{"W_diag", ds.w}, {"xi_diag", ds.xi}, {"eta", {eta}}};
    if (rep.vacuous()) return rep;

    const double lhs = -(sum_xi * sum_xi - sum_xi_sq);
    const double w11 = ds.w[0];
    const double rhs = 2.0 * (n - 1) * ds.xi[0] * ds.xi[0] / ((n - 1) * w11 * w11 + 2.0 * (n - 2));
    rep.parts.push_back(
        detail::make_part("constrained_bound", lhs, rhs, sum_xi * sum_xi + sum_xi_sq + rhs));
    return rep;
}

/// Shifted-spectrum chain for diagonal sorted W in Gamma_2 with shift a >= 0
/// satisfying a <= sqrt(s2 / (3(n-1)(n-2))) (skipped when n = 2),
/// sigma_3(W + aI) >= 0 and W_11 > 6(n-2) a:
///   (7/6) s2 >= s2 + (n-1)(n-2)/2 a^2 >= (5/6) sigma_2^{11} W_11,
///   |W_jj| <= (n-1)^2 a + 7(n-1) s2 / (5 W_11)  for j >= 2.
inline MarginReport check_lemma_shift(const SymTensor& w, double a) {
    const int n = w.dim();
    MarginReport rep;
    rep.name = "lemma_shift";

    auto ds = detail::diag_sorted(w, {});
    rep.sorted_applied = ds.sorted_applied;
    rep.hypotheses.push_back({"W_diagonal", ds.was_diagonal});

    const Spectrum lam(ds.w);
    const auto cone = in_gamma_k(lam, 2);
    rep.hypotheses.push_back({"W_in_gamma2", cone.inside});
    rep.hypotheses.push_back({"a_nonnegative", a >= 0.0});

    const double s2 = sigma_k(lam, 2);
    if (n >= 3) {
        const bool a_ok = cone.inside && a * a * (3.0 * (n - 1) * (n - 2)) <= s2;
        rep.hypotheses.push_back({"a_within_bound", a_ok});
    }
    // Evaluated directly from the shifted spectrum, never via an expansion.
    const double s3_shifted = (n >= 3) ? sigma_k(shift_spectrum(lam, a), 3) : 0.0;
    rep.hypotheses.push_back({"sigma3_shifted_nonnegative", s3_shifted >= 0.0});

    const double w11 = ds.w[0];
    rep.hypotheses.push_back({"w11_above_shift_threshold", w11 > 6.0 * (n - 2) * a});

    rep.witness = {{"W_diag", ds.w}, {"a", {a}}, {"sigma3_shifted", {s3_shifted}}};
    if (rep.vacuous()) return rep;

    const double s1 = sigma_k(lam, 1);
    const double mid = s2 + 0.5 * (n - 1) * (n - 2) * a * a;
    const double low = (5.0 / 6.0) * (s1 - w11) * w11;
    rep.parts.push_back(detail::make_part("chain_upper", (7.0 / 6.0) * s2, mid,
                                          (7.0 / 6.0) * s2 + mid));
    rep.parts.push_back(detail::make_part("chain_lower", mid, low, mid + std::abs(low)));

    double wmax = 0.0;
    for (int j = 1; j < n; ++j) wmax = std::max(wmax, std::abs(ds.w[static_cast<std::size_t>(j)]));
    const double bound = (n - 1) * (n - 1) * a + 7.0 * (n - 1) * s2 / (5.0 * w11);
    rep.parts.push_back(detail::make_part("offdiag_bound", bound, wmax, bound + wmax));
    return rep;
}

/// Derived-shift corollary on the sigma_2 = 1 surface: given sigma_3(W) >= -A
/// and W_11 >= 6(n-2)A/n, the shift a = sqrt(2A / (n(n-1) sigma_1)) is checked
/// against the chain hypotheses directly, then
///   sigma_2 >= (5/7) sigma_2^{11} W_11   and the |W_jj| bound with that a.
inline MarginReport check_corollary_A(const SymTensor& w, double A) {
    const int n = w.dim();
    MarginReport rep;
    rep.name = "cor_derived_shift";

    auto ds = detail::diag_sorted(w, {});
    rep.sorted_applied = ds.sorted_applied;
    rep.hypotheses.push_back({"W_diagonal", ds.was_diagonal});

    const Spectrum lam(ds.w);
    const auto cone = in_gamma_k(lam, 2);
    rep.hypotheses.push_back({"W_in_gamma2", cone.inside});

    const double s1 = sigma_k(lam, 1);
    const double s2 = sigma_k(lam, 2);
    const double s3 = (n >= 3) ? sigma_k(lam, 3) : 0.0;
    rep.hypotheses.push_back({"sigma2_equals_1", std::abs(s2 - 1.0) <= kSurfaceTol});
    rep.hypotheses.push_back({"A_nonnegative", A >= 0.0});
    // the boundary case sigma_3 = -A is admissible; same slack as the surface
    rep.hypotheses.push_back({"sigma3_above_minus_A", s3 + A >= -kSurfaceTol * (1.0 + std::abs(A))});

    const double w11 = ds.w[0];
    rep.hypotheses.push_back({"w11_above_A_threshold", w11 >= 6.0 * (n - 2) * A / n});

    const double a = (cone.inside && s1 > 0.0) ? std::sqrt(2.0 * A / (n * (n - 1) * s1)) : 0.0;

    // The sufficient largeness route W_11^{3/2} >= 6(n-2) sqrt(2A/(n(n-1))) is
    // recorded but not gating; the chain hypotheses below are what the margins
    // actually need, and they are checked directly with the derived a.
    const bool largeness =
        std::pow(w11, 1.5) >= 6.0 * (n - 2) * std::sqrt(2.0 * A / (n * (n - 1)));
    rep.hypotheses.push_back({"w11_largeness_sufficient", largeness, false});

    if (n >= 3) {
        const bool a_ok = a * a * (3.0 * (n - 1) * (n - 2)) <= s2;
        rep.hypotheses.push_back({"derived_a_within_bound", a_ok});
    }
    const double s3_shifted = (n >= 3) ? sigma_k(shift_spectrum(lam, a), 3) : 0.0;
    rep.hypotheses.push_back({"sigma3_shifted_nonnegative", s3_shifted >= 0.0});
    rep.hypotheses.push_back({"w11_above_shift_threshold", w11 > 6.0 * (n - 2) * a});

    rep.witness = {{"W_diag", ds.w}, {"A", {A}}, {"derived_a", {a}}};
    if (rep.vacuous()) return rep;

    const double t = (5.0 / 7.0) * (s1 - w11) * w11;
    rep.parts.push_back(detail::make_part("sigma2_lower_bound", s2, t, s2 + std::abs(t)));

    double wmax = 0.0;
    for (int j = 1; j < n; ++j) wmax = std::max(wmax, std::abs(ds.w[static_cast<std::size_t>(j)]));
    const double bound = (n - 1) * (n - 1) * a + 7.0 * (n - 1) * s2 / (5.0 * w11);
    rep.parts.push_back(detail::make_part("offdiag_bound", bound, wmax, bound + wmax));
    return rep;
}

/// n = 3 quadratic-form inequality on the sigma_2 = 1 surface, two routes:
/// (i) the 2x2 discriminant condition
///     [2 s1 (s1+l3) - (1+e)(l1-l2)^2][2 s1 (s1+l2) - (1+e)(l1-l3)^2]
///        >= [2 s1 l1 - (1+e)(l2-l1)(l3-l1)]^2,
/// (ii) the same statement expanded with sigma_2 = 1 substituted.
/// Both hold for 0 <= e <= sqrt(101) - 10 (in particular at e = 1/25).
inline MarginReport check_quadratic_form_epsilon(const Spectrum& lambda, double eps) {
    MarginReport rep;
    rep.name = "quadratic_form_eps";
    rep.hypotheses.push_back({"n_equals_3", lambda.dim() == 3});
    if (lambda.dim() != 3) return rep;

    const auto cone = in_gamma_k(lambda, 2);
    rep.hypotheses.push_back({"lambda_in_gamma2", cone.inside});
    const double s2 = sigma_k(lambda, 2);
    rep.hypotheses.push_back({"sigma2_equals_1", std::abs(s2 - 1.0) <= kSurfaceTol});

    const double l1 = lambda[0], l2 = lambda[1], l3 = lambda[2];
    rep.witness = {{"lambda", {l1, l2, l3}}, {"eps", {eps}}};
    if (rep.vacuous()) return rep;

    const double s1 = l1 + l2 + l3;
    const double e = eps;

    // (i) discriminant form
    const double A = 2.0 * s1 * (s1 + l3) - (1.0 + e) * (l1 - l2) * (l1 - l2);
    const double B = 2.0 * s1 * (s1 + l2) - (1.0 + e) * (l1 - l3) * (l1 - l3);
    const double C = 2.0 * s1 * l1 - (1.0 + e) * (l2 - l1) * (l3 - l1);
    rep.parts.push_back(
        detail::make_part("discriminant", A * B, C * C, std::abs(A * B) + C * C));

    // (ii) expanded form
    const double q1 = (1.0 - e) * l1 * l1 + 3.0 + e;
    const double q2 = (5.0 - e) * l2 * l2 + (5.0 - e) * l3 * l3 + 2.0 * (4.0 + e) * l2 * l3 + 6.0;
    const double p2 = (1.0 - e) * l2 * l2 + 4.0 * l3 * l3 + 3.0 - e;
    const double p3 = (1.0 - e) * l3 * l3 + 4.0 * l2 * l2 + 3.0 - e;
    const double t1 = q1 * q2;
    const double t2 = p2 * p3;
    const double t3 = 2.0 * e * l1 * l2 * p3;
    const double t4 = 2.0 * e * l1 * l3 * p2;
    const double lhs = t1 + t2 + t3 + t4;
    const double r1 = 4.0 * (2.0 + e) * (2.0 + e) * l2 * l2 * l3 * l3;
    const double r2 = 4.0 * e * e * l1 * l1 * l2 * l3;
    const double rhs = r1 - r2;
    rep.parts.push_back(detail::make_part(
        "expanded", lhs, rhs,
        std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4) + std::abs(r1) + std::abs(r2)));
    return rep;
}

}  // namespace hess2
