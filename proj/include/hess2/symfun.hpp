#pragma once

// Elementary symmetric functions, Garding cones and the sigma_2
// linearization on small symmetric matrices (n <= 8).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace hess2 {

inline constexpr int kMaxDim = 8;

namespace detail {
inline void check_dim(int n) {
    if (n < 2 || n > kMaxDim)
        throw std::domain_error("dimension must be in [2, " + std::to_string(kMaxDim) +
                                "], got " + std::to_string(n));
}
}  // namespace detail

/// Ordered eigenvalue vector. Values are kept in non-increasing order
/// (lambda_1 >= ... >= lambda_n); construction sorts.
class Spectrum {
  public:
    Spectrum(std::initializer_list<double> vals) : Spectrum(std::vector<double>(vals)) {}

    explicit Spectrum(const std::vector<double>& vals) : n_(static_cast<int>(vals.size())) {
        detail::check_dim(n_);
        std::copy(vals.begin(), vals.end(), v_.begin());
        sort_desc();
    }

    int dim() const { return n_; }
    double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }

    std::vector<double> values() const { return {v_.begin(), v_.begin() + n_}; }

    double max_abs() const {
        double m = 0.0;
        for (int i = 0; i < n_; ++i) m = std::max(m, std::abs(v_[i]));
        return m;
    }

  private:
    void sort_desc() { std::stable_sort(v_.begin(), v_.begin() + n_, std::greater<double>()); }

    int n_;
    std::array<double, kMaxDim> v_{};
};

/// Symmetric n x n matrix with exact symmetry enforced at construction.
class SymTensor {
  public:
    explicit SymTensor(int n) : n_(n) { detail::check_dim(n); }

    static SymTensor identity(int n) {
        SymTensor w(n);
        for (int i = 0; i < n; ++i) w.set(i, i, 1.0);
        return w;
    }

    static SymTensor diag(const std::vector<double>& d) {
        SymTensor w(static_cast<int>(d.size()));
        for (int i = 0; i < w.n_; ++i) w.set(i, i, d[static_cast<std::size_t>(i)]);
        return w;
    }

    /// Builds from a full row-major matrix; rejects any exact asymmetry.
    static SymTensor from_rows(const std::vector<std::vector<double>>& rows) {
        const int n = static_cast<int>(rows.size());
        detail::check_dim(n);
        SymTensor w(n);
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n)
                throw std::invalid_argument("matrix rows must have length n");
            for (int j = 0; j < n; ++j) {
                const double a = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                const double b = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
                if (a != b) throw std::invalid_argument("asymmetric input rejected");
                w.e_[w.at(i, j)] = a;
            }
        }
        return w;
    }

    int dim() const { return n_; }

    double operator()(int i, int j) const { return e_[at(i, j)]; }

    /// Sets both (i,j) and (j,i).
    void set(int i, int j, double v) {
        e_[at(i, j)] = v;
        e_[at(j, i)] = v;
    }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < n_; ++i) t += e_[at(i, i)];
        return t;
    }

    double trace_sq() const {  // tr(W^2)
        double t = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) t += e_[at(i, j)] * e_[at(j, i)];
        return t;
    }

    double frobenius() const { return std::sqrt(trace_sq()); }

    double max_abs() const {
        double m = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) m = std::max(m, std::abs(e_[at(i, j)]));
        return m;
    }

    bool is_diagonal() const {
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j)
                if (e_[at(i, j)] != 0.0) return false;
        return true;
    }

    std::vector<double> diagonal() const {
        std::vector<double> d(static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i) d[static_cast<std::size_t>(i)] = e_[at(i, i)];
        return d;
    }

    SymTensor mul(const SymTensor& o) const {  // result symmetrized not assumed; used for powers
        SymTensor r(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) {
                double s = 0.0;
                for (int k = 0; k < n_; ++k) s += e_[at(i, k)] * o.e_[at(k, j)];
                r.e_[r.at(i, j)] = s;
            }
        return r;
    }

    friend SymTensor operator+(const SymTensor& a, const SymTensor& b) {
        SymTensor r(a.n_);
        for (std::size_t k = 0; k < a.e_.size(); ++k) r.e_[k] = a.e_[k] + b.e_[k];
        return r;
    }
    friend SymTensor operator-(const SymTensor& a, const SymTensor& b) {
        SymTensor r(a.n_);
        for (std::size_t k = 0; k < a.e_.size(); ++k) r.e_[k] = a.e_[k] - b.e_[k];
        return r;
    }
    friend SymTensor operator*(double c, const SymTensor& a) {
        SymTensor r(a.n_);
        for (std::size_t k = 0; k < a.e_.size(); ++k) r.e_[k] = c * a.e_[k];
        return r;
    }

  private:
    std::size_t at(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
               static_cast<std::size_t>(j);
    }

    int n_;
    std::array<double, static_cast<std::size_t>(kMaxDim* kMaxDim)> e_{};
};

/// k-th elementary symmetric function of the spectrum (sigma_0 = 1).
/// Stable O(n k) subset-sum recurrence.
inline double sigma_k(const Spectrum& s, int k) {
    const int n = s.dim();
    if (k < 0 || k > n) throw std::domain_error("sigma_k: k out of range [0, n]");
    std::array<double, kMaxDim + 1> e{};
    e[0] = 1.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::min(i + 1, k); j >= 1; --j)
            e[static_cast<std::size_t>(j)] += s[i] * e[static_cast<std::size_t>(j - 1)];
    return e[static_cast<std::size_t>(k)];
}

/// sigma_k of an eigenvalue list without constructing a Spectrum (helper).
inline double sigma_k(const double* lam, int n, int k) {
    if (k < 0 || k > n) throw std::domain_error("sigma_k: k out of range [0, n]");
    std::array<double, kMaxDim + 1> e{};
    e[0] = 1.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::min(i + 1, k); j >= 1; --j)
            e[static_cast<std::size_t>(j)] += lam[i] * e[static_cast<std::size_t>(j - 1)];
    return e[static_cast<std::size_t>(k)];
}

/// sigma_k of a symmetric matrix from power-sum invariants via Newton's
/// identities (characteristic-polynomial coefficients), no eigendecomposition.
inline double sigma_k_mat(const SymTensor& w, int k) {
    const int n = w.dim();
    if (k < 0 || k > n) throw std::domain_error("sigma_k_mat: k out of range [0, n]");
    if (k == 0) return 1.0;
    if (k == 1) return w.trace();
    if (k == 2) {
        const double t = w.trace();
        return 0.5 * (t * t - w.trace_sq());
    }
    // p_j = tr(W^j) for j <= k, then k e_k = sum_{i=1..k} (-1)^{i-1} e_{k-i} p_i.
    std::array<double, kMaxDim + 1> p{}, e{};
    SymTensor pw = w;
    p[1] = w.trace();
    for (int j = 2; j <= k; ++j) {
        pw = pw.mul(w);
        p[static_cast<std::size_t>(j)] = pw.trace();
    }
    e[0] = 1.0;
    for (int j = 1; j <= k; ++j) {
        double acc = 0.0;
        double sign = 1.0;
        for (int i = 1; i <= j; ++i) {
            acc += sign * e[static_cast<std::size_t>(j - i)] * p[static_cast<std::size_t>(i)];
            sign = -sign;
        }
        e[static_cast<std::size_t>(j)] = acc / j;
    }
    return e[static_cast<std::size_t>(k)];
}

/// Gradient of sigma_2 with respect to matrix entries: sigma_1(W) I - W.
/// Satisfies the Euler contraction sigma_2^{ij} W_ij = 2 sigma_2(W).
inline SymTensor sigma2_gradient(const SymTensor& w) {
    const int n = w.dim();
    const double s1 = w.trace();
    SymTensor g(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) g.set(i, j, (i == j ? s1 : 0.0) - w(i, j));
    return g;
}

struct ConeTest {
    bool inside = false;
    std::vector<double> margins;  // sigma_1 .. sigma_k
};

/// Garding cone membership: sigma_j > 0 strictly for all 1 <= j <= k.
inline ConeTest in_gamma_k(const Spectrum& s, int k) {
    if (k < 1 || k > s.dim()) throw std::domain_error("in_gamma_k: k out of range [1, n]");
    ConeTest t;
    t.inside = true;
    for (int j = 1; j <= k; ++j) {
        const double sj = sigma_k(s, j);
        t.margins.push_back(sj);
        if (!(sj > 0.0)) t.inside = false;
    }
    return t;
}

inline ConeTest in_gamma_k(const SymTensor& w, int k) {
    if (k < 1 || k > w.dim()) throw std::domain_error("in_gamma_k: k out of range [1, n]");
    ConeTest t;
    t.inside = true;
    for (int j = 1; j <= k; ++j) {
        const double sj = sigma_k_mat(w, j);
        t.margins.push_back(sj);
        if (!(sj > 0.0)) t.inside = false;
    }
    return t;
}

/// Shifts every eigenvalue by a; ordering is preserved.
inline Spectrum shift_spectrum(const Spectrum& s, double a) {
    std::vector<double> v = s.values();
    for (double& x : v) x += a;
    return Spectrum(v);
}

namespace detail {

// Eigenvalues of a symmetric 2x2 in non-increasing order.
inline void eig2(const SymTensor& w, double* lam) {
    const double a = w(0, 0), b = w(0, 1), d = w(1, 1);
    const double mean = 0.5 * (a + d);
    const double r = std::hypot(0.5 * (a - d), b);
    lam[0] = mean + r;
    lam[1] = mean - r;
}

// Closed-form symmetric 3x3 eigenvalues (trigonometric characteristic roots).
inline void eig3(const SymTensor& w, double* lam) {
    const double p1 = w(0, 1) * w(0, 1) + w(0, 2) * w(0, 2) + w(1, 2) * w(1, 2);
    if (p1 == 0.0) {
        lam[0] = w(0, 0);
        lam[1] = w(1, 1);
        lam[2] = w(2, 2);
        std::sort(lam, lam + 3, std::greater<double>());
        return;
    }
    const double q = w.trace() / 3.0;
    const double d0 = w(0, 0) - q, d1 = w(1, 1) - q, d2 = w(2, 2) - q;
    const double p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    // B = (W - qI)/p; r = det(B)/2 in [-1, 1] up to rounding.
    const double b00 = d0 / p, b11 = d1 / p, b22 = d2 / p;
    const double b01 = w(0, 1) / p, b02 = w(0, 2) / p, b12 = w(1, 2) / p;
    double r = 0.5 * (b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02) +
                      b02 * (b01 * b12 - b11 * b02));
    r = std::clamp(r, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double two_pi_3 = 2.0943951023931953;
    lam[0] = q + 2.0 * p * std::cos(phi);
    lam[2] = q + 2.0 * p * std::cos(phi + two_pi_3);
    lam[1] = 3.0 * q - lam[0] - lam[2];
}

// Cyclic Jacobi with optional accumulation of rotations; works for any n <= 8.
inline void jacobi_eig(const SymTensor& w, double* lam, double* q_colmajor) {
    const int n = w.dim();
    std::array<double, kMaxDim * kMaxDim> a{};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(i * n + j)] = w(i, j);
    std::array<double, kMaxDim * kMaxDim> q{};
    for (int i = 0; i < n; ++i) q[static_cast<std::size_t>(i * n + i)] = 1.0;

    auto A = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i * n + j)]; };
    auto Q = [&](int i, int j) -> double& { return q[static_cast<std::size_t>(i * n + j)]; };

    double norm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) norm = std::max(norm, std::abs(A(i, j)));
    const double stop = 1e-15 * (norm > 0 ? norm : 1.0);

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off = std::max(off, std::abs(A(i, j)));
        if (off <= stop) break;
        for (int p = 0; p < n - 1; ++p)
            for (int r = p + 1; r < n; ++r) {
                const double apr = A(p, r);
                if (std::abs(apr) <= stop * 1e-2) continue;
                const double theta = (A(r, r) - A(p, p)) / (2.0 * apr);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, p), akr = A(k, r);
                    A(k, p) = c * akp - s * akr;
                    A(k, r) = s * akp + c * akr;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(p, k), ark = A(r, k);
                    A(p, k) = c * apk - s * ark;
                    A(r, k) = s * apk + c * ark;
                }
                for (int k = 0; k < n; ++k) {
                    const double qkp = Q(k, p), qkr = Q(k, r);
                    Q(k, p) = c * qkp - s * qkr;
                    Q(k, r) = s * qkp + c * qkr;
                }
            }
    }
    std::array<int, kMaxDim> ord{};
    for (int i = 0; i < n; ++i) ord[static_cast<std::size_t>(i)] = i;
    std::stable_sort(ord.begin(), ord.begin() + n,
                     [&](int x, int y) { return A(x, x) > A(y, y); });
    for (int i = 0; i < n; ++i) lam[i] = A(ord[static_cast<std::size_t>(i)], ord[static_cast<std::size_t>(i)]);
    if (q_colmajor != nullptr)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                q_colmajor[j * n + i] = Q(i, ord[static_cast<std::size_t>(j)]);
}

}  // namespace detail

/// Sorted (non-increasing) eigenvalues. Closed-form characteristic roots
/// for n = 2, 3; cyclic Jacobi for 4 <= n <= 8.
inline Spectrum eigenvalues_sym(const SymTensor& w) {
    const int n = w.dim();
    std::array<double, kMaxDim> lam{};
    if (n == 2)
        detail::eig2(w, lam.data());
    else if (n == 3)
        detail::eig3(w, lam.data());
    else
        detail::jacobi_eig(w, lam.data(), nullptr);
    return Spectrum(std::vector<double>(lam.begin(), lam.begin() + n));
}

struct EigenDecomposition {
    Spectrum values;
    std::array<double, kMaxDim * kMaxDim> q_colmajor;  // columns are eigenvectors
    int n;
};

/// Full decomposition W = Q diag(values) Q^T via Jacobi rotations (all n).
inline EigenDecomposition eigen_sym(const SymTensor& w) {
    const int n = w.dim();
    std::array<double, kMaxDim> lam{};
    std::array<double, kMaxDim * kMaxDim> q{};
    detail::jacobi_eig(w, lam.data(), q.data());
    return EigenDecomposition{Spectrum(std::vector<double>(lam.begin(), lam.begin() + n)), q, n};
}

/// Spectral norm (max |eigenvalue|) of a symmetric matrix.
inline double spectral_norm(const SymTensor& w) { return eigenvalues_sym(w).max_abs(); }

}  // namespace hess2
