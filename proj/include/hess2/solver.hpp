#pragma once

// Damped-Newton finite-difference solver for the Dirichlet problem
//   sigma_2(D^2 u) = 1 on a cube, u = g on the boundary,
// maintaining discrete Gamma_2 (sigma_1 > 0 and sigma_2 > 0 of the nodal
// Hessian) along accepted steps. The linearized operator at an iterate is
// sigma_2^{ij}(D^2 u) d_ij, solved matrix-free by Jacobi-preconditioned
// BiCGStab.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hess2/grid.hpp"
#include "hess2/symfun.hpp"

namespace hess2 {

struct SolveConfig {
    double tol_residual = 1e-10;
    int max_newton = 50;
    int max_halvings = 30;
    double krylov_tol = 1e-12;
    int krylov_max_iter = 20000;

    void validate() const {
        if (!(tol_residual > 0) || max_newton <= 0 || max_halvings <= 0 || !(krylov_tol > 0))
            throw std::invalid_argument("SolveConfig: all parameters must be positive");
    }
};

struct SolveReport {
    ScalarField field;
    std::vector<double> residual_history;  // max-norms, strictly decreasing
    bool gamma2_certified = false;
    int iterations = 0;
    double min_linearization_eigenvalue = 0.0;  // min over nodes of min eig of sigma_2^{ij}
};

struct EllipticityLossError : std::runtime_error {
    EllipticityLossError(const MultiIndex& node, int iteration)
        : std::runtime_error("discrete Gamma_2 lost at node (" + std::to_string(node[0]) + "," +
                             std::to_string(node[1]) + "," + std::to_string(node[2]) +
                             ") during Newton iteration " + std::to_string(iteration) +
                             " and not recoverable by damping"),
          node(node),
          iteration(iteration) {}
    MultiIndex node;
    int iteration;
};

struct NonconvergenceError : std::runtime_error {
    NonconvergenceError(std::string what, std::vector<double> history)
        : std::runtime_error(std::move(what)), residual_history(std::move(history)) {}
    std::vector<double> residual_history;
};

namespace fd {

// Nodal Hessian entries packed (n=2: xx, yy, xy; n=3: xx, yy, zz, xy, xz, yz).
inline constexpr int packed_size(int n) { return n * (n + 1) / 2; }

inline int packed_off(int n, int i, int j) {
    if (i == j) return i;
    if (i > j) std::swap(i, j);
    if (n == 2) return 2;
    return (i == 0) ? (j == 1 ? 3 : 4) : 5;  // n == 3
}

template <typename FieldLike>
inline void hessian_packed(const FieldLike& f, const GridDomain& dom, const MultiIndex& ix,
                           double* out) {
    const int n = dom.dim();
    const double h2 = dom.spacing() * dom.spacing();
    for (int i = 0; i < n; ++i) {
        MultiIndex p = ix, m = ix;
        ++p[static_cast<std::size_t>(i)];
        --m[static_cast<std::size_t>(i)];
        out[i] = (f[p] - 2.0 * f[ix] + f[m]) / h2;
    }
    int k = n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            MultiIndex pp = ix, pm = ix, mp = ix, mm = ix;
            ++pp[static_cast<std::size_t>(i)]; ++pp[static_cast<std::size_t>(j)];
            ++pm[static_cast<std::size_t>(i)]; --pm[static_cast<std::size_t>(j)];
            --mp[static_cast<std::size_t>(i)]; ++mp[static_cast<std::size_t>(j)];
            --mm[static_cast<std::size_t>(i)]; --mm[static_cast<std::size_t>(j)];
            out[k++] = (f[pp] - f[pm] - f[mp] + f[mm]) / (4.0 * h2);
        }
}

inline double sigma1_packed(const double* hp, int n) {
    double t = 0.0;
    for (int i = 0; i < n; ++i) t += hp[i];
    return t;
}

inline double sigma2_packed(const double* hp, int n) {
    if (n == 2) return hp[0] * hp[1] - hp[2] * hp[2];
    return hp[0] * hp[1] + hp[0] * hp[2] + hp[1] * hp[2] - hp[3] * hp[3] - hp[4] * hp[4] -
           hp[5] * hp[5];
}

inline bool gamma2_packed(const double* hp, int n) {
    return sigma1_packed(hp, n) > 0.0 && sigma2_packed(hp, n) > 0.0;
}

inline SymTensor unpack(const double* hp, int n) {
    SymTensor w(n);
    for (int i = 0; i < n; ++i) w.set(i, i, hp[i]);
    int k = n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) w.set(i, j, hp[k++]);
    return w;
}

}  // namespace fd

/// Central-difference Hessian at an interior node; exact for quadratics.
inline SymTensor discrete_hessian(const ScalarField& f, const MultiIndex& node) {
    const auto& dom = f.domain();
    if (!dom.is_interior(node))
        throw std::out_of_range("discrete_hessian: node must be at least one layer inside");
    double hp[6];
    fd::hessian_packed(f, dom, node, hp);
    return fd::unpack(hp, dom.dim());
}

/// The comparison function w = |x|^2 / sqrt(2n(n-1)) - a, which satisfies
/// sigma_2(D^2 w) = 1 identically and lies in Gamma_2.
inline ScalarField barrier_initial_guess(const GridDomain& dom, double a) {
    const double c = 1.0 / std::sqrt(2.0 * dom.dim() * (dom.dim() - 1));
    return ScalarField::from_function(dom, [&](const Point& p) {
        double r2 = 0.0;
        for (int i = 0; i < dom.dim(); ++i) r2 += p[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(i)];
        return c * r2 - a;
    });
}

/// Barrier constant making w <= g on the boundary (the g = 0 case reduces to
/// a = max_boundary |x|^2 / sqrt(2n(n-1))).
inline double barrier_constant(const GridDomain& dom,
                               const std::function<double(const Point&)>& g) {
    const double c = 1.0 / std::sqrt(2.0 * dom.dim() * (dom.dim() - 1));
    double a = -std::numeric_limits<double>::infinity();
    dom.for_each_node([&](const MultiIndex& ix) {
        if (!dom.is_boundary(ix)) return;
        const Point p = dom.point(ix);
        double r2 = 0.0;
        for (int i = 0; i < dom.dim(); ++i) r2 += p[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(i)];
        a = std::max(a, c * r2 - g(p));
    });
    return a;
}

/// sigma_2(discrete Hessian) - 1 on interior nodes (boundary entries 0).
inline ScalarField residual(const ScalarField& f) {
    const auto& dom = f.domain();
    ScalarField r(dom, 0.0);
    double hp[6];
    dom.for_each_interior([&](const MultiIndex& ix) {
        fd::hessian_packed(f, dom, ix, hp);
        r[ix] = fd::sigma2_packed(hp, dom.dim()) - 1.0;
    });
    return r;
}

namespace detail {

struct InteriorMap {
    std::vector<std::size_t> flat_of_row;    // row -> flat node index
    std::vector<std::ptrdiff_t> row_of_flat; // flat -> row or -1
    std::size_t rows = 0;

    explicit InteriorMap(const GridDomain& dom) {
        row_of_flat.assign(dom.node_count(), -1);
        dom.for_each_interior([&](const MultiIndex& ix) {
            const std::size_t f = dom.flat(ix);
            row_of_flat[f] = static_cast<std::ptrdiff_t>(flat_of_row.size());
            flat_of_row.push_back(f);
        });
        rows = flat_of_row.size();
    }
};

// Frozen sigma_2^{ij} coefficients per interior node (packed like the Hessian),
// together with a view of the first state where Gamma_2 failed.
struct Linearization {
    std::vector<double> coef;  // rows * packed_size
    int pack = 0;
    bool gamma2_ok = true;
    MultiIndex first_bad{0, 0, 0};

    Linearization(const ScalarField& u, const InteriorMap& map) {
        const auto& dom = u.domain();
        const int n = dom.dim();
        pack = fd::packed_size(n);
        coef.resize(map.rows * static_cast<std::size_t>(pack));
        double hp[6];
        std::size_t row = 0;
        dom.for_each_interior([&](const MultiIndex& ix) {
            fd::hessian_packed(u, dom, ix, hp);
            if (gamma2_ok && !fd::gamma2_packed(hp, n)) {
                gamma2_ok = false;
                first_bad = ix;
            }
            const double s1 = fd::sigma1_packed(hp, n);
            double* c = &coef[row * static_cast<std::size_t>(pack)];
            for (int i = 0; i < n; ++i) c[i] = s1 - hp[i];       // diagonal sigma_2^{ii}
            for (int k = n; k < pack; ++k) c[k] = -hp[k];        // off-diagonal -H_ij
            ++row;
        });
    }
};

// y = sigma_2^{ij} d_ij x on interior nodes (x zero on the boundary).
inline void apply_linearized(const GridDomain& dom, const InteriorMap& map,
                             const Linearization& lin, const std::vector<double>& x,
                             std::vector<double>& y) {
    const int n = dom.dim();
    const double h2 = dom.spacing() * dom.spacing();

    auto value = [&](const MultiIndex& ix) -> double {
        const std::ptrdiff_t r = map.row_of_flat[dom.flat(ix)];
        return r < 0 ? 0.0 : x[static_cast<std::size_t>(r)];
    };

    std::size_t row = 0;
    dom.for_each_interior([&](const MultiIndex& ix) {
        const double* c = &lin.coef[row * static_cast<std::size_t>(lin.pack)];
        const double xc = x[row];
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            MultiIndex p = ix, q = ix;
            ++p[static_cast<std::size_t>(i)];
            --q[static_cast<std::size_t>(i)];
            acc += c[i] * (value(p) - 2.0 * xc + value(q)) / h2;
        }
        int k = n;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j, ++k) {
                MultiIndex pp = ix, pm = ix, mp = ix, mm = ix;
                ++pp[static_cast<std::size_t>(i)]; ++pp[static_cast<std::size_t>(j)];
                ++pm[static_cast<std::size_t>(i)]; --pm[static_cast<std::size_t>(j)];
                --mp[static_cast<std::size_t>(i)]; ++mp[static_cast<std::size_t>(j)];
                --mm[static_cast<std::size_t>(i)]; --mm[static_cast<std::size_t>(j)];
                acc += 2.0 * c[k] * (value(pp) - value(pm) - value(mp) + value(mm)) / (4.0 * h2);
            }
        y[row] = acc;
        ++row;
    });
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// Jacobi-preconditioned BiCGStab for the frozen linearization. Returns the
// iterate reached; inexact directions are acceptable to the damped outer loop.
inline std::vector<double> bicgstab(const GridDomain& dom, const InteriorMap& map,
                                    const Linearization& lin, const std::vector<double>& b,
                                    double rtol, int max_iter) {
    const std::size_t N = map.rows;
    const double h2 = dom.spacing() * dom.spacing();
    const int n = dom.dim();

    std::vector<double> inv_diag(N);
    for (std::size_t r = 0; r < N; ++r) {
        double d = 0.0;
        const double* c = &lin.coef[r * static_cast<std::size_t>(lin.pack)];
        for (int i = 0; i < n; ++i) d += -2.0 * c[i] / h2;
        inv_diag[r] = (d != 0.0) ? 1.0 / d : 1.0;
    }
    auto precond = [&](std::vector<double>& v) {
        for (std::size_t r = 0; r < N; ++r) v[r] *= inv_diag[r];
    };

    std::vector<double> x(N, 0.0), r(b), rhat, p(N, 0.0), v(N, 0.0), s(N), t(N), y(N), z(N);
    precond(r);  // left preconditioning
    rhat = r;
    const double bnorm = norm2(r);
    if (bnorm == 0.0) return x;

    double rho = 1.0, alpha = 1.0, omega = 1.0;
    for (int it = 0; it < max_iter; ++it) {
        const double rho_new = dot(rhat, r);
        if (std::abs(rho_new) < 1e-300) break;  // breakdown; return best effort
        if (it == 0) {
            p = r;
        } else {
            const double beta = (rho_new / rho) * (alpha / omega);
            for (std::size_t k = 0; k < N; ++k) p[k] = r[k] + beta * (p[k] - omega * v[k]);
        }
        rho = rho_new;
        apply_linearized(dom, map, lin, p, v);
        precond(v);
        const double rv = dot(rhat, v);
        if (std::abs(rv) < 1e-300) break;
        alpha = rho / rv;
        for (std::size_t k = 0; k < N; ++k) s[k] = r[k] - alpha * v[k];
        if (norm2(s) <= rtol * bnorm) {
            for (std::size_t k = 0; k < N; ++k) x[k] += alpha * p[k];
            break;
        }
        apply_linearized(dom, map, lin, s, t);
        precond(t);
        const double tt = dot(t, t);
        if (tt == 0.0) break;
        omega = dot(t, s) / tt;
        for (std::size_t k = 0; k < N; ++k) {
            x[k] += alpha * p[k] + omega * s[k];
            r[k] = s[k] - omega * t[k];
        }
        if (norm2(r) <= rtol * bnorm || omega == 0.0) break;
    }
    return x;
}

inline double residual_max_norm(const ScalarField& u, const InteriorMap& map,
                                std::vector<double>& out) {
    const auto& dom = u.domain();
    const int n = dom.dim();
    double hp[6];
    double mx = 0.0;
    std::size_t row = 0;
    dom.for_each_interior([&](const MultiIndex& ix) {
        fd::hessian_packed(u, dom, ix, hp);
        const double f = fd::sigma2_packed(hp, n) - 1.0;
        out[row++] = f;
        mx = std::max(mx, std::abs(f));
    });
    return mx;
}

inline bool gamma2_everywhere(const ScalarField& u, MultiIndex* bad = nullptr) {
    const auto& dom = u.domain();
    const int n = dom.dim();
    double hp[6];
    bool ok = true;
    dom.for_each_interior([&](const MultiIndex& ix) {
        if (!ok) return;
        fd::hessian_packed(u, dom, ix, hp);
        if (!fd::gamma2_packed(hp, n)) {
            ok = false;
            if (bad != nullptr) *bad = ix;
        }
    });
    return ok;
}

}  // namespace detail

/// Solves sigma_2(D^2 u) = 1 with Dirichlet data g. Starts from `init` when
/// given (interior values only; the boundary always carries g), otherwise
/// from the barrier shifted below g. Accepted steps must both decrease the
/// interior residual max-norm and keep every nodal Hessian in Gamma_2.
inline SolveReport newton_solve(const GridDomain& dom, const std::function<double(const Point&)>& g,
                                const SolveConfig& cfg = {},
                                const std::optional<ScalarField>& init = std::nullopt) {
    cfg.validate();
    ScalarField u = init.has_value() ? *init : barrier_initial_guess(dom, barrier_constant(dom, g));
    if (init.has_value() && !(u.domain() == dom))
        throw std::invalid_argument("newton_solve: init field domain mismatch");
    dom.for_each_node([&](const MultiIndex& ix) {
        if (dom.is_boundary(ix)) u[ix] = g(dom.point(ix));
    });

    detail::InteriorMap map(dom);
    std::vector<double> F(map.rows), rhs(map.rows);

    std::vector<double> history;
    double rnorm = detail::residual_max_norm(u, map, F);
    history.push_back(rnorm);

    {
        MultiIndex bad{0, 0, 0};
        if (!detail::gamma2_everywhere(u, &bad)) throw EllipticityLossError(bad, 0);
    }

    int iterations = 0;
    while (rnorm > cfg.tol_residual) {
        if (iterations >= cfg.max_newton)
            throw NonconvergenceError("newton_solve: max_newton=" + std::to_string(cfg.max_newton) +
                                          " exceeded with residual " + std::to_string(rnorm),
                                      history);
        detail::Linearization lin(u, map);
        for (std::size_t r = 0; r < map.rows; ++r) rhs[r] = -F[r];
        std::vector<double> delta =
            detail::bicgstab(dom, map, lin, rhs, cfg.krylov_tol, cfg.krylov_max_iter);

        double step = 1.0;
        bool accepted = false;
        bool gamma2_was_blocker = true;
        MultiIndex bad{0, 0, 0};
        for (int halving = 0; halving <= cfg.max_halvings; ++halving) {
            ScalarField trial = u;
            for (std::size_t r = 0; r < map.rows; ++r)
                trial.values()[map.flat_of_row[r]] += step * delta[r];
            std::vector<double> Ft(map.rows);
            const double rt = detail::residual_max_norm(trial, map, Ft);
            MultiIndex bad_here{0, 0, 0};
            const bool g2 = detail::gamma2_everywhere(trial, &bad_here);
            if (!g2) bad = bad_here;
            if (g2 && rt < rnorm) {
                u = std::move(trial);
                F = std::move(Ft);
                rnorm = rt;
                history.push_back(rnorm);
                accepted = true;
                break;
            }
            if (g2) gamma2_was_blocker = false;
            step *= 0.5;
        }
        if (!accepted) {
            if (gamma2_was_blocker) throw EllipticityLossError(bad, iterations + 1);
            throw NonconvergenceError(
                "newton_solve: damping failed to reduce the residual at iteration " +
                    std::to_string(iterations + 1),
                history);
        }
        ++iterations;
    }

    SolveReport rep{std::move(u), std::move(history), false, iterations, 0.0};

    // Gamma_2 certificate and minimum linearization eigenvalue at convergence.
    double min_eig = std::numeric_limits<double>::infinity();
    bool ok = true;
    double hp[6];
    const int n = dom.dim();
    rep.field.domain().for_each_interior([&](const MultiIndex& ix) {
        fd::hessian_packed(rep.field, dom, ix, hp);
        if (!fd::gamma2_packed(hp, n)) ok = false;
        const SymTensor grad = sigma2_gradient(fd::unpack(hp, n));
        const Spectrum eig = eigenvalues_sym(grad);
        min_eig = std::min(min_eig, eig[n - 1]);
    });
    rep.gamma2_certified = ok;
    rep.min_linearization_eigenvalue = min_eig;
    return rep;
}

}  // namespace hess2
