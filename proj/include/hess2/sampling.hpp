#pragma once

// Seeded randomized verification of the inequality checks: rejection
// sampling on the stated constraint surfaces, vacuity accounting, and an
// epsilon-frontier sweep for the n = 3 quadratic-form inequality.
//
// Determinism: the stream is split into fixed-size blocks whose substream
// seeds depend only on (seed, block index); merging is done in block order,
// so reports are bit-identical for any worker count.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hess2/ineq.hpp"
#include "hess2/margin.hpp"
#include "hess2/symfun.hpp"

namespace hess2 {

struct SamplerStarvation : std::runtime_error {
    explicit SamplerStarvation(const std::string& constraint)
        : std::runtime_error("sampler starvation: rejection rate above 99.9% on constraint '" +
                             constraint + "'"),
          constraint_name(constraint) {}
    std::string constraint_name;
};

struct SampleConfig {
    int n = 3;
    std::uint64_t count = 100000;
    std::uint64_t seed = 42;
    // Magnitudes are log-uniform on [1e-2, 1e2] before constraint projection;
    // on the sigma_2 = 1 surface the solved eigenvalue is capped at 1e4 to
    // keep margin evaluation within floating-point accuracy.
    double mag_lo = 1e-2;
    double mag_hi = 1e2;
    double lambda1_cap = 1e4;
    double tol = 1e-9;
    double eps = 1.0 / 25.0;
    int workers = 1;

    std::string scale_law() const {
        return "loguniform[" + std::to_string(mag_lo) + "," + std::to_string(mag_hi) + "]";
    }
};

struct SampleReport {
    std::string which;
    std::uint64_t seed = 0;
    std::uint64_t count = 0;
    double tol = 0.0;
    std::uint64_t evaluated = 0;  // checked samples (margins computed)
    std::uint64_t vacuous = 0;    // hypothesis-violating draws
    std::uint64_t rejected = 0;   // off the constraint surface
    std::uint64_t attempts = 0;   // evaluated + vacuous + rejected
    std::uint64_t violations = 0;
    double min_margin = 0.0;
    double min_rel_margin = 0.0;
    MarginReport argmin;  // witness of the minimal relative margin
};

namespace rng {

// splitmix64; used to derive block substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// xoshiro256** — small, fast, and fully specified here (stdlib distribution
// objects are implementation-defined, which would break bit-reproducibility).
class Stream {
  public:
    explicit Stream(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    double signed_log_uniform(double lo, double hi) {
        const double m = log_uniform(lo, hi);
        return (next_u64() & 1u) ? m : -m;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

}  // namespace rng

namespace detail {

// Diagonal W in Gamma_2, sorted non-increasing. Empty vector => rejected.
inline std::vector<double> draw_gamma2_diag(rng::Stream& st, const SampleConfig& cfg) {
    std::vector<double> lam(static_cast<std::size_t>(cfg.n));
    for (auto& x : lam) x = st.signed_log_uniform(cfg.mag_lo, cfg.mag_hi);
    std::sort(lam.begin(), lam.end(), std::greater<double>());
    double s1 = 0.0;
    for (double x : lam) s1 += x;
    if (!(s1 > 0.0)) return {};
    double sq = 0.0;
    for (double x : lam) sq += x * x;
    if (!(0.5 * (s1 * s1 - sq) > 0.0)) return {};
    return lam;
}

// n = 3 spectrum on Gamma_2 with sigma_2 = 1: draw lambda_2 >= lambda_3,
// solve lambda_1 = (1 - l2 l3)/(l2 + l3), reject on order/cone/cap failure.
inline std::vector<double> draw_surface3(rng::Stream& st, const SampleConfig& cfg) {
    double l2 = st.signed_log_uniform(cfg.mag_lo, cfg.mag_hi);
    double l3 = st.signed_log_uniform(cfg.mag_lo, cfg.mag_hi);
    if (l2 < l3) std::swap(l2, l3);
    const double s = l2 + l3;
    if (!(s > 0.0)) return {};
    const double l1 = (1.0 - l2 * l3) / s;
    if (!(l1 >= l2) || l1 > cfg.lambda1_cap) return {};
    if (!(l1 + l2 + l3 > 0.0)) return {};
    return {l1, l2, l3};
}

// General-n fallback onto the sigma_2 = 1 surface by homogeneity.
inline std::vector<double> draw_surface_any(rng::Stream& st, const SampleConfig& cfg) {
    if (cfg.n == 3) return draw_surface3(st, cfg);
    auto lam = draw_gamma2_diag(st, cfg);
    if (lam.empty()) return lam;
    const double s2 = sigma_k(lam.data(), cfg.n, 2);
    const double c = 1.0 / std::sqrt(s2);
    for (auto& x : lam) x *= c;
    return lam;
}

// xi diagonal projected (with one refinement pass) onto eta = sum c_i xi_i = 0.
inline std::vector<double> draw_xi_eta0(rng::Stream& st, const SampleConfig& cfg,
                                        const std::vector<double>& lam) {
    const int n = cfg.n;
    std::vector<double> xi(static_cast<std::size_t>(n)), c(static_cast<std::size_t>(n));
    double s1 = 0.0;
    for (double x : lam) s1 += x;
    double csq = 0.0;
    for (int i = 0; i < n; ++i) {
        c[static_cast<std::size_t>(i)] = s1 - lam[static_cast<std::size_t>(i)];
        csq += c[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(i)];
        xi[static_cast<std::size_t>(i)] = st.signed_log_uniform(cfg.mag_lo, cfg.mag_hi);
    }
    for (int pass = 0; pass < 2; ++pass) {
        double eta = 0.0;
        for (int i = 0; i < n; ++i) eta += c[static_cast<std::size_t>(i)] * xi[static_cast<std::size_t>(i)];
        for (int i = 0; i < n; ++i) xi[static_cast<std::size_t>(i)] -= eta * c[static_cast<std::size_t>(i)] / csq;
    }
    return xi;
}

}  // namespace detail

/// Draws one classified sample for the named inequality. Returns nullopt when
/// the draw is off the constraint surface (rejected); a vacuous report when
/// lemma hypotheses fail; a checked report otherwise.
inline std::optional<MarginReport> draw_sample(const std::string& which, rng::Stream& st,
                                               const SampleConfig& cfg) {
    if (which == "lemma21") {
        auto lam = detail::draw_gamma2_diag(st, cfg);
        if (lam.empty()) return std::nullopt;
        std::vector<double> xi(static_cast<std::size_t>(cfg.n));
        for (auto& x : xi) x = st.signed_log_uniform(cfg.mag_lo, cfg.mag_hi);
        return check_lemma_CQ(SymTensor::diag(lam), SymTensor::diag(xi));
    }
    if (which == "cor22") {
        auto lam = detail::draw_surface_any(st, cfg);
        if (lam.empty()) return std::nullopt;
        auto xi = detail::draw_xi_eta0(st, cfg, lam);
        return check_corollary_third_derivative(SymTensor::diag(lam), SymTensor::diag(xi));
    }
    if (which == "lemma23") {
        auto lam = detail::draw_gamma2_diag(st, cfg);
        if (lam.empty()) return std::nullopt;
        double a;
        if (cfg.n == 2) {
            a = st.log_uniform(cfg.mag_lo, cfg.mag_hi);
        } else {
            const double s2 = sigma_k(lam.data(), cfg.n, 2);
            const double a_bound = std::sqrt(s2 / (3.0 * (cfg.n - 1) * (cfg.n - 2)));
            const double a_hi = std::min(a_bound, lam[0] / (6.0 * (cfg.n - 2)));
            a = st.uniform(0.0, a_hi);
        }
        return check_lemma_shift(SymTensor::diag(lam), a);
    }
    if (which == "cor24") {
        auto lam = detail::draw_surface_any(st, cfg);
        if (lam.empty()) return std::nullopt;
        const double s3 = (cfg.n >= 3) ? sigma_k(lam.data(), cfg.n, 3) : 0.0;
        double A;
        if (cfg.n == 2) {
            A = st.log_uniform(cfg.mag_lo, cfg.mag_hi);
        } else {
            const double lo = std::max(0.0, -s3);
            const double hi = cfg.n * lam[0] / (6.0 * (cfg.n - 2));
            // Empty window: report with the smallest admissible A so the
            // W_11 hypothesis records the failure (vacuous, not rejected).
            A = (lo <= hi) ? st.uniform(lo, hi) : lo;
        }
        return check_corollary_A(SymTensor::diag(lam), A);
    }
    if (which == "eps") {
        auto lam = detail::draw_surface3(st, cfg);
        if (lam.empty()) return std::nullopt;
        return check_quadratic_form_epsilon(Spectrum(lam), cfg.eps);
    }
    throw std::invalid_argument("unknown inequality id '" + which + "'");
}

namespace detail {

struct BlockResult {
    std::uint64_t attempts = 0, evaluated = 0, vacuous = 0, rejected = 0, violations = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    double min_rel = std::numeric_limits<double>::infinity();
    MarginReport argmin;
    bool has_argmin = false;
};

inline constexpr std::uint64_t kBlockQuota = 8192;

inline std::uint64_t block_seed(std::uint64_t seed, std::uint64_t block) {
    std::uint64_t s = seed ^ (0xA0761D6478BD642FULL + block);
    return rng::splitmix64(s);
}

template <typename DrawFn>
BlockResult run_block(const std::string& which, const SampleConfig& cfg, std::uint64_t block,
                      std::uint64_t quota, DrawFn&& draw) {
    rng::Stream st(block_seed(cfg.seed, block));
    BlockResult res;
    const std::uint64_t attempt_cap = 1000 * quota + 1000;
    while (res.evaluated < quota) {
        if (res.attempts >= attempt_cap) throw SamplerStarvation(which);
        ++res.attempts;
        auto rep = draw(st);
        if (!rep) {
            ++res.rejected;
            continue;
        }
        if (rep->vacuous()) {
            ++res.vacuous;
            continue;
        }
        ++res.evaluated;
        if (rep->violated(cfg.tol)) ++res.violations;
        const double rel = rep->min_rel_margin();
        if (rel < res.min_rel) {
            res.min_rel = rel;
            res.min_margin = rep->min_margin();
            res.argmin = *rep;
            res.has_argmin = true;
        }
    }
    return res;
}

template <typename DrawFn>
SampleReport run_blocks(const std::string& which, const SampleConfig& cfg, DrawFn&& draw) {
    const std::uint64_t nblocks = (cfg.count + kBlockQuota - 1) / kBlockQuota;
    std::vector<BlockResult> results(nblocks);

    auto quota_of = [&](std::uint64_t b) {
        return (b + 1 < nblocks || cfg.count % kBlockQuota == 0) ? kBlockQuota
                                                                 : cfg.count % kBlockQuota;
    };

    const int workers = std::max(1, cfg.workers);
    if (workers == 1 || nblocks == 1) {
        for (std::uint64_t b = 0; b < nblocks; ++b)
            results[b] = run_block(which, cfg, b, quota_of(b), draw);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::exception_ptr first_error;
        std::mutex err_mutex;
        auto worker = [&]() {
            for (;;) {
                const std::uint64_t b = next.fetch_add(1);
                if (b >= nblocks) return;
                try {
                    results[b] = run_block(which, cfg, b, quota_of(b), draw);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    SampleReport rep;
    rep.which = which;
    rep.seed = cfg.seed;
    rep.count = cfg.count;
    rep.tol = cfg.tol;
    rep.min_margin = std::numeric_limits<double>::infinity();
    rep.min_rel_margin = std::numeric_limits<double>::infinity();
    for (const auto& r : results) {
        rep.attempts += r.attempts;
        rep.evaluated += r.evaluated;
        rep.vacuous += r.vacuous;
        rep.rejected += r.rejected;
        rep.violations += r.violations;
        if (r.has_argmin && r.min_rel < rep.min_rel_margin) {
            rep.min_rel_margin = r.min_rel;
            rep.min_margin = r.min_margin;
            rep.argmin = r.argmin;
        }
    }
    return rep;
}

}  // namespace detail

/// Verifies an inequality over cfg.count hypothesis-satisfying samples.
inline SampleReport sample_verify(const std::string& which, const SampleConfig& cfg) {
    return detail::run_blocks(which, cfg,
                              [&](rng::Stream& st) { return draw_sample(which, st, cfg); });
}

struct FrontierRow {
    double eps = 0.0;
    double min_margin = 0.0;
    double min_rel_margin = 0.0;
    std::uint64_t violations = 0;
    std::vector<double> argmin_lambda;
};

struct FrontierTable {
    std::vector<FrontierRow> rows;
    std::uint64_t count = 0;
    std::uint64_t seed = 0;
    // Largest grid eps whose sampled minimum margin is nonnegative (-1 if none).
    double largest_nonneg_eps = -1.0;
};

/// Sweeps the discriminant-form margin over an eps grid, reusing one seeded
/// sample set for every eps so rows differ only through eps itself.
inline FrontierTable epsilon_frontier(const SampleConfig& cfg, const std::vector<double>& eps_grid) {
    for (double e : eps_grid)
        if (e < 0.0 || e > 0.5)
            throw std::invalid_argument("epsilon_frontier: grid eps must lie in [0, 0.5]");

    FrontierTable table;
    table.count = cfg.count;
    table.seed = cfg.seed;
    table.rows.resize(eps_grid.size());
    for (std::size_t k = 0; k < eps_grid.size(); ++k) {
        table.rows[k].eps = eps_grid[k];
        table.rows[k].min_margin = std::numeric_limits<double>::infinity();
        table.rows[k].min_rel_margin = std::numeric_limits<double>::infinity();
    }

    const std::uint64_t nblocks = (cfg.count + detail::kBlockQuota - 1) / detail::kBlockQuota;
    for (std::uint64_t b = 0; b < nblocks; ++b) {
        const std::uint64_t quota = (b + 1 < nblocks || cfg.count % detail::kBlockQuota == 0)
                                        ? detail::kBlockQuota
                                        : cfg.count % detail::kBlockQuota;
        rng::Stream st(detail::block_seed(cfg.seed, b));
        std::uint64_t got = 0, attempts = 0;
        const std::uint64_t cap = 1000 * quota + 1000;
        while (got < quota) {
            if (attempts++ >= cap) throw SamplerStarvation("eps");
            auto lam = detail::draw_surface3(st, cfg);
            if (lam.empty()) continue;
            ++got;
            const double l1 = lam[0], l2 = lam[1], l3 = lam[2];
            const double s1 = l1 + l2 + l3;
            for (std::size_t k = 0; k < eps_grid.size(); ++k) {
                const double e = eps_grid[k];
                const double A = 2.0 * s1 * (s1 + l3) - (1.0 + e) * (l1 - l2) * (l1 - l2);
                const double B = 2.0 * s1 * (s1 + l2) - (1.0 + e) * (l1 - l3) * (l1 - l3);
                const double C = 2.0 * s1 * l1 - (1.0 + e) * (l2 - l1) * (l3 - l1);
                const double margin = A * B - C * C;
                const double scale = 1.0 + std::abs(A * B) + C * C;
                auto& row = table.rows[k];
                if (margin < -cfg.tol * scale) ++row.violations;
                if (margin / scale < row.min_rel_margin) {
                    row.min_rel_margin = margin / scale;
                    row.min_margin = margin;
                    row.argmin_lambda = lam;
                }
            }
        }
    }

    for (const auto& row : table.rows)
        if (row.min_margin >= 0.0 && row.eps > table.largest_nonneg_eps)
            table.largest_nonneg_eps = row.eps;
    return table;
}

}  // namespace hess2
