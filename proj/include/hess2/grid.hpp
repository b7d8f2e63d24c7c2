#pragma once

// Uniform cube grids and nodal scalar fields for the Dirichlet solver.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace hess2 {

using MultiIndex = std::array<int, 3>;  // unused trailing components are 0
using Point = std::array<double, 3>;

/// Uniform isotropic grid on the cube [lo, hi]^n, n in {2, 3}, m nodes per axis.
class GridDomain {
  public:
    GridDomain(int n, double lo, double hi, int m) : n_(n), lo_(lo), hi_(hi), m_(m) {
        if (n != 2 && n != 3) throw std::invalid_argument("GridDomain: n must be 2 or 3");
        if (m < 5) throw std::invalid_argument("GridDomain: m must be >= 5 (central stencils)");
        if (!(hi > lo)) throw std::invalid_argument("GridDomain: requires hi > lo");
        h_ = (hi - lo) / (m - 1);
    }

    int dim() const { return n_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    int nodes_per_axis() const { return m_; }
    double spacing() const { return h_; }

    std::size_t node_count() const {
        std::size_t c = 1;
        for (int i = 0; i < n_; ++i) c *= static_cast<std::size_t>(m_);
        return c;
    }

    std::size_t flat(const MultiIndex& ix) const {
        std::size_t f = 0;
        for (int i = 0; i < n_; ++i) f = f * static_cast<std::size_t>(m_) + static_cast<std::size_t>(ix[static_cast<std::size_t>(i)]);
        return f;
    }

    MultiIndex unflat(std::size_t f) const {
        MultiIndex ix{0, 0, 0};
        for (int i = n_ - 1; i >= 0; --i) {
            ix[static_cast<std::size_t>(i)] = static_cast<int>(f % static_cast<std::size_t>(m_));
            f /= static_cast<std::size_t>(m_);
        }
        return ix;
    }

    Point point(const MultiIndex& ix) const {
        Point p{0.0, 0.0, 0.0};
        for (int i = 0; i < n_; ++i) p[static_cast<std::size_t>(i)] = lo_ + h_ * ix[static_cast<std::size_t>(i)];
        return p;
    }

    /// Distance (in layers) to the nearest boundary face.
    int depth(const MultiIndex& ix) const {
        int d = m_;
        for (int i = 0; i < n_; ++i)
            d = std::min({d, ix[static_cast<std::size_t>(i)], m_ - 1 - ix[static_cast<std::size_t>(i)]});
        return d;
    }

    bool is_boundary(const MultiIndex& ix) const { return depth(ix) == 0; }
    bool is_interior(const MultiIndex& ix) const { return depth(ix) >= 1; }

    template <typename Fn>
    void for_each_node(Fn&& fn) const {
        MultiIndex ix{0, 0, 0};
        if (n_ == 2) {
            for (ix[0] = 0; ix[0] < m_; ++ix[0])
                for (ix[1] = 0; ix[1] < m_; ++ix[1]) fn(ix);
        } else {
            for (ix[0] = 0; ix[0] < m_; ++ix[0])
                for (ix[1] = 0; ix[1] < m_; ++ix[1])
                    for (ix[2] = 0; ix[2] < m_; ++ix[2]) fn(ix);
        }
    }

    template <typename Fn>
    void for_each_interior(Fn&& fn) const {
        MultiIndex ix{0, 0, 0};
        if (n_ == 2) {
            for (ix[0] = 1; ix[0] + 1 < m_; ++ix[0])
                for (ix[1] = 1; ix[1] + 1 < m_; ++ix[1]) fn(ix);
        } else {
            for (ix[0] = 1; ix[0] + 1 < m_; ++ix[0])
                for (ix[1] = 1; ix[1] + 1 < m_; ++ix[1])
                    for (ix[2] = 1; ix[2] + 1 < m_; ++ix[2]) fn(ix);
        }
    }

    bool operator==(const GridDomain& o) const {
        return n_ == o.n_ && lo_ == o.lo_ && hi_ == o.hi_ && m_ == o.m_;
    }

  private:
    int n_;
    double lo_, hi_;
    int m_;
    double h_;
};

/// Nodal values of a scalar function on a GridDomain. Boundary nodes carry
/// the prescribed Dirichlet trace exactly.
class ScalarField {
  public:
    explicit ScalarField(const GridDomain& dom, double fill = 0.0)
        : dom_(dom), v_(dom.node_count(), fill) {}

    static ScalarField from_function(const GridDomain& dom,
                                     const std::function<double(const Point&)>& f) {
        ScalarField out(dom);
        dom.for_each_node([&](const MultiIndex& ix) { out[ix] = f(dom.point(ix)); });
        return out;
    }

    const GridDomain& domain() const { return dom_; }

    double operator[](const MultiIndex& ix) const { return v_[dom_.flat(ix)]; }
    double& operator[](const MultiIndex& ix) { return v_[dom_.flat(ix)]; }

    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

    double max_norm_interior() const {
        double m = 0.0;
        dom_.for_each_interior([&](const MultiIndex& ix) { m = std::max(m, std::abs((*this)[ix])); });
        return m;
    }

    double min_value() const {
        double m = v_.empty() ? 0.0 : v_[0];
        for (double x : v_) m = std::min(m, x);
        return m;
    }

    double max_value() const {
        double m = v_.empty() ? 0.0 : v_[0];
        for (double x : v_) m = std::max(m, x);
        return m;
    }

  private:
    GridDomain dom_;
    std::vector<double> v_;
};

}  // namespace hess2
