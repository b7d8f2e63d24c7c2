#pragma once

// Margin reports for inequality checks: named sides, hypothesis flags and
// a witness snapshot of the inputs.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hess2 {

/// Named input snapshot attached to every report.
using Witness = std::vector<std::pair<std::string, std::vector<double>>>;

struct Hypothesis {
    std::string label;
    bool ok = false;
    bool gating = true;  // informational flags do not make a report vacuous
};

/// One inequality "lhs >= rhs". `scale` is 1 + the sum of |addend| over the
/// terms combined into the two sides; classification thresholds are relative
/// to it so that margins formed by cancellation of large internal terms are
/// not misread as violations.
struct MarginPart {
    std::string label;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // lhs - rhs exactly as computed
    double scale = 1.0;
};

struct MarginReport {
    std::string name;
    std::vector<Hypothesis> hypotheses;
    std::vector<MarginPart> parts;
    Witness witness;
    bool sorted_applied = false;  // inputs were re-sorted into lemma order

    bool vacuous() const {
        for (const auto& h : hypotheses)
            if (h.gating && !h.ok) return true;
        return false;
    }

    /// Part with the smallest relative margin.
    const MarginPart& worst() const {
        if (parts.empty()) throw std::logic_error("MarginReport has no parts");
        const MarginPart* w = &parts.front();
        for (const auto& p : parts)
            if (p.margin / p.scale < w->margin / w->scale) w = &p;
        return *w;
    }

    double min_margin() const { return worst().margin; }
    double min_rel_margin() const {
        const auto& w = worst();
        return w.margin / w.scale;
    }

    bool violated(double tol) const {
        for (const auto& p : parts)
            if (p.margin < -tol * p.scale) return true;
        return false;
    }
};

namespace detail {

inline MarginPart make_part(std::string label, double lhs, double rhs, double addend_sum) {
    MarginPart p;
    p.label = std::move(label);
    p.lhs = lhs;
    p.rhs = rhs;
    p.margin = lhs - rhs;
    p.scale = 1.0 + std::abs(addend_sum);
    return p;
}

}  // namespace detail

}  // namespace hess2
