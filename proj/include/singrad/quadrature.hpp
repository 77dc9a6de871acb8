#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "singrad/errors.hpp"

namespace singrad {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int panels = 1;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1], positive half.
// Even-indexed nodes carry the embedded 7-point Gauss rule.
inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};

inline constexpr double kGK15Weights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};

inline constexpr double kGauss7Weights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct Panel {
    double a, b;
    double value;
    double error;
};

struct PanelWorse {
    bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

/// One GK15 evaluation on [a, b]; error estimate is |K15 - G7|.
template <class F>
Panel gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double kronrod = 0.0;
    double gauss = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double x = h * kGK15Nodes[i];
        const double fs = (i == 7) ? f(c) : f(c - x) + f(c + x);
        kronrod += kGK15Weights[i] * fs;
        if (i % 2 == 1) gauss += kGauss7Weights[i / 2] * fs;
    }
    kronrod *= h;
    gauss *= h;
    return Panel{a, b, kronrod, std::abs(kronrod - gauss)};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over [a, b].
/// Throws QuadratureError if the panel budget is exhausted before the
/// accumulated error estimate drops below max(abs_tol, rel_tol*|I|).
template <class F>
QuadratureResult integrate(const F& f, double a, double b, double rel_tol = 1e-12,
                           double abs_tol = 0.0, int max_panels = 8192) {
    if (a == b) return {0.0, 0.0, 0};
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    std::priority_queue<detail::Panel, std::vector<detail::Panel>, detail::PanelWorse> queue;
    detail::Panel first = detail::gk15(f, a, b);
    double total = first.value;
    double err = first.error;
    queue.push(first);
    int panels = 1;
    while (err > std::max(abs_tol, rel_tol * std::abs(total)) && panels < max_panels) {
        detail::Panel worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // interval at roundoff width, cannot refine further
            queue.push(detail::Panel{worst.a, worst.b, worst.value, 0.0});
            err -= worst.error;
            continue;
        }
        detail::Panel left = detail::gk15(f, worst.a, mid);
        detail::Panel right = detail::gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
        ++panels;
    }
    if (err > std::max(abs_tol, rel_tol * std::abs(total)) && std::abs(total) > 0.0) {
        throw QuadratureError("adaptive quadrature did not converge: error estimate " +
                              std::to_string(err) + " on [" + std::to_string(a) + ", " +
                              std::to_string(b) + "]");
    }
    return {sign * total, err, panels};
}

/// Integrate f over [a, b] with 0 < a < b via the substitution y = e^s.
/// Tames integrable power singularities at the left endpoint: the integrand
/// y^q dy becomes e^{(q+1)s} ds, smooth in s.
template <class F>
QuadratureResult integrate_log(const F& f, double a, double b, double rel_tol = 1e-12,
                               double abs_tol = 0.0, int max_panels = 8192) {
    if (a <= 0.0 || b <= 0.0) throw DomainError("integrate_log requires positive bounds");
    if (a == b) return {0.0, 0.0, 0};
    auto g = [&f](double s) {
        const double y = std::exp(s);
        return f(y) * y;
    };
    return integrate(g, std::log(a), std::log(b), rel_tol, abs_tol, max_panels);
}

} // namespace singrad
