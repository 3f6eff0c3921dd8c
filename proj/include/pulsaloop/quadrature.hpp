#ifndef PULSALOOP_QUADRATURE_HPP
#define PULSALOOP_QUADRATURE_HPP

/**
 * @file quadrature.hpp
 * @brief Adaptive Simpson quadrature over a fixed panel partition.
 *
 * The interval is first cut into `panels` equal pieces; each piece is refined
 * recursively until the Simpson estimates on the two halves agree with the
 * whole-panel estimate to within 15× the local tolerance, then Richardson
 * extrapolated. The integrand may return any type supporting +, −, scalar *
 * and a `magnitude` overload (double and std::array<double, K> are provided).
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "pulsaloop/error.hpp"

namespace pulsaloop::quadrature {

inline double magnitude(double v) { return std::abs(v); }

template <std::size_t K>
double magnitude(const std::array<double, K>& v) {
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

template <std::size_t K>
std::array<double, K> operator+(std::array<double, K> a, const std::array<double, K>& b) {
    for (std::size_t i = 0; i < K; ++i) a[i] += b[i];
    return a;
}

template <std::size_t K>
std::array<double, K> operator-(std::array<double, K> a, const std::array<double, K>& b) {
    for (std::size_t i = 0; i < K; ++i) a[i] -= b[i];
    return a;
}

template <std::size_t K>
std::array<double, K> operator*(double s, std::array<double, K> a) {
    for (double& x : a) x *= s;
    return a;
}

struct SimpsonOptions {
    double abs_tol = 1e-12;   ///< total absolute tolerance over the whole interval
    std::size_t panels = 1;   ///< initial equal partition
    int max_depth = 40;
};

namespace detail {

template <typename F, typename V>
V simpson_recurse(const F& f, double a, double b, const V& fa, const V& fm, const V& fb, const V& whole,
                  double tol, int depth, int max_depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const V flm = f(lm);
    const V frm = f(rm);
    // Use the rounded sub-widths so each child estimate is consistent with its own recursion.
    const V left = ((m - a) / 6.0) * (fa + 4.0 * flm + fm);
    const V right = ((b - m) / 6.0) * (fm + 4.0 * frm + fb);
    const V both = left + right;
    const V diff = both - whole;
    if (magnitude(diff) <= 15.0 * tol) {
        return both + (1.0 / 15.0) * diff;
    }
    if (depth >= max_depth) {
        throw numerical_error("adaptive Simpson: no convergence on [" + std::to_string(a) + ", " +
                              std::to_string(b) + "] at depth " + std::to_string(depth) +
                              ", residual " + std::to_string(magnitude(diff)) + " vs tolerance " +
                              std::to_string(15.0 * tol));
    }
    return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth) +
           simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace detail

template <typename F>
auto adaptive_simpson(const F& f, double a, double b, const SimpsonOptions& opt = {}) {
    using V = decltype(f(a));
    const std::size_t panels = opt.panels == 0 ? 1 : opt.panels;
    const double width = (b - a) / static_cast<double>(panels);
    const double panel_tol = opt.abs_tol / static_cast<double>(panels);
    V total = 0.0 * f(a);
    V f_left = f(a);
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + width * static_cast<double>(p);
        const double hi = (p + 1 == panels) ? b : a + width * static_cast<double>(p + 1);
        const double mid = 0.5 * (lo + hi);
        const V f_mid = f(mid);
        const V f_right = f(hi);
        const V whole = ((hi - lo) / 6.0) * (f_left + 4.0 * f_mid + f_right);
        total = total + detail::simpson_recurse(f, lo, hi, f_left, f_mid, f_right, whole, panel_tol, 0,
                                                opt.max_depth);
        f_left = f_right;
    }
    return total;
}

}  // namespace pulsaloop::quadrature

#endif  // PULSALOOP_QUADRATURE_HPP
