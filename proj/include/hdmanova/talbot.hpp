#ifndef HDMANOVA_TALBOT_HPP
#define HDMANOVA_TALBOT_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "hdmanova/errors.hpp"

namespace hdmanova {

// Controls for the fixed-Talbot inversion. The value is computed on a ladder
// of node counts; two consecutive node counts must agree to match_tol before
// a value is accepted. Extended precision keeps the e^{2M/5} round-off
// amplification of the larger node counts in check.
struct talbot_control {
    double match_tol = 2e-9;
    int max_nodes = 96;
};

namespace detail {

using complex_ld = std::complex<long double>;

// One fixed-Talbot evaluation of f(t) = L^{-1}{transform}(t) with M nodes and
// contour parameter r = 2M/(5t).
template <typename Transform>
long double talbot_once(const Transform& transform, long double t, int m_nodes) {
    const long double pi = 3.14159265358979323846264338327950288L;
    const long double r = 2.0L * m_nodes / (5.0L * t);
    long double total = 0.5L * std::exp(r * t) * (transform(complex_ld(r, 0)).real());
    for (int k = 1; k < m_nodes; ++k) {
        const long double theta = k * pi / m_nodes;
        const long double cot = std::cos(theta) / std::sin(theta);
        const complex_ld s(r * theta * cot, r * theta);
        const long double sigma = theta + (theta * cot - 1.0L) * cot;
        const complex_ld val = std::exp(s * t) * transform(s) * complex_ld(1.0L, sigma);
        total += val.real();
    }
    return total * r / m_nodes;
}

}  // namespace detail

// Inverts a Laplace transform at t > 0. The transform must be analytic to the
// right of its singularities on the negative real axis (true for the
// Gamma-ratio transforms used here).
template <typename Transform>
double talbot_invert(const Transform& transform, double t, const talbot_control& ctrl = {}) {
    if (!(t > 0.0)) throw input_error("talbot_invert: t must be positive");
    static const int ladder[] = {24, 32, 48, 64, 96};
    long double prev = detail::talbot_once(transform, t, ladder[0]);
    for (std::size_t i = 1; i < sizeof(ladder) / sizeof(ladder[0]); ++i) {
        if (ladder[i] > ctrl.max_nodes) break;
        const long double cur = detail::talbot_once(transform, t, ladder[i]);
        if (std::fabs(static_cast<double>(cur - prev)) <= ctrl.match_tol)
            return static_cast<double>(cur);
        prev = cur;
    }
    throw precision_error("talbot_invert: node ladder failed to converge");
}

}  // namespace hdmanova

#endif
