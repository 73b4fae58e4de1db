// Test-side reference implementations, kept independent of the library code
// paths they are used to check.
#ifndef HDMANOVA_TESTS_REFERENCE_HPP
#define HDMANOVA_TESTS_REFERENCE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

namespace reference {

// Regularized incomplete beta by the textbook continued fraction
// (modified Lentz), independent of any library special-function code.
inline double incomplete_beta_cf(double x, double a, double b) {
    const double tiny = 1e-300;
    auto numer = [&](int n) -> double {
        if (n % 2 == 0) {
            double m = n / 2;
            return m * (b - m) * x / ((a + 2 * m - 1) * (a + 2 * m));
        }
        double m = (n - 1) / 2;
        return -(a + m) * (a + b + m) * x / ((a + 2 * m) * (a + 2 * m + 1));
    };
    double ret = 1.0, c = ret, d = 0.0;
    for (int n = 1; n < 100000; ++n) {
        double nn = numer(n);
        d = 1.0 + nn * d;
        if (d == 0.0) d = tiny;
        c = 1.0 + nn / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        double mult = c * d;
        ret *= mult;
        if (std::fabs(mult - 1.0) <= 1e-15) break;
    }
    return ret;
}

inline double beta_cdf(double x, double a, double b) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    if (x <= (a + 1.0) / (a + b + 2.0))
        return std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta) / a / incomplete_beta_cf(x, a, b);
    return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - lbeta) / b /
                     incomplete_beta_cf(1.0 - x, b, a);
}

inline double beta_quantile(double prob, double a, double b) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (beta_cdf(mid, a, b) < prob ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
inline double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::fabs(f - (i + 1) / n));
        d = std::max(d, std::fabs(f - i / n));
    }
    return d;
}

// Complex-valued adaptive Simpson, for the quadrature oracle of log Gamma.
inline std::complex<double> simpson_complex(const std::function<std::complex<double>(double)>& f,
                                            double a, double b, int panels) {
    std::complex<double> acc(0.0, 0.0);
    const double h = (b - a) / panels;
    for (int i = 0; i < panels; ++i) {
        const double x0 = a + i * h, x1 = x0 + 0.5 * h, x2 = x0 + h;
        acc += (h / 6.0) * (f(x0) + 4.0 * f(x1) + f(x2));
    }
    return acc;
}

// Gamma(z) = int_0^inf t^{z-1} e^{-t} dt, brute-force quadrature after the
// substitution t = e^u (which makes the phase linear near the origin).
inline std::complex<double> gamma_by_quadrature(std::complex<double> z) {
    auto integrand = [&](double u) -> std::complex<double> {
        return std::exp(z * u - std::exp(u));
    };
    return simpson_complex(integrand, -30.0, 6.0, 100000);
}

inline double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

inline double variance(const std::vector<double>& v) {
    const double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return acc / (v.size() - 1.0);
}

inline double central_moment(const std::vector<double>& v, int order) {
    const double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += std::pow(x - m, order);
    return acc / v.size();
}

inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) r[idx[i]] = static_cast<double>(i + 1);
    return r;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    return pearson(ranks(x), ranks(y));
}

// Minimal own-hands uniform / normal generators for marginal reference
// sampling (xorshift + Box-Muller), distinct from the library's samplers.
struct simple_rng {
    std::uint64_t state;
    explicit simple_rng(std::uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
    std::uint64_t next() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return state;
    }
    double uniform() { return (next() >> 11) * 0x1.0p-53; }
    double normal() {
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 1e-16) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }
    double gamma(double shape) {
        // Marsaglia-Tsang for shape >= 1; boost by one for shape < 1
        if (shape < 1.0) {
            const double u = uniform();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }
    double chisq(double nu) { return 2.0 * gamma(0.5 * nu); }
    double beta(double a, double b) {
        const double x = gamma(a);
        return x / (x + gamma(b));
    }
};

}  // namespace reference

#endif
