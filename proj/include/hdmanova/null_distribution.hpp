#ifndef HDMANOVA_NULL_DISTRIBUTION_HPP
#define HDMANOVA_NULL_DISTRIBUTION_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "hdmanova/errors.hpp"
#include "hdmanova/gig.hpp"
#include "hdmanova/rng.hpp"
#include "hdmanova/special_functions.hpp"
#include "hdmanova/talbot.hpp"

namespace hdmanova {

// Null law of Lambda as a product of independent Beta factors:
//   Lambda = Y1 * Y2^{mod(p+1,2)} * prod_{j=2}^{p-m} (Y_j^*)^2
// with Y1, Y2 ~ Beta((n-q)/2, (q-1)/2) and Y_j^* ~ Beta(n-q, q-1).
struct beta_product_model {
    int n = 0, q = 0, p = 0;

    beta_product_model(int n_, int q_, int p_) : n(n_), q(q_), p(p_) {
        if (q < 2) throw input_error("beta_product_model: need q >= 2");
        if (p < 1) throw invalid_dimension_error("beta_product_model: need p >= 1");
        if (n <= q) throw insufficient_sample_error("beta_product_model: need n > q");
    }

    int m() const { return p / 2; }
    int n_single() const { return 1 + (p + 1) % 2; }
    int n_paired() const { return p - m() - 1; }

    double single_a() const { return 0.5 * (n - q); }
    double single_b() const { return 0.5 * (q - 1); }
    double paired_a() const { return static_cast<double>(n - q); }
    double paired_b() const { return static_cast<double>(q - 1); }
};

// Exact mean/variance of W = -log Lambda (Lyapunov CLT limit for large p).
struct normal_approx {
    double mean = 0.0;
    double variance = 0.0;
};

inline normal_approx make_normal_approx(int n, int q, int p) {
    const beta_product_model model(n, q, p);
    const double mu = digamma(0.5 * (n - 1)) - digamma(0.5 * (n - q));
    const double mu_star = digamma(n - 1.0) - digamma(static_cast<double>(n - q));
    const double s2 = trigamma(0.5 * (n - q)) - trigamma(0.5 * (n - 1));
    const double s2_star = trigamma(static_cast<double>(n - q)) - trigamma(n - 1.0);
    normal_approx approx;
    approx.mean = model.n_single() * mu + 2.0 * model.n_paired() * mu_star;
    approx.variance = model.n_single() * s2 + 4.0 * model.n_paired() * s2_star;
    return approx;
}

inline normal_approx make_normal_approx(const beta_product_model& model) {
    return make_normal_approx(model.n, model.q, model.p);
}

// Characteristic function of W:
//   Phi_W(t) = [G((n-1)/2) G((n-q)/2 - it) / (G((n-q)/2) G((n-1)/2 - it))]^{n_single}
//            * [G(n-1) G(n-q - 2it)      / (G(n-q) G(n-1 - 2it))]^{n_paired}
// The second factor follows from E[Y^{-2it}] for Y ~ Beta(n-q, q-1).
inline std::complex<double> cf_w(const beta_product_model& model, double t) {
    const std::complex<double> it(0.0, t);
    const double a1 = model.single_a(), ab1 = a1 + model.single_b();
    const double a2 = model.paired_a(), ab2 = a2 + model.paired_b();
    std::complex<double> log_cf =
        static_cast<double>(model.n_single()) *
            (ln_gamma(ab1) + detail::ln_gamma_any(std::complex<double>(a1, 0) - it) - ln_gamma(a1) -
             detail::ln_gamma_any(std::complex<double>(ab1, 0) - it)) +
        static_cast<double>(model.n_paired()) *
            (ln_gamma(ab2) + detail::ln_gamma_any(std::complex<double>(a2, 0) - 2.0 * it) - ln_gamma(a2) -
             detail::ln_gamma_any(std::complex<double>(ab2, 0) - 2.0 * it));
    return std::exp(log_cf);
}

// CF of the matching GIG representation, prod (1 - it/rate)^{-shape}; used as
// the analytic bridge between the Beta-product form and the EGIG form.
inline std::complex<double> cf_gig(const gig_representation& rep, double t) {
    std::complex<double> log_cf(0.0, 0.0);
    for (int i = 0; i < rep.depth(); ++i) {
        const std::complex<double> base(1.0, -t / rep.rates[i]);
        log_cf -= static_cast<double>(rep.shapes[i]) * std::log(base);
    }
    return std::exp(log_cf);
}

namespace detail {

// Laplace transform of the density of W, E[e^{-sW}], in extended precision.
// This is cf_w with it -> -s, analytically continued.
inline complex_ld laplace_w(const beta_product_model& model, complex_ld s) {
    const long double a1 = model.single_a(), ab1 = a1 + model.single_b();
    const long double a2 = model.paired_a(), ab2 = a2 + model.paired_b();
    complex_ld log_val =
        static_cast<long double>(model.n_single()) *
            (ln_gamma_any(complex_ld(ab1, 0)) + ln_gamma_any(complex_ld(a1, 0) + s) -
             ln_gamma_any(complex_ld(a1, 0)) - ln_gamma_any(complex_ld(ab1, 0) + s)) +
        static_cast<long double>(model.n_paired()) *
            (ln_gamma_any(complex_ld(ab2, 0)) + ln_gamma_any(complex_ld(a2, 0) + 2.0L * s) -
             ln_gamma_any(complex_ld(a2, 0)) - ln_gamma_any(complex_ld(ab2, 0) + 2.0L * s));
    return std::exp(log_val);
}

}  // namespace detail

// CDF of W by fixed-Talbot inversion of E[e^{-sW}]/s.
inline double cdf_w_by_inversion(const beta_product_model& model, double w,
                                 const talbot_control& ctrl = {}) {
    if (!(w >= 0.0)) throw input_error("cdf_w_by_inversion: w must be >= 0");
    if (w < 1e-300) return 0.0;
    const double value = talbot_invert(
        [&](detail::complex_ld s) { return detail::laplace_w(model, s) / s; }, w, ctrl);
    return value < 0.0 ? 0.0 : (value > 1.0 ? 1.0 : value);
}

enum class null_method { exact_egig, cf_inversion, asymptotic };

// i.i.d. draws of W; deterministic per (seed, index), so callers may shard
// the index range across threads.
inline std::vector<double> mc_sample_w(const beta_product_model& model, std::size_t count,
                                       std::uint64_t seed) {
    if (count == 0) throw empty_request_error("mc_sample_w: count must be >= 1");
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        auto engine = make_engine(derive_seed(seed, i));
        std::gamma_distribution<double> ga1(model.single_a(), 1.0), gb1(model.single_b(), 1.0);
        std::gamma_distribution<double> ga2(model.paired_a(), 1.0), gb2(model.paired_b(), 1.0);
        double w = 0.0;
        for (int k = 0; k < model.n_single(); ++k) {
            const double x = ga1(engine), y = gb1(engine);
            w -= std::log(x) - std::log(x + y);
        }
        for (int k = 0; k < model.n_paired(); ++k) {
            const double x = ga2(engine), y = gb2(engine);
            w -= 2.0 * (std::log(x) - std::log(x + y));
        }
        out[i] = w;
    }
    return out;
}

// One evaluator object per model; caches the EGIG expansion so repeated CDF
// and quantile calls stay cheap.
class null_distribution {
  public:
    explicit null_distribution(const beta_product_model& model, talbot_control ctrl = {})
        : model_(model), ctrl_(ctrl) {
        if (model.q % 2 == 1) gig_.emplace(make_gig_representation(model.n, model.q, model.p));
        approx_ = make_normal_approx(model);
    }

    const beta_product_model& model() const { return model_; }
    const normal_approx& approx() const { return approx_; }

    double cdf_w(double w, null_method method) const {
        switch (method) {
            case null_method::exact_egig:
                if (!gig_) throw unsupported_parity_error("exact EGIG form requires odd q");
                return gig_->cdf_w(w);
            case null_method::cf_inversion:
                return cdf_w_by_inversion(model_, w, ctrl_);
            case null_method::asymptotic:
                if (!(w >= 0.0)) throw input_error("cdf_w: w must be >= 0");
                return normal_cdf((w - approx_.mean) / std::sqrt(approx_.variance));
        }
        throw input_error("cdf_w: unknown method");
    }

    // Exact path with automatic parity dispatch: EGIG when available, CF
    // inversion otherwise.
    double cdf_w_exact(double w) const {
        return gig_ ? gig_->cdf_w(w) : cdf_w_by_inversion(model_, w, ctrl_);
    }

    double p_value(double w_obs, null_method method) const {
        const double p = 1.0 - cdf_w(w_obs, method);
        return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
    }

    // Lambda_alpha with F_Lambda(Lambda_alpha) = alpha, i.e. the rejection
    // threshold at level alpha (reject when Lambda <= Lambda_alpha).
    double quantile_lambda(double alpha, null_method method) const {
        return std::exp(-quantile_w(alpha, method));
    }

    // Upper-tail threshold on the W scale: F_W(w_alpha) = 1 - alpha.
    double quantile_w(double alpha, null_method method) const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw input_error("quantile: alpha must be in (0,1)");
        if (method == null_method::asymptotic)
            return approx_.mean + std::sqrt(approx_.variance) * normal_quantile(1.0 - alpha);
        const double target = 1.0 - alpha;
        auto f = [&](double w) { return cdf_w(w, method); };
        double lo = 0.0, hi = approx_.mean + 10.0 * std::sqrt(approx_.variance);
        while (f(hi) < target) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e9) throw precision_error("quantile: failed to bracket");
        }
        for (int iter = 0; iter < 120; ++iter) {
            const double mid = 0.5 * (lo + hi);
            const double val = f(mid);
            if (std::fabs(val - target) < 1e-10) return mid;
            if (val < target)
                lo = mid;
            else
                hi = mid;
            if ((hi - lo) < 1e-12 * (1.0 + mid)) break;
        }
        return 0.5 * (lo + hi);
    }

  private:
    beta_product_model model_;
    talbot_control ctrl_;
    std::optional<gig_series> gig_;
    normal_approx approx_;
};

// Controls for the Delta integral quadrature.
struct delta_control {
    double tail_tol = 1e-10;
    double quad_tol = 1e-10;
    double t_max = 1e6;
};

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                               double fm, double fb, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0) return left + right;
    if (std::fabs(left + right - whole) < 15.0 * tol) return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    return adaptive_simpson(f, a, b, f(a), f(m), f(b), tol, 48);
}

// (1/pi) * int_0^inf |cf(t) - e^{-t^2/2}| / t dt with a power-law tail bound
// |cf(t)| <= |cf(T)| (T/t)^kappa for t >= T.
inline double cf_normal_distance(const std::function<std::complex<double>(double)>& cf, double kappa,
                                 const delta_control& ctrl) {
    auto integrand = [&](double t) {
        if (t < 1e-8) return 0.0;
        return std::abs(cf(t) - std::exp(-0.5 * t * t)) / t;
    };
    const double pi = 3.141592653589793238462643383279503;
    double total = 0.0;
    double lo = 0.0, hi = 4.0;
    for (int seg = 0; seg < 64; ++seg) {
        total += integrate(integrand, lo, hi, ctrl.quad_tol * 0.25);
        const double cf_tail = std::abs(cf(hi)) / kappa + std::exp(-0.5 * hi * hi) / (hi * hi);
        if (cf_tail < ctrl.tail_tol) return total / pi;
        lo = hi;
        hi *= 2.0;
        if (hi > ctrl.t_max) break;
    }
    throw precision_error("delta_measure: quadrature tail failed to reach tolerance");
}

}  // namespace detail

// Delta = (1/2pi) int |Phi_Z(t) - Phi(t)| / |t| dt, with Phi_Z the CF of the
// standardized W and Phi the standard normal CF; upper bound on the
// sup-distance between the exact and asymptotic CDFs.
inline double delta_measure(const beta_product_model& model, const delta_control& ctrl = {}) {
    const normal_approx approx = make_normal_approx(model);
    const double sd = std::sqrt(approx.variance);
    auto cf_std = [&](double t) -> std::complex<double> {
        return cf_w(model, t / sd) * std::exp(std::complex<double>(0.0, -t * approx.mean / sd));
    };
    const double kappa =
        model.n_single() * 0.5 * (model.q - 1) + model.n_paired() * static_cast<double>(model.q - 1);
    return detail::cf_normal_distance(cf_std, kappa, ctrl);
}

}  // namespace hdmanova

#endif
