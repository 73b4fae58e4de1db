#ifndef HDMANOVA_GIG_HPP
#define HDMANOVA_GIG_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "hdmanova/errors.hpp"
#include "hdmanova/special_functions.hpp"

namespace hdmanova {

// Sum of independent Gamma variables with integer shapes r_l and pairwise
// distinct rates; the law of W = -log Lambda for odd q.
struct gig_representation {
    std::vector<int> shapes;
    std::vector<double> rates;

    int depth() const { return static_cast<int>(shapes.size()); }

    void validate() const {
        if (shapes.empty() || shapes.size() != rates.size())
            throw input_error("gig_representation: shapes/rates mismatch");
        for (std::size_t i = 0; i < shapes.size(); ++i) {
            if (shapes[i] < 1) throw input_error("gig_representation: shapes must be positive integers");
            if (!(rates[i] > 0.0)) throw input_error("gig_representation: rates must be positive");
            if (i > 0 && !(rates[i] > rates[i - 1]))
                throw input_error("gig_representation: rates must be strictly increasing");
        }
    }
};

// Depth q-1 representation of W for odd q: shape floor(p/2)+1 at odd levels,
// p - floor(p/2) - 1 at even levels, rate (n-q+l-1)/2 at level l.
inline gig_representation make_gig_representation(int n, int q, int p) {
    if (q < 3 || q % 2 == 0)
        throw unsupported_parity_error("gig representation requires odd q >= 3; use CF inversion for even q");
    if (n <= q) throw insufficient_sample_error("gig representation requires n > q");
    if (p < 1) throw invalid_dimension_error("gig representation requires p >= 1");
    gig_representation rep;
    const int m = p / 2;
    for (int l = 1; l <= q - 1; ++l) {
        rep.shapes.push_back(l % 2 == 1 ? m + 1 : p - m - 1);
        rep.rates.push_back(0.5 * (n - q + l - 1));
    }
    // p - m - 1 == 0 happens only for p <= 2, where even levels would carry
    // shape zero; drop them (a Gamma with shape 0 is a point mass at 0).
    gig_representation out;
    for (int i = 0; i < rep.depth(); ++i) {
        if (rep.shapes[i] > 0) {
            out.shapes.push_back(rep.shapes[i]);
            out.rates.push_back(rep.rates[i]);
        }
    }
    out.validate();
    return out;
}

// Evaluates the GIG distribution by expanding it into an infinite mixture of
// Gamma(rho + k, rate_max) components with nonnegative weights.  All terms are
// positive, so the evaluation is cancellation-free; truncation error is
// bounded by the dropped mixture weight.
class gig_series {
  public:
    explicit gig_series(const gig_representation& rep, double weight_tol = 1e-14) {
        rep.validate();
        const std::size_t d = rep.shapes.size();
        rate_max_ = rep.rates.back();
        rho_ = 0.0;
        for (int s : rep.shapes) rho_ += s;
        double log_c = 0.0;
        std::vector<double> u(d);
        for (std::size_t j = 0; j < d; ++j) {
            u[j] = 1.0 - rep.rates[j] / rate_max_;
            log_c += rep.shapes[j] * std::log(rep.rates[j] / rate_max_);
        }
        const double c0 = std::exp(log_c);

        std::vector<double> deltas{1.0};
        std::vector<double> g;  // g[i-1] = sum_j r_j u_j^i
        std::vector<double> upow(u);
        weights_.push_back(c0);
        double acc = c0;
        const std::size_t k_max = 200000;
        while (acc < 1.0 - weight_tol && deltas.size() < k_max) {
            double gi = 0.0;
            for (std::size_t j = 0; j < d; ++j) gi += rep.shapes[j] * upow[j];
            g.push_back(gi);
            for (std::size_t j = 0; j < d; ++j) upow[j] *= u[j];
            const std::size_t k = deltas.size();
            double dk = 0.0;
            for (std::size_t i = 1; i <= k; ++i) dk += g[i - 1] * deltas[k - i];
            dk /= static_cast<double>(k);
            deltas.push_back(dk);
            weights_.push_back(c0 * dk);
            acc += c0 * dk;
        }
        if (acc < 1.0 - 1e-9)
            throw precision_error("gig_series: mixture expansion failed to converge");
    }

    double cdf_w(double w) const {
        if (!(w >= 0.0)) throw input_error("gig cdf: w must be >= 0");
        if (w == 0.0) return 0.0;
        const double x = rate_max_ * w;
        double p = gamma_p(rho_, x);
        double t = std::exp(rho_ * std::log(x) - x - std::lgamma(rho_ + 1.0));
        double f = 0.0, a = rho_;
        for (double wk : weights_) {
            f += wk * p;
            p -= t;
            if (p < 0.0) p = 0.0;
            a += 1.0;
            t *= x / a;
        }
        return f < 0.0 ? 0.0 : (f > 1.0 ? 1.0 : f);
    }

    double pdf_w(double w) const {
        if (!(w >= 0.0)) throw input_error("gig pdf: w must be >= 0");
        if (w == 0.0) return 0.0;
        const double x = rate_max_ * w;
        double t = rate_max_ * std::exp((rho_ - 1.0) * std::log(x) - x - std::lgamma(rho_));
        double f = 0.0, a = rho_;
        for (double wk : weights_) {
            f += wk * t;
            t *= x / a;
            a += 1.0;
        }
        return f;
    }

    // F_Lambda(z) = P(e^{-W} <= z) = 1 - F_W(-log z)
    double cdf_lambda(double z) const {
        if (!(z > 0.0 && z < 1.0)) throw input_error("egig cdf: z must be in (0,1)");
        return 1.0 - cdf_w(-std::log(z));
    }

    std::size_t term_count() const { return weights_.size(); }

  private:
    double rate_max_ = 0.0;
    double rho_ = 0.0;
    std::vector<double> weights_;
};

inline double gig_cdf_w(const gig_representation& rep, double w) { return gig_series(rep).cdf_w(w); }

inline double egig_cdf_lambda(const gig_representation& rep, double z) {
    return gig_series(rep).cdf_lambda(z);
}

}  // namespace hdmanova

#endif
