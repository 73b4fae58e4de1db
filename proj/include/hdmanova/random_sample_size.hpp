#ifndef HDMANOVA_RANDOM_SAMPLE_SIZE_HPP
#define HDMANOVA_RANDOM_SAMPLE_SIZE_HPP

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "hdmanova/errors.hpp"
#include "hdmanova/null_distribution.hpp"
#include "hdmanova/special_functions.hpp"

namespace hdmanova {

// Law of the random overall sample size N before truncation.
struct count_model {
    enum class family { point_mass, poisson, binomial, negative_binomial };

    family fam = family::point_mass;
    double lambda = 0.0;  // poisson
    int n_star = 0;       // binomial trials
    int r_star = 0;       // negative binomial: trials until r_star-th success
    double prob = 0.0;    // binomial / negative binomial success probability
    int n0 = 0;           // point mass

    static count_model point_mass(int n) {
        count_model c;
        c.fam = family::point_mass;
        c.n0 = n;
        return c;
    }
    static count_model poisson(double lambda) {
        if (!(lambda > 0.0)) throw config_error("poisson count model: lambda must be > 0");
        count_model c;
        c.fam = family::poisson;
        c.lambda = lambda;
        return c;
    }
    static count_model binomial(int n_star, double prob) {
        if (n_star < 1) throw config_error("binomial count model: N* must be >= 1");
        if (!(prob > 0.0 && prob < 1.0)) throw config_error("binomial count model: p must be in (0,1)");
        count_model c;
        c.fam = family::binomial;
        c.n_star = n_star;
        c.prob = prob;
        return c;
    }
    static count_model negative_binomial(int r_star, double prob) {
        if (r_star < 1) throw config_error("negative binomial count model: r* must be >= 1");
        if (!(prob > 0.0 && prob < 1.0))
            throw config_error("negative binomial count model: p must be in (0,1)");
        count_model c;
        c.fam = family::negative_binomial;
        c.r_star = r_star;
        c.prob = prob;
        return c;
    }

    // P(N = n) without truncation; zero off the support.
    double pmf(int n) const {
        if (n < 0) return 0.0;
        switch (fam) {
            case family::point_mass:
                return n == n0 ? 1.0 : 0.0;
            case family::poisson:
                return std::exp(n * std::log(lambda) - lambda - std::lgamma(n + 1.0));
            case family::binomial: {
                if (n > n_star) return 0.0;
                const double log_choose =
                    std::lgamma(n_star + 1.0) - std::lgamma(n + 1.0) - std::lgamma(n_star - n + 1.0);
                return std::exp(log_choose + n * std::log(prob) + (n_star - n) * std::log1p(-prob));
            }
            case family::negative_binomial: {
                // trials until the r*-th success; support n >= r*
                if (n < r_star) return 0.0;
                const double log_choose =
                    std::lgamma(n + 0.0) - std::lgamma(static_cast<double>(r_star)) -
                    std::lgamma(n - r_star + 1.0);
                return std::exp(log_choose + r_star * std::log(prob) + (n - r_star) * std::log1p(-prob));
            }
        }
        return 0.0;
    }

    bool finite_support() const {
        return fam == family::point_mass || fam == family::binomial;
    }
    int support_max() const { return fam == family::binomial ? n_star : n0; }
};

// Truncated law of N on n >= q+1, renormalized by 1 - sum_{i=0}^{q} f_N(i).
struct truncated_weights {
    std::vector<int> support;      // strictly increasing, all >= q+1
    std::vector<double> weights;   // sum to 1
    double tail_mass_dropped = 0;  // un-normalized probability beyond the cutoff
};

inline truncated_weights make_truncated_weights(const count_model& cm, int q, double tail_eps = 1e-10) {
    if (q < 2) throw config_error("truncated_weights: need q >= 2");
    if (!(tail_eps > 0.0)) throw config_error("truncated_weights: tail_eps must be > 0");
    if (cm.fam == count_model::family::point_mass) {
        if (cm.n0 < q + 1) throw config_error("point-mass sample size must be >= q+1");
        truncated_weights tw;
        tw.support = {cm.n0};
        tw.weights = {1.0};
        tw.tail_mass_dropped = 0.0;
        return tw;
    }

    double below = 0.0;
    for (int i = 0; i <= q; ++i) below += cm.pmf(i);
    const double normalizer = 1.0 - below;
    if (!(normalizer > 1e-12))
        throw config_error("truncated_weights: essentially all count-model mass lies at n <= q");

    truncated_weights tw;
    double cum = below;
    const int hard_cap = cm.finite_support() ? cm.support_max() : 100000000;
    std::vector<double> raw;
    int n = q + 1;
    for (; n <= hard_cap; ++n) {
        const double f = cm.pmf(n);
        raw.push_back(f);
        tw.support.push_back(n);
        cum += f;
        if (!cm.finite_support() && 1.0 - cum < tail_eps) break;
        if (cm.finite_support() && n == hard_cap) break;
    }
    if (!cm.finite_support() && 1.0 - cum >= tail_eps)
        throw precision_error("truncated_weights: truncation point not reached");
    tw.tail_mass_dropped = cm.finite_support() ? 0.0 : std::max(0.0, 1.0 - cum);

    double retained = 0.0;
    for (double f : raw) retained += f;
    if (!(retained > 0.0)) throw config_error("truncated_weights: no mass above q");
    tw.weights.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) tw.weights[i] = raw[i] / retained;
    return tw;
}

// Mixture of the fixed-n null distributions of Lambda, weighted by the
// truncated law of N. One evaluator is cached per support point.
class mixture_distribution {
  public:
    mixture_distribution(const truncated_weights& tw, int q, int p, talbot_control ctrl = {})
        : tw_(tw) {
        if (tw.support.empty()) throw config_error("mixture: empty support");
        components_.reserve(tw.support.size());
        for (int n : tw.support)
            components_.push_back(std::make_unique<null_distribution>(beta_product_model(n, q, p), ctrl));
    }

    double cdf_w(double w, null_method method) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < components_.size(); ++i)
            acc += tw_.weights[i] * components_[i]->cdf_w(w, method);
        return acc;
    }

    double cdf_w_exact(double w) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < components_.size(); ++i)
            acc += tw_.weights[i] * components_[i]->cdf_w_exact(w);
        return acc;
    }

    double cdf_lambda(double z, null_method method) const {
        if (!(z > 0.0 && z < 1.0)) throw input_error("mixture cdf: z must be in (0,1)");
        return 1.0 - cdf_w(-std::log(z), method);
    }

    double cdf_lambda_exact(double z) const {
        if (!(z > 0.0 && z < 1.0)) throw input_error("mixture cdf: z must be in (0,1)");
        return 1.0 - cdf_w_exact(-std::log(z));
    }

    // Mixture of the Theorem-1 normal densities for W, evaluated on a grid.
    std::vector<double> normal_pdf_w(const std::vector<double>& grid) const {
        const double inv_sqrt_two_pi = 0.39894228040143267793994605993438;
        std::vector<double> out(grid.size(), 0.0);
        for (std::size_t i = 0; i < components_.size(); ++i) {
            const auto& ap = components_[i]->approx();
            const double sd = std::sqrt(ap.variance);
            for (std::size_t g = 0; g < grid.size(); ++g) {
                const double zscore = (grid[g] - ap.mean) / sd;
                out[g] += tw_.weights[i] * inv_sqrt_two_pi / sd * std::exp(-0.5 * zscore * zscore);
            }
        }
        return out;
    }

    double quantile_w(double alpha, null_method method) const {
        return bisect_quantile(alpha, [&](double w) { return cdf_w(w, method); });
    }

    double quantile_w_exact(double alpha) const {
        return bisect_quantile(alpha, [&](double w) { return cdf_w_exact(w); });
    }

    double quantile_lambda(double alpha, null_method method) const {
        return std::exp(-quantile_w(alpha, method));
    }

    double quantile_lambda_exact(double alpha) const { return std::exp(-quantile_w_exact(alpha)); }

    const truncated_weights& weights() const { return tw_; }

  private:
    template <typename Cdf>
    double bisect_quantile(double alpha, const Cdf& f) const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw input_error("mixture quantile: alpha in (0,1)");
        const double target = 1.0 - alpha;
        double lo = 0.0, hi = 1.0;
        while (f(hi) < target) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e9) throw precision_error("mixture quantile: failed to bracket");
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

    truncated_weights tw_;
    std::vector<std::unique_ptr<null_distribution>> components_;
};

inline double mixture_cdf_lambda(const truncated_weights& tw, int q, int p, double z,
                                 null_method method) {
    return mixture_distribution(tw, q, p).cdf_lambda(z, method);
}

inline std::vector<double> mixture_normal_pdf(const truncated_weights& tw, int q, int p,
                                              const std::vector<double>& w_grid) {
    return mixture_distribution(tw, q, p).normal_pdf_w(w_grid);
}

}  // namespace hdmanova

#endif
