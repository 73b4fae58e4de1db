#ifndef HDMANOVA_COMPETITORS_HPP
#define HDMANOVA_COMPETITORS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "hdmanova/errors.hpp"
#include "hdmanova/special_functions.hpp"
#include "hdmanova/statistic.hpp"

namespace hdmanova {

// Result of one of the comparison tests. fujikoshi / schott / chen_qin use a
// standard normal reference (upper tail); zhang uses a scaled chi-square,
// T ~ beta * chi2_d, reported through its Gamma parameters d and beta.
struct competitor_result {
    std::string name;
    double statistic = 0.0;
    bool gamma_reference = false;
    double gamma_d = 0.0;
    double gamma_beta = 0.0;
    double p_value = 1.0;
};

namespace detail {

// Unbiased estimator of tr(Sigma^2) from a Wishart(m, Sigma) scatter matrix.
inline double trace_sigma2_hat(const Eigen::MatrixXd& scatter, int m) {
    if (m < 2) throw insufficient_sample_error("trace estimator needs at least 2 error d.f.");
    const double tr = scatter.trace();
    const double tr2 = (scatter * scatter).trace();
    return (tr2 - tr * tr / m) / (static_cast<double>(m + 2) * (m - 1));
}

struct trace_test_parts {
    double numerator;  // tr(B)/(q-1) - tr(A)/(n-q)
    double sd;         // sqrt(2 (n-1)/((q-1)(n-q)) a2_hat)
    double trace_se;   // tr(A)/(n-q)
};

inline trace_test_parts trace_test_core(const grouped_sample& s) {
    const int n = s.n(), q = s.q();
    const int h = q - 1, m = n - q;
    if (m < 2) throw insufficient_sample_error("trace tests need n - q >= 2");
    const Eigen::MatrixXd a = within_scatter(s);
    const Eigen::MatrixXd b = between_scatter(s);
    const double a2 = trace_sigma2_hat(a, m);
    if (!(a2 > 0.0))
        throw estimation_degenerate_error("trace tests: nonpositive tr(Sigma^2) estimate (degenerate data)");
    trace_test_parts parts;
    parts.numerator = b.trace() / h - a.trace() / m;
    parts.sd = std::sqrt(2.0 * (n - 1) / (static_cast<double>(h) * m) * a2);
    parts.trace_se = a.trace() / m;
    return parts;
}

}  // namespace detail

// Dempster-type trace statistic, computed in ratio form
// (tr(B)/h / (tr(A)/m) - 1) / sd_ratio with the unbiased tr(Sigma^2)
// estimator. Algebraically identical to the difference form below.
inline competitor_result fujikoshi_stat(const grouped_sample& s) {
    const auto parts = detail::trace_test_core(s);
    if (!(parts.trace_se > 0.0))
        throw estimation_degenerate_error("fujikoshi: zero within-group trace");
    const double ratio = parts.numerator / parts.trace_se;  // tr(Sh)/tr(Se) - 1
    const double sd_ratio = parts.sd / parts.trace_se;
    competitor_result res;
    res.name = "fujikoshi";
    res.statistic = ratio / sd_ratio;
    res.p_value = 1.0 - normal_cdf(res.statistic);
    return res;
}

// t_np = tr(B)/(q-1) - tr(A)/(n-q), standardized by the estimated null
// standard deviation sqrt(2 (n-1)/((q-1)(n-q)) tr(Sigma^2)-hat).
inline competitor_result schott_stat(const grouped_sample& s) {
    const auto parts = detail::trace_test_core(s);
    competitor_result res;
    res.name = "schott";
    res.statistic = parts.numerator / parts.sd;
    res.p_value = 1.0 - normal_cdf(res.statistic);
    return res;
}

// Two-sample statistic without cross-product self-terms, standardized by the
// leave-out trace estimators. Only defined for q = 2. Observations are
// centered by the pooled mean first, which leaves the statistic unchanged and
// makes the variance estimate exactly shift invariant.
inline competitor_result chen_qin_stat(const grouped_sample& s) {
    if (s.q() != 2) throw unsupported_design_error("chen_qin: only applicable to two populations");
    const int n1 = static_cast<int>(s.groups[0].rows());
    const int n2 = static_cast<int>(s.groups[1].rows());
    if (n1 < 2 || n2 < 2) throw insufficient_sample_error("chen_qin: need n_k >= 2 in both groups");
    if (n1 < 3 || n2 < 3)
        throw estimation_degenerate_error(
            "chen_qin: variance estimator needs n_k >= 3 (leave-two-out mean undefined)");

    const Eigen::RowVectorXd pooled =
        (s.groups[0].colwise().sum() + s.groups[1].colwise().sum()) / (n1 + n2);
    const Eigen::MatrixXd x1 = s.groups[0].rowwise() - pooled;
    const Eigen::MatrixXd x2 = s.groups[1].rowwise() - pooled;

    const Eigen::MatrixXd g11 = x1 * x1.transpose();
    const Eigen::MatrixXd g22 = x2 * x2.transpose();
    const Eigen::MatrixXd g12 = x1 * x2.transpose();
    const double t_stat = (g11.sum() - g11.trace()) / (static_cast<double>(n1) * (n1 - 1)) +
                          (g22.sum() - g22.trace()) / (static_cast<double>(n2) * (n2 - 1)) -
                          2.0 * g12.sum() / (static_cast<double>(n1) * n2);

    auto tr_sigma2 = [](const Eigen::MatrixXd& x) {
        const int nn = static_cast<int>(x.rows());
        const Eigen::RowVectorXd tot = x.colwise().sum();
        double acc = 0.0;
        for (int j = 0; j < nn; ++j) {
            for (int k = 0; k < nn; ++k) {
                if (j == k) continue;
                const Eigen::RowVectorXd mjk = (tot - x.row(j) - x.row(k)) / (nn - 2);
                acc += x.row(j).dot(x.row(k) - mjk) * x.row(k).dot(x.row(j) - mjk);
            }
        }
        return acc / (static_cast<double>(nn) * (nn - 1));
    };
    auto tr_sigma12 = [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
        const int nx = static_cast<int>(x.rows()), ny = static_cast<int>(y.rows());
        const Eigen::RowVectorXd totx = x.colwise().sum();
        const Eigen::RowVectorXd toty = y.colwise().sum();
        double acc = 0.0;
        for (int j = 0; j < nx; ++j) {
            const Eigen::RowVectorXd mx = (totx - x.row(j)) / (nx - 1);
            for (int k = 0; k < ny; ++k) {
                const Eigen::RowVectorXd my = (toty - y.row(k)) / (ny - 1);
                acc += x.row(j).dot(y.row(k) - my) * y.row(k).dot(x.row(j) - mx);
            }
        }
        return acc / (static_cast<double>(nx) * ny);
    };

    const double t1 = tr_sigma2(x1), t2 = tr_sigma2(x2), t12 = tr_sigma12(x1, x2);
    const double variance = 2.0 / (static_cast<double>(n1) * (n1 - 1)) * t1 +
                            2.0 / (static_cast<double>(n2) * (n2 - 1)) * t2 +
                            4.0 / (static_cast<double>(n1) * n2) * t12;
    if (!(variance > 0.0))
        throw estimation_degenerate_error("chen_qin: nonpositive variance estimate");

    competitor_result res;
    res.name = "chen_qin";
    res.statistic = t_stat / std::sqrt(variance);
    res.p_value = 1.0 - normal_cdf(res.statistic);
    return res;
}

// ||xbar_1 - xbar_2||^2 referred to the fitted beta * chi2_d law, with d and
// beta estimated by moment matching from the normal-reference variance of the
// statistic. Only defined for q = 2.
inline competitor_result zhang_stat(const grouped_sample& s) {
    if (s.q() != 2) throw unsupported_design_error("zhang: only applicable to two populations");
    const int n1 = static_cast<int>(s.groups[0].rows());
    const int n2 = static_cast<int>(s.groups[1].rows());
    if (n1 < 2 || n2 < 2) throw insufficient_sample_error("zhang: need n_k >= 2 in both groups");
    if (n1 < 3 || n2 < 3)
        throw estimation_degenerate_error("zhang: parameter estimation needs n_k >= 3");

    const Eigen::RowVectorXd mean1 = s.groups[0].colwise().mean();
    const Eigen::RowVectorXd mean2 = s.groups[1].colwise().mean();
    const double t_stat = (mean1 - mean2).squaredNorm();

    auto sample_cov = [](const Eigen::MatrixXd& g) {
        const Eigen::MatrixXd centered = g.rowwise() - g.colwise().mean();
        return Eigen::MatrixXd((centered.transpose() * centered) / (g.rows() - 1.0));
    };
    const Eigen::MatrixXd s1 = sample_cov(s.groups[0]);
    const Eigen::MatrixXd s2 = sample_cov(s.groups[1]);

    auto tr_sigma2_from_cov = [](const Eigen::MatrixXd& cov, int nu) {
        const double tr = cov.trace();
        const double tr2 = (cov * cov).trace();
        return static_cast<double>(nu) * nu / (static_cast<double>(nu + 2) * (nu - 1)) *
               (tr2 - tr * tr / nu);
    };

    const double tr_sn = s1.trace() / n1 + s2.trace() / n2;
    const double tr_sn2 = tr_sigma2_from_cov(s1, n1 - 1) / (static_cast<double>(n1) * n1) +
                          tr_sigma2_from_cov(s2, n2 - 1) / (static_cast<double>(n2) * n2) +
                          2.0 * (s1 * s2).trace() / (static_cast<double>(n1) * n2);
    if (!(tr_sn > 0.0) || !(tr_sn2 > 0.0))
        throw estimation_degenerate_error("zhang: nonpositive estimated d or beta");

    competitor_result res;
    res.name = "zhang";
    res.gamma_reference = true;
    res.gamma_beta = tr_sn2 / tr_sn;
    res.gamma_d = tr_sn * tr_sn / tr_sn2;
    res.statistic = t_stat;
    // T / beta ~ chi2_d, i.e. Gamma(d/2, scale 2); upper tail
    res.p_value = gamma_q(0.5 * res.gamma_d, 0.5 * t_stat / res.gamma_beta);
    return res;
}

}  // namespace hdmanova

#endif
