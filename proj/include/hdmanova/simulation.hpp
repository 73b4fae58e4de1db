#ifndef HDMANOVA_SIMULATION_HPP
#define HDMANOVA_SIMULATION_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hdmanova/errors.hpp"
#include "hdmanova/rng.hpp"

namespace hdmanova {

// Covariance builder. Circular takes sigma_0..sigma_m (m = floor(p/2)) and
// realizes sigma_ij = sigma_{d(i,j)} with d the cyclic index distance.
struct covariance_spec {
    enum class kind { circular, compound_symmetric, spherical, diagonal, full };

    kind variant = kind::spherical;
    std::vector<double> params;  // circular: sigma list; cs: {sigma2, rho};
                                 // spherical: {sigma2}; diagonal: d_1..d_p
    Eigen::MatrixXd full_matrix;

    static covariance_spec circular(std::vector<double> sigma) {
        covariance_spec c;
        c.variant = kind::circular;
        c.params = std::move(sigma);
        return c;
    }
    static covariance_spec compound_symmetric(double sigma2, double rho) {
        covariance_spec c;
        c.variant = kind::compound_symmetric;
        c.params = {sigma2, rho};
        return c;
    }
    static covariance_spec spherical(double sigma2) {
        covariance_spec c;
        c.variant = kind::spherical;
        c.params = {sigma2};
        return c;
    }
    static covariance_spec diagonal(std::vector<double> d) {
        covariance_spec c;
        c.variant = kind::diagonal;
        c.params = std::move(d);
        return c;
    }
    static covariance_spec full(Eigen::MatrixXd m) {
        covariance_spec c;
        c.variant = kind::full;
        c.full_matrix = std::move(m);
        return c;
    }
};

inline Eigen::MatrixXd build_covariance(const covariance_spec& spec, int p) {
    if (p < 1) throw invalid_dimension_error("build_covariance: need p >= 1");
    Eigen::MatrixXd sigma(p, p);
    switch (spec.variant) {
        case covariance_spec::kind::circular: {
            const int m = p / 2;
            if (static_cast<int>(spec.params.size()) != m + 1)
                throw config_error("circular covariance needs floor(p/2)+1 parameters");
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < p; ++j) {
                    const int d = std::min((i - j + p) % p, (j - i + p) % p);
                    sigma(i, j) = spec.params[d];
                }
            break;
        }
        case covariance_spec::kind::compound_symmetric: {
            const double s2 = spec.params.at(0), rho = spec.params.at(1);
            if (!(rho > -1.0 / (p - 1 > 0 ? p - 1 : 1) && rho < 1.0))
                throw config_error("compound symmetric rho outside (-1/(p-1), 1)");
            sigma.setConstant(s2 * rho);
            sigma.diagonal().setConstant(s2);
            break;
        }
        case covariance_spec::kind::spherical:
            sigma = spec.params.at(0) * Eigen::MatrixXd::Identity(p, p);
            break;
        case covariance_spec::kind::diagonal: {
            if (static_cast<int>(spec.params.size()) != p)
                throw config_error("diagonal covariance needs p parameters");
            sigma.setZero();
            for (int i = 0; i < p; ++i) sigma(i, i) = spec.params[i];
            break;
        }
        case covariance_spec::kind::full: {
            if (spec.full_matrix.rows() != p || spec.full_matrix.cols() != p)
                throw config_error("full covariance has wrong dimension");
            sigma = 0.5 * (spec.full_matrix + spec.full_matrix.transpose());
            break;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
    const double min_ev = es.eigenvalues().minCoeff();
    const double max_ev = es.eigenvalues().maxCoeff();
    if (!(min_ev > 1e-10 * std::max(max_ev, 1e-30)))
        throw config_error("covariance is not positive definite (min eigenvalue " +
                           std::to_string(min_ev) + ")");
    return sigma;
}

// Sampling distribution for one group. Cauchy is Student t with nu = 1;
// skew-Cauchy is skew-t with nu = 1.
struct distribution_spec {
    enum class family { normal, student_t, skew_normal, skew_t };

    family fam = family::normal;
    double nu = 0.0;              // degrees of freedom for the t families
    covariance_spec scale;        // Sigma (scale matrix for the t families)
    Eigen::VectorXd location;     // empty means zero
    Eigen::VectorXd slant;        // alpha for the skew families; empty means zero

    static distribution_spec normal(covariance_spec cov) {
        distribution_spec d;
        d.fam = family::normal;
        d.scale = std::move(cov);
        return d;
    }
    static distribution_spec student_t(double nu, covariance_spec cov) {
        if (!(nu > 0.0)) throw config_error("student t: nu must be > 0");
        distribution_spec d;
        d.fam = family::student_t;
        d.nu = nu;
        d.scale = std::move(cov);
        return d;
    }
    static distribution_spec skew_normal(covariance_spec cov, Eigen::VectorXd alpha) {
        distribution_spec d;
        d.fam = family::skew_normal;
        d.scale = std::move(cov);
        d.slant = std::move(alpha);
        return d;
    }
    static distribution_spec skew_t(double nu, covariance_spec cov, Eigen::VectorXd alpha) {
        if (!(nu > 0.0)) throw config_error("skew t: nu must be > 0");
        distribution_spec d;
        d.fam = family::skew_t;
        d.nu = nu;
        d.scale = std::move(cov);
        d.slant = std::move(alpha);
        return d;
    }
};

namespace detail {

// Deterministic symmetric PSD factor F with F F' = m (spectral form).
inline Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal();
}

}  // namespace detail

// Draws n_k i.i.d. rows from the configured p-variate distribution.
// Deterministic per (spec, seed).
inline Eigen::MatrixXd sample(const distribution_spec& dist, int p, int n_k, std::uint64_t seed) {
    if (n_k < 1) throw input_error("sample: need n_k >= 1");
    const Eigen::MatrixXd sigma = build_covariance(dist.scale, p);
    Eigen::VectorXd location = dist.location.size() ? dist.location : Eigen::VectorXd::Zero(p);
    if (location.size() != p) throw config_error("sample: location has wrong dimension");

    auto engine = make_engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd out(n_k, p);

    const bool skew =
        dist.fam == distribution_spec::family::skew_normal || dist.fam == distribution_spec::family::skew_t;
    const bool t_mix =
        dist.fam == distribution_spec::family::student_t || dist.fam == distribution_spec::family::skew_t;

    if (!skew) {
        const Eigen::MatrixXd factor = detail::psd_factor(sigma);
        std::gamma_distribution<double> chi(t_mix ? 0.5 * dist.nu : 1.0, 2.0);
        for (int r = 0; r < n_k; ++r) {
            Eigen::VectorXd z(p);
            for (int j = 0; j < p; ++j) z(j) = gauss(engine);
            Eigen::VectorXd x = factor * z;
            if (t_mix) x /= std::sqrt(chi(engine) / dist.nu);
            out.row(r) = (location + x).transpose();
        }
        return out;
    }

    // Slant construction: with correlation matrix O and slant alpha,
    // delta = O a / sqrt(1 + a'O a); Z = delta |T| + V, V ~ N(0, O - delta delta'),
    // then scale by omega = sqrt(diag Sigma) and shift.
    Eigen::VectorXd alpha = dist.slant.size() ? dist.slant : Eigen::VectorXd::Zero(p);
    if (alpha.size() != p) throw config_error("sample: slant has wrong dimension");
    const Eigen::VectorXd omega = sigma.diagonal().cwiseSqrt();
    const Eigen::MatrixXd corr =
        omega.cwiseInverse().asDiagonal() * sigma * omega.cwiseInverse().asDiagonal();
    const Eigen::VectorXd odotted = corr * alpha;
    const Eigen::VectorXd delta = odotted / std::sqrt(1.0 + alpha.dot(odotted));
    const Eigen::MatrixXd residual_cov = corr - delta * delta.transpose();
    const Eigen::MatrixXd factor = detail::psd_factor(residual_cov);
    std::gamma_distribution<double> chi(t_mix ? 0.5 * dist.nu : 1.0, 2.0);

    for (int r = 0; r < n_k; ++r) {
        const double half_normal = std::fabs(gauss(engine));
        Eigen::VectorXd z(p);
        for (int j = 0; j < p; ++j) z(j) = gauss(engine);
        Eigen::VectorXd y = delta * half_normal + factor * z;
        if (t_mix) y /= std::sqrt(chi(engine) / dist.nu);
        out.row(r) = (location + omega.cwiseProduct(y)).transpose();
    }
    return out;
}

// Adds the configured shift pattern to every non-baseline group (group 1 is
// the unshifted baseline). The shift values are spread over equal blocks of
// the variable vector: two values shift the first and second halves.
inline std::vector<Eigen::MatrixXd> apply_shift(const std::vector<Eigen::MatrixXd>& groups,
                                                const std::vector<double>& shift) {
    if (groups.empty()) throw input_error("apply_shift: no groups");
    const int p = static_cast<int>(groups.front().cols());
    if (shift.empty()) return groups;
    if (p % static_cast<int>(shift.size()) != 0)
        throw config_error("apply_shift: shift length must divide p evenly");
    const int block = p / static_cast<int>(shift.size());
    Eigen::RowVectorXd delta(p);
    for (int j = 0; j < p; ++j) delta(j) = shift[j / block];
    std::vector<Eigen::MatrixXd> out = groups;
    for (std::size_t k = 1; k < out.size(); ++k) out[k].rowwise() += delta;
    return out;
}

}  // namespace hdmanova

#endif
