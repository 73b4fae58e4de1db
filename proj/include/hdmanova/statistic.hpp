#ifndef HDMANOVA_STATISTIC_HPP
#define HDMANOVA_STATISTIC_HPP

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "hdmanova/errors.hpp"

namespace hdmanova {

// q independent samples; group k is an n_k x p matrix of observations (rows).
struct grouped_sample {
    std::vector<Eigen::MatrixXd> groups;

    explicit grouped_sample(std::vector<Eigen::MatrixXd> g) : groups(std::move(g)) { validate(); }

    int q() const { return static_cast<int>(groups.size()); }
    int p() const { return static_cast<int>(groups.front().cols()); }
    int n() const {
        int total = 0;
        for (const auto& g : groups) total += static_cast<int>(g.rows());
        return total;
    }

    void validate() const {
        if (groups.size() < 2) throw invalid_dimension_error("grouped_sample: need q >= 2 groups");
        const auto dim = groups.front().cols();
        if (dim < 1) throw invalid_dimension_error("grouped_sample: need p >= 1");
        for (const auto& g : groups) {
            if (g.rows() < 1) throw invalid_dimension_error("grouped_sample: every group needs n_k >= 1");
            if (g.cols() != dim) throw invalid_dimension_error("grouped_sample: all groups must share p");
            if (!g.allFinite()) throw input_error("grouped_sample: non-finite entry");
        }
        if (n() <= q()) throw insufficient_sample_error("grouped_sample: need n > q");
    }
};

struct lrt_result {
    double lambda = 1.0;
    double w = 0.0;
    Eigen::VectorXd vstar;   // v_j*  (1-based j stored at index j-1)
    Eigen::VectorXd vdstar;  // v_j**
    Eigen::VectorXd a_diag;  // diag of A* = U A U'
    Eigen::VectorXd c_diag;  // diag of C* = U (A+B) U'
};

// Orthogonal transform with u_ij = (cos + sin)(2*pi*(i-1)*(j-1)/p)/sqrt(p).
// The index product is reduced mod p before evaluating the angle, which keeps
// the entries accurate for large p.
inline Eigen::MatrixXd build_u_matrix(int p) {
    if (p < 1) throw invalid_dimension_error("build_u_matrix: need p >= 1");
    Eigen::MatrixXd u(p, p);
    const double scale = 1.0 / std::sqrt(static_cast<double>(p));
    const double two_pi = 6.283185307179586476925286766559;
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            const long long r = (static_cast<long long>(i) * j) % p;
            const double ang = two_pi * static_cast<double>(r) / p;
            u(i, j) = scale * (std::cos(ang) + std::sin(ang));
        }
    }
    return u;
}

// Within-group scatter A = sum_k (n_k - 1) S_k. Groups of size 1 contribute 0.
inline Eigen::MatrixXd within_scatter(const grouped_sample& s) {
    const int p = s.p();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
    for (const auto& g : s.groups) {
        if (g.rows() < 2) continue;
        Eigen::MatrixXd centered = g.rowwise() - g.colwise().mean();
        a.noalias() += centered.transpose() * centered;
    }
    a = 0.5 * (a + a.transpose()).eval();
    return a;
}

// Between-group scatter B = sum_k n_k (xbar_k - xbar)(xbar_k - xbar)'.
inline Eigen::MatrixXd between_scatter(const grouped_sample& s) {
    const int p = s.p();
    const int n = s.n();
    Eigen::VectorXd overall = Eigen::VectorXd::Zero(p);
    std::vector<Eigen::VectorXd> means;
    means.reserve(s.groups.size());
    for (const auto& g : s.groups) {
        means.push_back(g.colwise().mean().transpose());
        overall += g.rows() * means.back();
    }
    overall /= static_cast<double>(n);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t k = 0; k < s.groups.size(); ++k) {
        Eigen::VectorXd d = means[k] - overall;
        b.noalias() += s.groups[k].rows() * (d * d.transpose());
    }
    b = 0.5 * (b + b.transpose()).eval();
    return b;
}

// The LRT statistic Lambda = prod_j v_j* / v_j** and W = -log Lambda.
// Indexing follows the 1-based convention of the construction: singleton
// positions are j = 1 and, for even p, j = m+1 with m = floor(p/2); every
// other position j is averaged with its partner p - j + 2.
inline lrt_result lrt_statistic(const grouped_sample& s) {
    const int p = s.p();
    const int m = p / 2;
    const Eigen::MatrixXd u = build_u_matrix(p);
    const Eigen::MatrixXd a = within_scatter(s);
    const Eigen::MatrixXd c = a + between_scatter(s);

    lrt_result res;
    res.a_diag = (u * a * u.transpose()).diagonal();
    res.c_diag = (u * c * u.transpose()).diagonal();
    res.vstar.resize(p);
    res.vdstar.resize(p);

    auto is_single = [&](int j) { return j == 1 || (p % 2 == 0 && j == m + 1); };
    for (int j = 1; j <= p; ++j) {
        if (is_single(j)) {
            res.vstar(j - 1) = res.a_diag(j - 1);
            res.vdstar(j - 1) = res.c_diag(j - 1);
        } else {
            const int j2 = p - j + 2;
            res.vstar(j - 1) = 0.5 * (res.a_diag(j - 1) + res.a_diag(j2 - 1));
            res.vdstar(j - 1) = 0.5 * (res.c_diag(j - 1) + res.c_diag(j2 - 1));
        }
    }

    double w = 0.0;
    for (int j = 0; j < p; ++j) {
        if (!(res.vstar(j) > 0.0) || !(res.vdstar(j) > 0.0))
            throw degenerate_scatter_error("lrt_statistic: nonpositive projected scatter (rank-deficient data)");
        w -= std::log(res.vstar(j) / res.vdstar(j));
    }
    if (w < 0.0) w = 0.0;  // kill -0 and tiny negative round-off; B is PSD
    res.w = w;
    res.lambda = std::exp(-w);
    return res;
}

}  // namespace hdmanova

#endif
