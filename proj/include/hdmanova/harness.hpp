#ifndef HDMANOVA_HARNESS_HPP
#define HDMANOVA_HARNESS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hdmanova/competitors.hpp"
#include "hdmanova/errors.hpp"
#include "hdmanova/null_distribution.hpp"
#include "hdmanova/rng.hpp"
#include "hdmanova/simulation.hpp"
#include "hdmanova/statistic.hpp"

namespace hdmanova {

struct experiment_config {
    int p = 0;
    int q = 0;
    std::vector<int> nk;
    distribution_spec dist;
    std::vector<double> shift;  // empty = null scenario
    std::vector<double> alphas{0.01, 0.05};
    long replications = 10000;
    std::uint64_t seed = 0;
    std::vector<std::string> tests{"lrt", "fujikoshi", "schott"};
    int threads = 1;

    int n() const {
        int total = 0;
        for (int v : nk) total += v;
        return total;
    }

    void validate() const {
        if (p < 1) throw config_error("config: p must be >= 1");
        if (q < 2) throw config_error("config: q must be >= 2");
        if (static_cast<int>(nk.size()) != q) throw config_error("config: nk list must have q entries");
        for (int v : nk)
            if (v < 1) throw config_error("config: every n_k must be >= 1");
        if (n() <= q) throw config_error("config: need n > q");
        if (replications < 1) throw config_error("config: replications must be >= 1");
        if (alphas.empty()) throw config_error("config: alpha list is empty");
        for (double a : alphas)
            if (!(a > 0.0 && a < 1.0)) throw config_error("config: alphas must lie in (0,1)");
        if (threads < 1) throw config_error("config: threads must be >= 1");
        if (tests.empty()) throw config_error("config: no tests requested");
        for (const auto& t : tests) {
            if (t != "lrt" && t != "fujikoshi" && t != "schott" && t != "chen_qin" && t != "zhang")
                throw config_error("config: unknown test '" + t + "'");
            if ((t == "chen_qin" || t == "zhang") && q != 2)
                throw config_error("config: " + t + " requires q = 2");
        }
        if (!shift.empty() && p % static_cast<int>(shift.size()) != 0)
            throw config_error("config: shift length must divide p evenly");
    }
};

struct table_row {
    std::string scenario;
    std::string test;
    std::string source;  // exact | asymp | simul
    double alpha = 0.0;
    double rate = 0.0;
    double se = 0.0;
    long replications = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::string join_numbers(const std::vector<double>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << '|';
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", v[i]);
        os << buf;
    }
    return os.str();
}

inline std::string cov_descriptor(const covariance_spec& cov) {
    switch (cov.variant) {
        case covariance_spec::kind::circular:
            return "circular:" + join_numbers(cov.params);
        case covariance_spec::kind::compound_symmetric:
            return "cs:" + join_numbers(cov.params);
        case covariance_spec::kind::spherical:
            return "spherical:" + join_numbers(cov.params);
        case covariance_spec::kind::diagonal:
            return "diagonal:" + join_numbers(cov.params);
        case covariance_spec::kind::full:
            return "full";
    }
    return "?";
}

inline std::string dist_descriptor(const distribution_spec& dist) {
    std::ostringstream os;
    switch (dist.fam) {
        case distribution_spec::family::normal:
            os << "normal";
            break;
        case distribution_spec::family::student_t:
            os << "t:" << dist.nu;
            break;
        case distribution_spec::family::skew_normal:
            os << "skewnormal";
            break;
        case distribution_spec::family::skew_t:
            os << "skewt:" << dist.nu;
            break;
    }
    if (dist.slant.size()) {
        std::vector<double> a(dist.slant.data(), dist.slant.data() + dist.slant.size());
        os << ";slant=" << join_numbers(a);
    }
    return os.str();
}

}  // namespace detail

// Scenario descriptor embedded in every output row: the shift convention and
// the full covariance parameterization are recorded because table captions
// alone do not pin them down. The core part excludes the shift so that a null
// run and its power runs can be matched.
inline std::string scenario_core(const experiment_config& cfg) {
    std::ostringstream os;
    std::vector<double> nk_d(cfg.nk.begin(), cfg.nk.end());
    os << "dist=" << detail::dist_descriptor(cfg.dist) << ";cov=" << detail::cov_descriptor(cfg.dist.scale)
       << ";p=" << cfg.p << ";q=" << cfg.q << ";nk=" << detail::join_numbers(nk_d);
    return os.str();
}

inline std::string scenario_descriptor(const experiment_config& cfg) {
    std::string core = scenario_core(cfg);
    if (cfg.shift.empty()) return core + ";shift=none";
    return core + ";shift=blocks:" + detail::join_numbers(cfg.shift);
}

// Statistic streams from a completed null run; rejection-direction values
// (always "large rejects") keyed by test name. Zhang also keeps its
// per-replication p-values since its reference law is data dependent.
struct h0_result {
    experiment_config config;
    std::vector<table_row> rows;
    std::map<std::string, std::vector<double>> streams;
    std::map<std::string, std::vector<double>> pvalues;
};

namespace detail {

inline void parallel_for(long total, int threads, const std::function<void(long, long)>& chunk_fn) {
    if (threads <= 1 || total < 2) {
        chunk_fn(0, total);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const long per = (total + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const long begin = t * per;
        const long end = std::min(total, begin + per);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            try {
                chunk_fn(begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct run_streams {
    std::map<std::string, std::vector<double>> stats;
    std::map<std::string, std::vector<double>> pvalues;
};

// Computes every requested statistic for replications [0, R); replication i
// derives its seed from (seed, stream_tag, i) so results do not depend on the
// thread schedule.
inline run_streams compute_streams(const experiment_config& cfg, std::uint64_t stream_tag,
                                   bool shifted,
                                   const std::function<void(long)>& progress = {}) {
    run_streams out;
    const long reps = cfg.replications;
    for (const auto& t : cfg.tests) out.stats[t].assign(reps, 0.0);
    if (out.stats.count("zhang")) out.pvalues["zhang"].assign(reps, 0.0);

    parallel_for(reps, cfg.threads, [&](long begin, long end) {
        for (long i = begin; i < end; ++i) {
            const std::uint64_t rep_seed = derive_seed(cfg.seed, stream_tag, static_cast<std::uint64_t>(i));
            std::vector<Eigen::MatrixXd> groups;
            groups.reserve(cfg.nk.size());
            for (std::size_t k = 0; k < cfg.nk.size(); ++k)
                groups.push_back(sample(cfg.dist, cfg.p, cfg.nk[k], derive_seed(rep_seed, k)));
            if (shifted) groups = apply_shift(groups, cfg.shift);
            const grouped_sample gs(std::move(groups));

            for (const auto& t : cfg.tests) {
                if (t == "lrt") {
                    out.stats[t][i] = lrt_statistic(gs).w;
                } else if (t == "fujikoshi") {
                    out.stats[t][i] = fujikoshi_stat(gs).statistic;
                } else if (t == "schott") {
                    out.stats[t][i] = schott_stat(gs).statistic;
                } else if (t == "chen_qin") {
                    out.stats[t][i] = chen_qin_stat(gs).statistic;
                } else if (t == "zhang") {
                    const auto res = zhang_stat(gs);
                    out.stats[t][i] = res.statistic;
                    out.pvalues[t][i] = res.p_value;
                }
            }
            if (progress && ((i + 1) % 1000 == 0)) progress(i + 1);
        }
    });
    return out;
}

inline double rejection_rate(const std::vector<double>& stream, double threshold) {
    long count = 0;
    for (double v : stream)
        if (v > threshold) ++count;
    return static_cast<double>(count) / stream.size();
}

inline table_row make_row(const experiment_config& cfg, const std::string& scenario,
                          const std::string& test, const std::string& source, double alpha,
                          double rate) {
    table_row row;
    row.scenario = scenario;
    row.test = test;
    row.source = source;
    row.alpha = alpha;
    row.rate = rate;
    row.se = std::sqrt(rate * (1.0 - rate) / cfg.replications);
    row.replications = cfg.replications;
    row.seed = cfg.seed;
    return row;
}

}  // namespace detail

// Upper empirical critical value: the ceil(alpha*R)-th largest value of the
// null stream. Rejecting on strict exceedance puts the plug-back rate within
// 1/R of alpha by construction.
inline double empirical_upper_quantile(std::vector<double> stream, double alpha) {
    if (stream.empty()) throw input_error("empirical quantile: empty stream");
    const long r = static_cast<long>(stream.size());
    long k = static_cast<long>(std::ceil(alpha * r));
    if (k < 1) k = 1;
    if (k > r) k = r;
    std::nth_element(stream.begin(), stream.begin() + (k - 1), stream.end(), std::greater<double>());
    return stream[k - 1];
}

// Null-scenario run: sizes under the theoretical critical values, plus the
// statistic streams needed later for empirical ("simul") critical values.
inline h0_result run_h0(const experiment_config& cfg,
                        const std::function<void(long)>& progress = {}) {
    cfg.validate();
    if (!cfg.shift.empty()) throw config_error("run_h0: shift must not be configured");

    h0_result result;
    result.config = cfg;
    auto streams = detail::compute_streams(cfg, /*stream_tag=*/0, /*shifted=*/false, progress);
    result.streams = std::move(streams.stats);
    result.pvalues = std::move(streams.pvalues);

    const std::string scenario = scenario_descriptor(cfg);
    const bool has_lrt = result.streams.count("lrt") > 0;
    std::optional<null_distribution> nd;
    if (has_lrt) nd.emplace(beta_product_model(cfg.n(), cfg.q, cfg.p));

    for (const auto& t : cfg.tests) {
        for (double alpha : cfg.alphas) {
            if (t == "lrt") {
                const double w_exact = nd->quantile_w(alpha, cfg.q % 2 == 1 ? null_method::exact_egig
                                                                            : null_method::cf_inversion);
                const double w_asymp = nd->quantile_w(alpha, null_method::asymptotic);
                result.rows.push_back(detail::make_row(
                    cfg, scenario, t, "exact", alpha, detail::rejection_rate(result.streams[t], w_exact)));
                result.rows.push_back(detail::make_row(
                    cfg, scenario, t, "asymp", alpha, detail::rejection_rate(result.streams[t], w_asymp)));
            } else if (t == "zhang") {
                long count = 0;
                for (double pv : result.pvalues[t])
                    if (pv <= alpha) ++count;
                result.rows.push_back(detail::make_row(cfg, scenario, t, "asymp", alpha,
                                                       static_cast<double>(count) / cfg.replications));
            } else {
                const double z = normal_quantile(1.0 - alpha);
                result.rows.push_back(detail::make_row(
                    cfg, scenario, t, "asymp", alpha, detail::rejection_rate(result.streams[t], z)));
            }
        }
    }
    return result;
}

// Power run under a configured shift. Theoretical ("exact"/"asymp") rates use
// the same critical values as the null run; "simul" rates use each test's own
// empirical null quantile taken from the supplied bank.
inline std::vector<table_row> run_h1(const experiment_config& cfg, const h0_result& bank,
                                     const std::function<void(long)>& progress = {}) {
    cfg.validate();
    if (cfg.shift.empty()) throw config_error("run_h1: shift must be configured");
    experiment_config core_cfg = cfg;
    core_cfg.shift.clear();
    experiment_config bank_core = bank.config;
    bank_core.shift.clear();
    if (scenario_core(core_cfg) != scenario_core(bank_core))
        throw pairing_error("run_h1: null bank does not match this scenario");
    for (const auto& t : cfg.tests)
        if (!bank.streams.count(t)) throw pairing_error("run_h1: null bank lacks test '" + t + "'");

    auto streams = detail::compute_streams(cfg, /*stream_tag=*/1, /*shifted=*/true, progress);
    const std::string scenario = scenario_descriptor(cfg);
    std::vector<table_row> rows;
    const bool has_lrt = streams.stats.count("lrt") > 0;
    std::optional<null_distribution> nd;
    if (has_lrt) nd.emplace(beta_product_model(cfg.n(), cfg.q, cfg.p));

    for (const auto& t : cfg.tests) {
        for (double alpha : cfg.alphas) {
            const double simul_crit = empirical_upper_quantile(bank.streams.at(t), alpha);
            if (t == "lrt") {
                const double w_exact = nd->quantile_w(alpha, cfg.q % 2 == 1 ? null_method::exact_egig
                                                                            : null_method::cf_inversion);
                const double w_asymp = nd->quantile_w(alpha, null_method::asymptotic);
                rows.push_back(detail::make_row(cfg, scenario, t, "exact", alpha,
                                                detail::rejection_rate(streams.stats[t], w_exact)));
                rows.push_back(detail::make_row(cfg, scenario, t, "asymp", alpha,
                                                detail::rejection_rate(streams.stats[t], w_asymp)));
            } else if (t == "zhang") {
                long count = 0;
                for (double pv : streams.pvalues[t])
                    if (pv <= alpha) ++count;
                rows.push_back(detail::make_row(cfg, scenario, t, "asymp", alpha,
                                                static_cast<double>(count) / cfg.replications));
            } else {
                const double z = normal_quantile(1.0 - alpha);
                rows.push_back(detail::make_row(cfg, scenario, t, "asymp", alpha,
                                                detail::rejection_rate(streams.stats[t], z)));
            }
            rows.push_back(detail::make_row(cfg, scenario, t, "simul", alpha,
                                            detail::rejection_rate(streams.stats[t], simul_crit)));
        }
    }
    return rows;
}

enum class table_format { csv, aligned_text };

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

inline void sort_rows(std::vector<table_row>& rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const table_row& a, const table_row& b) {
        if (a.test != b.test) return a.test < b.test;
        if (a.source != b.source) return a.source < b.source;
        return a.alpha < b.alpha;
    });
}

}  // namespace detail

inline std::string emit_table(std::vector<table_row> rows, table_format format = table_format::csv) {
    if (rows.empty()) throw empty_request_error("emit_table: no rows");
    detail::sort_rows(rows);
    std::ostringstream os;
    if (format == table_format::csv) {
        os << "scenario,test,source,alpha,rate,se,R,seed\n";
        for (const auto& r : rows) {
            os << r.scenario << ',' << r.test << ',' << r.source << ',' << detail::format_double(r.alpha)
               << ',' << detail::format_double(r.rate) << ',' << detail::format_double(r.se) << ','
               << r.replications << ',' << r.seed << '\n';
        }
        return os.str();
    }
    os << "test        source  alpha     rate       se         R         seed\n";
    for (const auto& r : rows) {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%-11s %-7s %-9s %-10s %-10s %-9ld %llu\n", r.test.c_str(),
                      r.source.c_str(), detail::format_double(r.alpha).c_str(),
                      detail::format_double(r.rate).c_str(), detail::format_double(r.se).c_str(),
                      r.replications, static_cast<unsigned long long>(r.seed));
        os << buf;
    }
    os << "# scenario: " << rows.front().scenario << "\n";
    return os.str();
}

inline std::vector<table_row> parse_table(const std::string& csv) {
    std::istringstream is(csv);
    std::string line;
    if (!std::getline(is, line) || line != "scenario,test,source,alpha,rate,se,R,seed")
        throw input_error("parse_table: missing or malformed header");
    std::vector<table_row> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string cur;
        std::istringstream ls(line);
        while (std::getline(ls, cur, ',')) fields.push_back(cur);
        if (fields.size() != 8) throw input_error("parse_table: bad row: " + line);
        table_row r;
        r.scenario = fields[0];
        r.test = fields[1];
        r.source = fields[2];
        r.alpha = std::stod(fields[3]);
        r.rate = std::stod(fields[4]);
        r.se = std::stod(fields[5]);
        r.replications = std::stol(fields[6]);
        r.seed = std::stoull(fields[7]);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace hdmanova

#endif
