#ifndef HDMANOVA_CLI_APP_HPP
#define HDMANOVA_CLI_APP_HPP

#include <CLI11.hpp>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hdmanova/hdmanova.hpp"

namespace hdmanova::cli {

// Exit codes: 0 success, 2 user/data/config error, 3 numeric failure, 4 usage.
inline constexpr int exit_ok = 0;
inline constexpr int exit_user = 2;
inline constexpr int exit_numeric = 3;
inline constexpr int exit_usage = 4;

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

inline double parse_number(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw input_error(what + ": not a number: '" + s + "'");
    }
    if (used != s.size()) throw input_error(what + ": not a number: '" + s + "'");
    return v;
}

inline std::vector<double> parse_number_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    for (const auto& tok : split(s, ',')) {
        if (tok.empty()) continue;
        out.push_back(parse_number(tok, what));
    }
    if (out.empty()) throw input_error(what + ": empty list");
    return out;
}

// Dataset: one observation per line; first column is the group label, the
// remaining p columns are numeric. Comma or whitespace delimited.
inline grouped_sample read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot read data file: " + path);
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::vector<double>>> rows;
    std::string line;
    long line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::vector<std::string> fields;
        if (t.find(',') != std::string::npos) {
            fields = split(t, ',');
        } else {
            std::istringstream ls(t);
            std::string tok;
            while (ls >> tok) fields.push_back(tok);
        }
        if (fields.size() < 2)
            throw input_error("data file line " + std::to_string(line_no) + ": need a label and p values");
        if (width == 0) width = fields.size();
        if (fields.size() != width)
            throw input_error("data file line " + std::to_string(line_no) + ": ragged row");
        std::vector<double> vals;
        for (std::size_t i = 1; i < fields.size(); ++i)
            vals.push_back(parse_number(fields[i], "data file line " + std::to_string(line_no)));
        if (!rows.count(fields[0])) order.push_back(fields[0]);
        rows[fields[0]].push_back(std::move(vals));
    }
    if (order.size() < 2) throw input_error("data file: need at least 2 distinct group labels");
    std::vector<Eigen::MatrixXd> groups;
    for (const auto& label : order) {
        const auto& obs = rows[label];
        Eigen::MatrixXd g(obs.size(), width - 1);
        for (std::size_t r = 0; r < obs.size(); ++r)
            for (std::size_t c = 0; c + 1 < width; ++c) g(r, c) = obs[r][c];
        groups.push_back(std::move(g));
    }
    return grouped_sample(std::move(groups));
}

inline std::string fmt(double v, bool raw) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), raw ? "%.17g" : "%.6g", v);
    return buf;
}

inline covariance_spec parse_sigma(const std::string& text, const std::string& what) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) return covariance_spec::circular(parse_number_list(text, what));
    const std::string head = trim(text.substr(0, colon));
    const std::string rest = text.substr(colon + 1);
    if (head == "circular") return covariance_spec::circular(parse_number_list(rest, what));
    if (head == "cs") {
        auto v = parse_number_list(rest, what);
        if (v.size() != 2) throw input_error(what + ": cs takes sigma2,rho");
        return covariance_spec::compound_symmetric(v[0], v[1]);
    }
    if (head == "spherical") {
        auto v = parse_number_list(rest, what);
        if (v.size() != 1) throw input_error(what + ": spherical takes one variance");
        return covariance_spec::spherical(v[0]);
    }
    if (head == "diagonal") return covariance_spec::diagonal(parse_number_list(rest, what));
    throw input_error(what + ": unknown covariance kind '" + head + "'");
}

struct simulate_file {
    experiment_config cfg;
    bool has_shift = false;
    bool has_seed = false;
    table_format format = table_format::csv;
};

inline simulate_file read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot read config file: " + path);
    static const std::set<std::string> known = {"p",     "q",    "nk",    "dist",  "nu",
                                               "alpha_list", "sigma", "shift", "reps",  "seed",
                                               "tests", "format", "slant"};
    std::map<std::string, std::string> kv;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(line_no) + ": expected key=value");
        const std::string key = trim(t.substr(0, eq));
        if (!known.count(key)) throw config_error("config: unknown key '" + key + "'");
        kv[key] = trim(t.substr(eq + 1));
    }

    auto need = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw config_error("config: missing required key '" + key + "'");
        return it->second;
    };

    simulate_file out;
    out.cfg.p = static_cast<int>(parse_number(need("p"), "config p"));
    out.cfg.q = static_cast<int>(parse_number(need("q"), "config q"));
    for (double v : parse_number_list(need("nk"), "config nk"))
        out.cfg.nk.push_back(static_cast<int>(v));
    out.cfg.replications = static_cast<long>(parse_number(need("reps"), "config reps"));

    const covariance_spec cov = parse_sigma(need("sigma"), "config sigma");
    const std::string dist = kv.count("dist") ? kv["dist"] : "normal";
    Eigen::VectorXd slant;
    if (kv.count("slant")) {
        auto v = parse_number_list(kv["slant"], "config slant");
        if (v.size() == 1) v.assign(out.cfg.p, v[0]);
        if (static_cast<int>(v.size()) != out.cfg.p)
            throw config_error("config slant: need 1 or p values");
        slant = Eigen::Map<Eigen::VectorXd>(v.data(), v.size());
    }
    auto need_nu = [&]() {
        if (!kv.count("nu")) throw config_error("config: dist '" + dist + "' requires key 'nu'");
        return parse_number(kv["nu"], "config nu");
    };
    if (dist == "normal") {
        out.cfg.dist = distribution_spec::normal(cov);
    } else if (dist == "t") {
        out.cfg.dist = distribution_spec::student_t(need_nu(), cov);
    } else if (dist == "cauchy") {
        out.cfg.dist = distribution_spec::student_t(1.0, cov);
    } else if (dist == "skewnormal") {
        out.cfg.dist = distribution_spec::skew_normal(cov, slant);
    } else if (dist == "skewt") {
        out.cfg.dist = distribution_spec::skew_t(need_nu(), cov, slant);
    } else if (dist == "skewcauchy") {
        out.cfg.dist = distribution_spec::skew_t(1.0, cov, slant);
    } else {
        throw config_error("config: unknown dist '" + dist + "'");
    }

    if (kv.count("alpha_list")) out.cfg.alphas = parse_number_list(kv["alpha_list"], "config alpha_list");
    if (kv.count("tests")) out.cfg.tests = split(kv["tests"], ',');
    if (kv.count("shift") && kv["shift"] != "none") {
        out.cfg.shift = parse_number_list(kv["shift"], "config shift");
        out.has_shift = true;
    }
    if (kv.count("seed")) {
        out.cfg.seed = std::stoull(kv["seed"]);
        out.has_seed = true;
    }
    if (kv.count("format")) {
        if (kv["format"] == "csv")
            out.format = table_format::csv;
        else if (kv["format"] == "text")
            out.format = table_format::aligned_text;
        else
            throw config_error("config: unknown format '" + kv["format"] + "'");
    }
    return out;
}

inline null_method method_from_name(const std::string& name, int q) {
    if (name == "exact") return q % 2 == 1 ? null_method::exact_egig : null_method::cf_inversion;
    if (name == "cf") return null_method::cf_inversion;
    if (name == "asymp") return null_method::asymptotic;
    throw input_error("unknown method '" + name + "'");
}

}  // namespace detail

inline int run(int argc, const char* const* argv) {
    CLI::App app{"Likelihood-ratio test for high-dimensional one-way MANOVA under circular covariance"};
    app.require_subcommand(1);

    // --- test ---
    auto* cmd_test = app.add_subcommand("test", "Run the LRT on a dataset file");
    std::string data_path, test_method = "exact";
    double test_alpha = 0.05;
    bool raw = false;
    cmd_test->add_option("--data", data_path, "dataset file (label + p numeric columns per row)")
        ->required();
    cmd_test->add_option("--method", test_method, "exact | cf | asymp");
    cmd_test->add_option("--alpha", test_alpha, "test level");
    cmd_test->add_flag("--raw", raw, "print full precision");

    // --- quantile ---
    auto* cmd_quant = app.add_subcommand("quantile", "Null quantile of Lambda");
    int qn = 0, qq = 0, qp = 0;
    double q_alpha = 0.05, q_tail_eps = 1e-10;
    std::string q_method = "exact", count_model_name;
    double cm_lambda = 0.0, cm_prob = 0.0;
    int cm_nstar = 0, cm_rstar = 0, cm_n0 = 0;
    cmd_quant->add_option("--n", qn, "overall sample size")->required();
    cmd_quant->add_option("--q", qq, "number of groups")->required();
    cmd_quant->add_option("--p", qp, "dimension")->required();
    cmd_quant->add_option("--alpha", q_alpha, "level");
    cmd_quant->add_option("--method", q_method, "exact | cf | asymp | mixture");
    cmd_quant->add_option("--count-model", count_model_name, "poisson | binomial | negbin | pointmass");
    cmd_quant->add_option("--lambda", cm_lambda, "poisson mean");
    cmd_quant->add_option("--nstar", cm_nstar, "binomial trial count");
    cmd_quant->add_option("--rstar", cm_rstar, "negative binomial target successes");
    cmd_quant->add_option("--prob", cm_prob, "binomial / negative binomial success probability");
    cmd_quant->add_option("--n0", cm_n0, "point-mass sample size");
    cmd_quant->add_option("--tail-eps", q_tail_eps, "truncation tail tolerance");
    cmd_quant->add_flag("--raw", raw, "print full precision");

    // --- simulate ---
    auto* cmd_sim = app.add_subcommand("simulate", "Run a Monte Carlo campaign from a config file");
    std::string config_path, output_path;
    std::uint64_t cli_seed = 0;
    bool seed_given = false;
    int threads = 1;
    cmd_sim->add_option("--config", config_path, "key=value config file")->required();
    cmd_sim->add_option("--output", output_path, "table output path")->required();
    cmd_sim->add_option("--seed", cli_seed, "base seed (overrides config)")->each([&](const std::string&) {
        seed_given = true;
    });
    cmd_sim->add_option("--threads", threads, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (cmd_test->parsed()) {
            if (!(test_alpha > 0.0 && test_alpha < 1.0)) throw input_error("--alpha must be in (0,1)");
            const grouped_sample gs = detail::read_dataset(data_path);
            const lrt_result res = lrt_statistic(gs);
            const beta_product_model model(gs.n(), gs.q(), gs.p());
            const null_distribution nd(model);
            const null_method method = detail::method_from_name(test_method, gs.q());
            const double pv = nd.p_value(res.w, method);
            std::cout << "n = " << gs.n() << ", q = " << gs.q() << ", p = " << gs.p() << "\n"
                      << "lambda  = " << detail::fmt(res.lambda, raw) << "\n"
                      << "w       = " << detail::fmt(res.w, raw) << "\n"
                      << "method  = " << test_method << "\n"
                      << "p-value = " << detail::fmt(pv, raw) << "\n"
                      << "decision: " << (pv <= test_alpha ? "reject" : "retain") << " H0 at alpha = "
                      << detail::fmt(test_alpha, raw) << "\n";
            return exit_ok;
        }

        if (cmd_quant->parsed()) {
            if (!(q_alpha > 0.0 && q_alpha < 1.0)) throw input_error("--alpha must be in (0,1)");
            double lambda_alpha = 0.0;
            if (q_method == "mixture") {
                if (count_model_name.empty())
                    throw input_error("--method mixture requires --count-model");
                count_model cm;
                if (count_model_name == "poisson")
                    cm = count_model::poisson(cm_lambda);
                else if (count_model_name == "binomial")
                    cm = count_model::binomial(cm_nstar, cm_prob);
                else if (count_model_name == "negbin")
                    cm = count_model::negative_binomial(cm_rstar, cm_prob);
                else if (count_model_name == "pointmass")
                    cm = count_model::point_mass(cm_n0);
                else
                    throw input_error("unknown count model '" + count_model_name + "'");
                const truncated_weights tw = make_truncated_weights(cm, qq, q_tail_eps);
                const mixture_distribution mix(tw, qq, qp);
                lambda_alpha = mix.quantile_lambda_exact(q_alpha);
            } else {
                const beta_product_model model(qn, qq, qp);
                const null_distribution nd(model);
                lambda_alpha = nd.quantile_lambda(q_alpha, detail::method_from_name(q_method, qq));
            }
            std::cout << "lambda_alpha = " << detail::fmt(lambda_alpha, raw) << "\n"
                      << "w_threshold  = " << detail::fmt(-std::log(lambda_alpha), raw) << "\n";
            return exit_ok;
        }

        if (cmd_sim->parsed()) {
            detail::simulate_file sim = detail::read_config(config_path);
            if (seed_given) {
                sim.cfg.seed = cli_seed;
                sim.has_seed = true;
            }
            if (!sim.has_seed)
                throw config_error("simulate: a seed is required (--seed or config key 'seed')");
            sim.cfg.threads = threads;
            sim.cfg.validate();

            auto progress = [&](long done) {
                std::fprintf(stderr, "  %ld/%ld replications\r", done, sim.cfg.replications);
            };
            std::vector<table_row> rows;
            if (sim.has_shift) {
                experiment_config h0_cfg = sim.cfg;
                h0_cfg.shift.clear();
                std::fprintf(stderr, "building null quantile bank...\n");
                const h0_result bank = run_h0(h0_cfg, progress);
                std::fprintf(stderr, "\nrunning power scenario...\n");
                rows = run_h1(sim.cfg, bank, progress);
            } else {
                const h0_result res = run_h0(sim.cfg, progress);
                rows = res.rows;
            }
            std::fprintf(stderr, "\n");
            const std::string table = emit_table(rows, sim.format);
            std::ofstream out(output_path, std::ios::binary);
            if (!out) throw input_error("cannot write output file: " + output_path);
            out << table;
            std::cout << "scenario: " << scenario_descriptor(sim.cfg) << "\n"
                      << "rows: " << rows.size() << " -> " << output_path << "\n";
            return exit_ok;
        }
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_user;
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return exit_numeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_user;
    }
    return exit_usage;
}

}  // namespace hdmanova::cli

#endif
