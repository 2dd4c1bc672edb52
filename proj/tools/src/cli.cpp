#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ht/constrained.hpp"
#include "ht/divergences.hpp"
#include "ht/errors.hpp"
#include "ht/exact_oracle.hpp"
#include "ht/formulas.hpp"
#include "ht/inequality_lab.hpp"
#include "ht/numeric.hpp"
#include "ht/parallel.hpp"
#include "ht/reductions.hpp"
#include "ht/serialization.hpp"
#include "ht/simulate.hpp"

namespace ht::cli {
namespace {

using nlohmann::json;

json count(std::uint64_t n) { return n == kUnbounded ? json(nullptr) : json(n); }

json count(const std::optional<std::uint64_t>& n) { return n ? count(*n) : json(nullptr); }

json estimate_json(const ComplexityEstimate& e) {
    json diag = json::object();
    for (const auto& d : e.diagnostics) diag[d.name] = d.value;
    return {{"lower", count(e.lower)},
            {"upper", count(e.upper)},
            {"point", count(e.point)},
            {"regime", std::string(to_string(e.regime))},
            {"formula", e.formula_trace},
            {"diagnostics", diag},
            {"warnings", e.warnings}};
}

json trace_json(const NStarResult& r) {
    json t = json::array();
    for (const auto& pt : r.trace) t.push_back({{"n", pt.n}, {"error", pt.error}});
    return t;
}

json channel_json(const Channel& ch) {
    json j = {{"matrix", ch.matrix}};
    j["epsilon_ldp"] = ch.epsilon_ldp ? json(*ch.epsilon_ldp) : json(nullptr);
    return j;
}

std::string scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "";
    return v.dump();
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void flatten(const json& v, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
    if (v.is_object()) {
        for (const auto& [k, child] : v.items()) flatten(child, prefix.empty() ? k : prefix + "." + k, rows);
    } else if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], prefix + "." + std::to_string(i), rows);
    } else {
        rows.emplace_back(prefix, scalar_text(v));
    }
}

struct Output {
    std::string format;

    void emit(const json& result, std::ostream& out) const {
        if (format == "csv") {
            std::vector<std::pair<std::string, std::string>> rows;
            flatten(result, "", rows);
            out << "key,value\n";
            for (const auto& [k, v] : rows) out << csv_quote(k) << ',' << csv_quote(v) << '\n';
        } else {
            out << result.dump(2) << '\n';
        }
    }
};

void add_format(CLI::App* cmd, Output& o, const std::string& fallback) {
    cmd->add_option("--format", o.format, "Output format (default " + fallback + ")")->check(CLI::IsMember({"json", "csv"}));
}

Objective make_objective(const std::string& kind, double param) {
    return kind == "js" ? Objective::jensen_shannon(param) : Objective::hellinger(param);
}

struct Pair {
    std::string p_path, q_path;
    void add(CLI::App* cmd) {
        cmd->add_option("--p", p_path, "Distribution p (JSON or CSV)")->required()->check(CLI::ExistingFile);
        cmd->add_option("--q", q_path, "Distribution q (JSON or CSV)")->required()->check(CLI::ExistingFile);
    }
    [[nodiscard]] Distribution p() const { return load_distribution(p_path); }
    [[nodiscard]] Distribution q() const { return load_distribution(q_path); }
};

}  // namespace

unsigned thread_budget() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("HT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
    }
    return n;
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sample complexity of simple binary hypothesis testing", "hypotest"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    Output fmt;
    Pair pair;
    std::function<json()> action;
    bool check_failed = false;

    // divergence
    auto* div = app.add_subcommand("divergence", "Divergences between two distributions");
    double div_alpha = 0.5, div_lambda = 0.5;
    std::optional<double> div_gamma;
    bool div_all = false;
    pair.add(div);
    div->add_option("--alpha", div_alpha, "Prior on p for JS_alpha and E_gamma")->check(CLI::Range(0.0, 1.0));
    div->add_option("--lambda", div_lambda, "Exponent of H_lambda")->check(CLI::Range(0.0, 1.0));
    div->add_option("--gamma", div_gamma, "E_gamma parameter; defaults to (1-alpha)/alpha");
    div->add_flag("--all", div_all, "Also report H_lambda, JS_alpha, E_gamma and mutual information");
    add_format(div, fmt, "json");
    div->callback([&] {
        action = [&] {
            const auto p = pair.p(), q = pair.q();
            const auto c = classic_divergences(p, q);
            json j = {{"tv", c.tv}, {"hellinger_sq", c.hellinger_sq}, {"kl_pq", c.kl_pq}};
            if (div_all) {
                const double g = div_gamma.value_or((1.0 - div_alpha) / div_alpha);
                j["h_lambda"] = {{"lambda", div_lambda}, {"value", h_lambda(p, q, div_lambda)}};
                j["js_alpha"] = {{"alpha", div_alpha}, {"value", js_alpha(p, q, div_alpha)}};
                j["e_gamma"] = {{"gamma", g}, {"value", e_gamma(p, q, g)}};
                j["mutual_information"] = mutual_info_binary(p, q, div_alpha);
            }
            return j;
        };
    });

    // exact-n
    auto* exact = app.add_subcommand("exact-n", "Exact sample complexity from the oracle");
    double ex_alpha = 0.0, ex_delta = 0.0;
    std::optional<double> ex_beta;
    std::uint64_t ex_cap = kDefaultSampleCap;
    pair.add(exact);
    exact->add_option("--alpha", ex_alpha, "Prior on p (Bayesian) or type-I level (with --beta)")->required();
    exact->add_option("--delta", ex_delta, "Target Bayes error");
    exact->add_option("--beta", ex_beta, "Type-II level; selects the prior-free problem");
    exact->add_option("--cap", ex_cap, "Largest n searched");
    add_format(exact, fmt, "json");
    exact->callback([&] {
        action = [&] {
            const auto p = pair.p(), q = pair.q();
            NStarResult r;
            json j;
            if (ex_beta) {
                r = n_star_pf_exact(TestingInstance::prior_free(p, q, ex_alpha, *ex_beta), ex_cap);
                j = {{"problem", "prior_free"}, {"alpha", ex_alpha}, {"beta", *ex_beta}};
            } else {
                r = n_star_bayes_exact(TestingInstance::bayesian(p, q, ex_alpha, ex_delta), ex_cap);
                j = {{"problem", "bayesian"}, {"alpha", ex_alpha}, {"delta", ex_delta}};
            }
            j["n_star"] = count(r.n_star);
            j["exceeds_cap"] = r.exceeds_cap();
            j["cap"] = ex_cap;
            j["trace"] = trace_json(r);
            return j;
        };
    });

    // estimate-n
    auto* est = app.add_subcommand("estimate-n", "Formula-based sample complexity with certified bounds");
    double es_alpha = 0.0, es_delta = 0.0;
    std::optional<double> es_beta;
    pair.add(est);
    est->add_option("--alpha", es_alpha, "Prior on p (Bayesian) or type-I level (with --beta)")->required();
    est->add_option("--delta", es_delta, "Target Bayes error");
    est->add_option("--beta", es_beta, "Type-II level; selects the prior-free problem");
    add_format(est, fmt, "json");
    est->callback([&] {
        action = [&] {
            const auto p = pair.p(), q = pair.q();
            return estimate_json(es_beta ? n_star_pf_estimate(p, q, es_alpha, *es_beta)
                                         : n_star_bayes_estimate(p, q, es_alpha, es_delta));
        };
    });

    // weak-detect
    auto* weak = app.add_subcommand("weak-detect", "Weak detection: target error alpha (1 - gamma)");
    double wd_alpha = 0.5, wd_gamma = 0.1;
    bool wd_examples = false, wd_exact = false;
    weak->add_option("--p", pair.p_path, "Distribution p")->check(CLI::ExistingFile);
    weak->add_option("--q", pair.q_path, "Distribution q")->check(CLI::ExistingFile);
    weak->add_option("--alpha", wd_alpha, "Prior on p");
    weak->add_option("--gamma", wd_gamma, "Advantage over the trivial test");
    weak->add_flag("--exact", wd_exact, "Also run the exact oracle");
    weak->add_flag("--examples", wd_examples, "Run the Gaussian and Bernoulli scaling examples instead");
    add_format(weak, fmt, "json");
    weak->callback([&] {
        action = [&] {
            if (wd_examples) {
                const auto r = weak_detection_examples();
                auto series = [](const SlopeSeries& s) {
                    return json{{"gamma", s.gammas}, {"n_star", s.n_star}, {"slope", s.slope}};
                };
                json cf = json::array();
                for (const auto& c : r.closed_form) {
                    cf.push_back({{"alpha", c.alpha},
                                  {"gamma", c.gamma},
                                  {"epsilon", c.epsilon},
                                  {"closed_form", count(c.closed_form)},
                                  {"oracle", count(c.oracle)}});
                }
                return json{{"gaussian", series(r.gaussian)},
                            {"bernoulli", series(r.bernoulli)},
                            {"bernoulli_tv_error", r.bernoulli_tv_error},
                            {"closed_form", cf},
                            {"closed_form_matches", r.closed_form_matches()}};
            }
            if (pair.p_path.empty() || pair.q_path.empty()) throw StructuralError("weak-detect needs --p and --q or --examples");
            const auto p = pair.p(), q = pair.q();
            json j = estimate_json(weak_detection_bounds(p, q, wd_alpha, wd_gamma));
            if (wd_exact) {
                const auto r = n_star_bayes_exact(TestingInstance::bayesian(p, q, wd_alpha, wd_alpha * (1.0 - wd_gamma)));
                j["exact"] = count(r.n_star);
            }
            return j;
        };
    });

    // verify-inequality
    auto* ver = app.add_subcommand("verify-inequality", "Grid check of JS_alpha against H_{1-lambda}");
    InequalityGrid grid;
    int ver_alphas = 20;
    ver->add_option("--grid", grid.resolution, "Uniform grid resolution per axis");
    ver->add_option("--corners", grid.corner_points, "Log-spaced corner points per side");
    ver->add_option("--alphas", ver_alphas, "Check alpha = 2^-1 .. 2^-k")->check(CLI::Range(1, 60));
    add_format(ver, fmt, "json");
    ver->callback([&] {
        action = [&] {
            grid.alphas = dyadic_alphas(ver_alphas);
            grid.threads = thread_budget();
            const auto r = check_js_h_inequality(grid);
            check_failed = r.violations > 0 || r.chain_violations > 0;
            json per = json::array();
            for (const auto& a : r.per_alpha) {
                per.push_back({{"alpha", a.alpha}, {"lambda", a.lambda}, {"violations", a.violations}, {"max_ratio", a.max_ratio}});
            }
            return json{{"points", r.points},
                        {"violations", r.violations},
                        {"max_violation", r.max_violation},
                        {"max_ratio", r.max_ratio},
                        {"worst", {{"p", r.worst.p_bias}, {"q", r.worst.q_bias}, {"alpha", r.worst.alpha}, {"lambda", r.worst.lambda}}},
                        {"chain_points", r.chain_points},
                        {"chain_violations", r.chain_violations},
                        {"per_alpha", per}};
        };
    });

    // reduce
    auto* red = app.add_subcommand("reduce", "Self-reduction plan and majority boosting bound");
    double rd_alpha = 0.0, rd_delta = 0.0;
    std::optional<double> rd_tau;
    std::uint64_t rd_buckets = 1;
    red->add_option("--alpha", rd_alpha, "Prior")->required();
    red->add_option("--delta", rd_delta, "Target error")->required();
    red->add_option("--tau", rd_tau, "Base error for the boosting bound");
    red->add_option("--buckets", rd_buckets, "Bucket count for the boosting bound");
    add_format(red, fmt, "json");
    red->callback([&] {
        action = [&] {
            const auto plan = plan_self_reduction(rd_alpha, rd_delta);
            json j = {{"T", plan.T},
                      {"alpha_prime", plan.alpha_prime},
                      {"delta_prime", plan.delta_prime},
                      {"direction", plan.direction == ReductionDirection::success_amplification ? "success_amplification"
                                                                                                  : "error_amplification"}};
            if (rd_tau) {
                const auto b = boost_error_bound(*rd_tau, rd_buckets);
                j["boost"] = {{"tau", *rd_tau}, {"buckets", rd_buckets}, {"bound", b.bound}, {"majority_failure", b.majority_failure}};
            }
            return j;
        };
    });

    // quantize
    auto* quant = app.add_subcommand("quantize", "Optimal LLR-interval quantizer");
    std::size_t qz_outputs = 2;
    std::string qz_objective = "h";
    double qz_param = 0.5;
    pair.add(quant);
    quant->add_option("--outputs", qz_outputs, "Number of output symbols D")->required();
    quant->add_option("--objective", qz_objective, "h (H_lambda) or js (JS_alpha)")->check(CLI::IsMember({"h", "js"}));
    quant->add_option("--param", qz_param, "lambda or alpha of the objective");
    add_format(quant, fmt, "json");
    quant->callback([&] {
        action = [&] {
            const auto p = pair.p(), q = pair.q();
            const auto r = optimal_quantizer_dp(p, q, qz_outputs, make_objective(qz_objective, qz_param));
            return json{{"cell_of", r.cell_of}, {"outputs", r.outputs}, {"objective", r.objective},
                        {"channel", channel_json(r.channel())}};
        };
    });

    // ldp
    auto* ldp = app.add_subcommand("ldp", "Approximate best epsilon-LDP binary channel");
    double ldp_eps = 1.0, ldp_param = 0.5;
    std::string ldp_objective = "h";
    std::size_t ldp_outputs = 2;
    pair.add(ldp);
    ldp->add_option("--epsilon", ldp_eps, "Privacy level")->required();
    ldp->add_option("--outputs", ldp_outputs, "Number of outputs (2 supported)");
    ldp->add_option("--objective", ldp_objective, "h or js")->check(CLI::IsMember({"h", "js"}));
    ldp->add_option("--param", ldp_param, "lambda or alpha of the objective");
    add_format(ldp, fmt, "json");
    ldp->callback([&] {
        action = [&] {
            const auto r = ldp_brute_optimize(pair.p(), pair.q(), ldp_eps, ldp_outputs, make_objective(ldp_objective, ldp_param));
            return json{{"objective", r.objective}, {"grid_objective", r.grid_objective}, {"channel", channel_json(r.channel)}};
        };
    });

    // robust-lfd
    auto* lfd = app.add_subcommand("robust-lfd", "Huber least-favorable pair for TV contamination");
    double lfd_eps = 0.0;
    std::optional<double> lfd_alpha, lfd_delta;
    pair.add(lfd);
    lfd->add_option("--epsilon", lfd_eps, "Contamination radius")->required();
    lfd->add_option("--alpha", lfd_alpha, "Prior, to also report exact n* for both pairs");
    lfd->add_option("--delta", lfd_delta, "Target error, with --alpha");
    add_format(lfd, fmt, "json");
    lfd->callback([&] {
        action = [&] {
            const auto p = pair.p(), q = pair.q();
            const auto r = huber_lfd(p, q, lfd_eps);
            json j = {{"epsilon", r.epsilon},
                      {"clip_lo", r.clip_lo},
                      {"clip_hi", r.clip_hi},
                      {"tv_p", r.tv_p},
                      {"tv_q", r.tv_q},
                      {"p_prime", json::parse(to_json(r.p_prime))},
                      {"q_prime", json::parse(to_json(r.q_prime))}};
            if (lfd_alpha && lfd_delta) {
                j["n_star"] = count(n_star_bayes_exact(TestingInstance::bayesian(p, q, *lfd_alpha, *lfd_delta)).n_star);
                j["n_star_robust"] =
                    count(n_star_bayes_exact(TestingInstance::bayesian(r.p_prime, r.q_prime, *lfd_alpha, *lfd_delta)).n_star);
            }
            return j;
        };
    });

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo error of the likelihood-ratio test");
    double sim_alpha = 0.5;
    std::uint64_t sim_n = 1, sim_buckets = 0;
    SimConfig sim_cfg;
    pair.add(sim);
    sim->add_option("--alpha", sim_alpha, "Prior on p")->required();
    sim->add_option("--n", sim_n, "Samples per trial")->required();
    sim->add_option("--trials", sim_cfg.trials, "Number of trials");
    sim->add_option("--seed", sim_cfg.seed, "Random seed");
    sim->add_option("--threshold", sim_cfg.threshold, "LLR threshold; default log((1-alpha)/alpha)");
    sim->add_option("--buckets", sim_buckets, "Majority vote over this many buckets");
    add_format(sim, fmt, "json");
    sim->callback([&] {
        action = [&] {
            sim_cfg.threads = thread_budget();
            const auto p = pair.p(), q = pair.q();
            auto est_json = [](const SimResult& r) {
                return json{{"err_hat", r.err_hat}, {"ci95", {r.ci_lo, r.ci_hi}}, {"errors", r.errors}, {"trials", r.trials}};
            };
            if (sim_buckets > 0) {
                const auto r = simulate_boosted(p, q, sim_alpha, sim_n, sim_buckets, sim_cfg);
                json j = est_json(r.sim);
                j["bucket_size"] = r.bucket_size;
                j["bucket_type_one"] = r.bucket_errors.type_one;
                j["bucket_type_two"] = r.bucket_errors.type_two;
                j["exact_error"] = r.exact_error;
                j["bound"] = r.bound;
                return j;
            }
            return est_json(simulate_lrt(p, q, sim_alpha, sim_n, sim_cfg));
        };
    });

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Estimates over a log-spaced prior grid, one row per point");
    double sw_lo = 1.0 / 1024.0, sw_hi = 0.5, sw_ratio = 0.25;
    std::size_t sw_points = 10;
    bool sw_exact = false;
    std::uint64_t sw_cap = kDefaultSampleCap;
    pair.add(sweep);
    sweep->add_option("--alpha-min", sw_lo, "Smallest prior");
    sweep->add_option("--alpha-max", sw_hi, "Largest prior");
    sweep->add_option("--points", sw_points, "Grid size")->check(CLI::Range(std::size_t{1}, std::size_t{100000}));
    sweep->add_option("--delta-ratio", sw_ratio, "delta = ratio * alpha");
    sweep->add_flag("--exact", sw_exact, "Also run the exact oracle");
    sweep->add_option("--cap", sw_cap, "Largest n searched by the oracle");
    add_format(sweep, fmt, "csv");
    sweep->callback([&] {
        action = [&] {
            const auto p = pair.p(), q = pair.q();
            const auto alphas = log_grid(sw_lo, sw_hi, sw_points);
            std::vector<json> rows(alphas.size());
            parallel_for(alphas.size(), thread_budget(), [&](std::size_t i) {
                const double a = alphas[i], d = sw_ratio * a;
                json row = {{"index", i}, {"alpha", a}, {"delta", d}};
                try {
                    const auto e = n_star_bayes_estimate(p, q, a, d);
                    row["regime"] = std::string(to_string(e.regime));
                    row["lower"] = count(e.lower);
                    row["upper"] = count(e.upper);
                    row["point"] = count(e.point);
                } catch (const DomainError& ex) {
                    row["regime"] = "error";
                    row["lower"] = row["upper"] = row["point"] = nullptr;
                }
                if (sw_exact) row["exact"] = count(n_star_bayes_exact(TestingInstance::bayesian(p, q, a, d), sw_cap).n_star);
                rows[i] = std::move(row);
            });
            return json(rows);
        };
    });

    std::vector<std::string> argv(args.begin(), args.end());
    std::reverse(argv.begin(), argv.end());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << json{{"error", {{"kind", "usage"}, {"message", e.what()}}}}.dump() << '\n';
        return kUsage;
    }

    auto fail = [&](const char* kind, const std::exception& e, int code) {
        err << json{{"error", {{"kind", kind}, {"message", e.what()}}}}.dump() << '\n';
        return code;
    };
    if (fmt.format.empty()) fmt.format = sweep->parsed() ? "csv" : "json";
    try {
        const json result = action();
        if (sweep->parsed() && fmt.format == "csv") {
            const std::vector<std::string> cols = sw_exact ? std::vector<std::string>{"index", "alpha", "delta", "regime", "lower", "upper", "point", "exact"}
                                                           : std::vector<std::string>{"index", "alpha", "delta", "regime", "lower", "upper", "point"};
            for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
            out << '\n';
            for (const auto& row : result) {
                for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << csv_quote(scalar_text(row[cols[c]]));
                out << '\n';
            }
        } else {
            fmt.emit(result, out);
        }
    } catch (const CapacityError& e) {
        return fail("capacity", e, kCapacity);
    } catch (const DomainError& e) {
        return fail("domain", e, kDomain);
    } catch (const StructuralError& e) {
        return fail("structural", e, kDomain);
    } catch (const std::exception& e) {
        return fail("io", e, kUsage);
    }
    return check_failed ? kCheckFailed : kOk;
}

}  // namespace ht::cli
