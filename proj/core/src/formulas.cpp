#include "ht/formulas.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ht/divergences.hpp"
#include "ht/errors.hpp"
#include "ht/numeric.hpp"

namespace ht {
namespace {

const double kLog2 = std::log(2.0);

void check_prior(double alpha) {
    if (!(alpha > 0.0 && alpha <= 0.5)) throw DomainError("prior alpha must lie in (0, 1/2]");
}

void check_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in (0, 1)");
}

// log((1 - a) / a)
double log_odds(double alpha) { return std::log1p(-alpha) - std::log(alpha); }

std::uint64_t fano_lower(double js, double alpha, double gamma) {
    if (!(js > 0.0)) return kUnbounded;
    return ceil_count((alpha * gamma * log_odds(alpha) + alpha * alpha * gamma * gamma) / js);
}

// From P_e >= alpha (1 - alpha) (1 - h^2)^(2n), a Cauchy-Schwarz bound on sum min(a_i, b_i).
std::uint64_t bhattacharyya_lower(double h_sq, double alpha, double delta) {
    if (!(h_sq > 0.0)) return kUnbounded;
    const double num = std::log(alpha) + std::log1p(-alpha) - std::log(delta);
    if (num <= 0.0 || h_sq >= 1.0) return 0;
    return ceil_count(num / (-2.0 * std::log1p(-h_sq)));
}

std::uint64_t chernoff_upper(double h_bar, double lambda, double alpha, double gamma_bar) {
    if (!(h_bar > 0.0)) return kUnbounded;
    return ceil_count((lambda * log_odds(alpha) - std::log(gamma_bar)) / h_bar);
}

struct Certified {
    std::uint64_t lower;
    std::uint64_t upper;
};

// Certified bounds on n*_B(p, q, alpha, delta) for delta < alpha; records the ingredients.
Certified certified_bayes_bounds(const Distribution& p, const Distribution& q, double alpha, double delta,
                                 ComplexityEstimate& e) {
    const double gamma = 1.0 - delta / alpha;
    const double js = kernel::js_alpha(p.probs(), q.probs(), alpha);
    const double h_sq = kernel::hellinger_sq(p.probs(), q.probs());
    const std::uint64_t fano = fano_lower(js, alpha, gamma);
    const std::uint64_t bhat = bhattacharyya_lower(h_sq, alpha, delta);

    std::uint64_t best_upper = kUnbounded;
    double best_lambda = default_lambda(alpha);
    std::vector<double> lambdas{default_lambda(alpha)};
    for (int i = 1; i < 20; ++i) lambdas.push_back(i / 20.0);
    for (double lam : lambdas) {
        const double h_bar = kernel::h_lambda(p.probs(), q.probs(), 1.0 - lam);
        const std::uint64_t u = chernoff_upper(h_bar, lam, alpha, delta / alpha);
        if (u < best_upper) {
            best_upper = u;
            best_lambda = lam;
        }
    }
    e.diagnostics.push_back({"js_alpha", js});
    e.diagnostics.push_back({"hellinger_sq", h_sq});
    e.diagnostics.push_back({"fano_lower", static_cast<double>(fano)});
    e.diagnostics.push_back({"bhattacharyya_lower", static_cast<double>(bhat)});
    e.diagnostics.push_back({"chernoff_upper", static_cast<double>(best_upper)});
    e.diagnostics.push_back({"chernoff_lambda", best_lambda});
    if (h_sq > 0.125) e.warnings.push_back("h^2(p, q) > 0.125: outside the small-divergence hypothesis");

    std::uint64_t lower = fano == kUnbounded ? kUnbounded : std::max<std::uint64_t>({fano, bhat, 1});
    return {lower, best_upper};
}

void finish(ComplexityEstimate& e, Certified c) {
    e.lower = c.lower;
    e.upper = c.upper;
    e.point = geometric_point(c.lower, c.upper);
}

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(6);
    s << x;
    return s.str();
}

}  // namespace

std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::linear: return "linear";
        case Regime::sublinear: return "sublinear";
        case Regime::polynomial: return "polynomial";
        case Regime::vacuous: return "vacuous";
        case Regime::weak_detection: return "weak_detection";
    }
    return "unknown";
}

double ComplexityEstimate::diagnostic(std::string_view name) const {
    for (const auto& d : diagnostics) {
        if (d.name == name) return d.value;
    }
    throw std::out_of_range("no diagnostic named " + std::string(name));
}

double default_lambda(double alpha) {
    check_prior(alpha);
    const double log_inv = std::max(kLog2, -std::log(alpha));
    return 0.5 * kLog2 / log_inv;
}

Regime bayes_regime(double alpha, double delta) {
    check_prior(alpha);
    if (!(delta > 0.0)) throw DomainError("delta must be positive");
    if (delta >= alpha) return Regime::vacuous;
    if (delta > alpha / 4.0) return Regime::weak_detection;
    if (delta <= alpha * alpha) return Regime::polynomial;
    if (delta <= alpha / 100.0) return Regime::sublinear;
    return Regime::linear;
}

std::uint64_t geometric_point(std::uint64_t lower, std::uint64_t upper) {
    if (upper == kUnbounded || lower == kUnbounded) return kUnbounded;
    if (upper <= lower) return lower;
    const double g = std::sqrt(static_cast<double>(lower)) * std::sqrt(static_cast<double>(upper));
    return std::clamp(ceil_count(g), lower, upper);
}

ComplexityEstimate n_star_bayes_estimate(const Distribution& p, const Distribution& q, double alpha, double delta) {
    require_same_support(p, q);
    ComplexityEstimate e;
    e.regime = bayes_regime(alpha, delta);
    if (e.regime == Regime::vacuous) {
        e.formula_trace = "delta >= alpha: the constant test answering q already meets the target";
        return e;
    }
    if (e.regime == Regime::weak_detection) {
        throw DomainError("delta in (alpha/4, alpha) is weak detection; use weak_detection_bounds");
    }
    const Certified c = certified_bayes_bounds(p, q, alpha, delta, e);
    finish(e, c);

    const double lam = default_lambda(alpha);
    const double js = e.diagnostic("js_alpha");
    const double h_sq = e.diagnostic("hellinger_sq");
    const double log_inv = -std::log(alpha);
    std::ostringstream t;
    t << "lower = max(Fano at gamma = 1 - delta/alpha, Bhattacharyya, 1); upper = min over lambda of "
         "ceil((lambda log((1-a)/a) + log(alpha/delta)) / H_{1-lambda}); point = geometric mean. ";
    switch (e.regime) {
        case Regime::linear: {
            const double h_bar = kernel::h_lambda(p.probs(), q.probs(), 1.0 - lam);
            e.diagnostics.push_back({"lambda", lam});
            e.diagnostics.push_back({"h_one_minus_lambda", h_bar});
            e.diagnostics.push_back({"characterization", 1.0 / h_bar});
            e.diagnostics.push_back({"mutual_information_form", alpha * log_inv / js});
            e.diagnostics.push_back({"headline_lower", std::ceil(3.0 / 16.0 * alpha * log_inv / js)});
            e.diagnostics.push_back({"headline_upper", std::ceil(2.0 / h_bar)});
            e.diagnostics.push_back({"headline_upper_js", std::ceil(256.0 / kLog2 * alpha * log_inv / js)});
            t << "linear: n ~ 1/H_{1-lambda} = " << fmt(1.0 / h_bar) << " with lambda = " << fmt(lam);
            break;
        }
        case Regime::sublinear: {
            const double T = std::floor(std::log(alpha / delta) / std::log(8.0));
            const double alpha_r = std::pow(alpha, 1.0 / T);
            const double lam_r = default_lambda(std::min(0.5, alpha_r));
            const double h_bar = kernel::h_lambda(p.probs(), q.probs(), 1.0 - lam_r);
            e.diagnostics.push_back({"T", T});
            e.diagnostics.push_back({"alpha_reduced", alpha_r});
            e.diagnostics.push_back({"self_reduction_ratio", std::pow(delta, 1.0 / T) / alpha_r});
            e.diagnostics.push_back({"characterization", std::log(alpha / delta) / h_bar});
            t << "sublinear: n ~ log(alpha/delta) / H_{1-lambda'} = " << fmt(std::log(alpha / delta) / h_bar)
              << " with T = " << T << ", alpha' = " << fmt(alpha_r);
            break;
        }
        case Regime::polynomial: {
            e.diagnostics.push_back({"characterization", -std::log(delta) / h_sq});
            e.diagnostics.push_back({"hellinger_sandwich_lower", std::log(alpha / delta) / h_sq});
            e.diagnostics.push_back({"hellinger_sandwich_upper", -std::log(delta) / h_sq});
            t << "polynomial: n ~ log(1/delta)/h^2 = " << fmt(-std::log(delta) / h_sq);
            break;
        }
        default: break;
    }
    e.formula_trace = t.str();
    return e;
}

ComplexityEstimate n_star_pf_estimate(const Distribution& p, const Distribution& q, double alpha_t1, double beta_t2) {
    require_same_support(p, q);
    ComplexityEstimate e;
    if (alpha_t1 + beta_t2 >= 1.0) {
        e.regime = Regime::vacuous;
        e.formula_trace = "alpha + beta >= 1: a coin flip meets both error levels";
        return e;
    }
    if (!(alpha_t1 > 0.0 && alpha_t1 <= 0.125 && beta_t2 > 0.0 && beta_t2 <= 0.125)) {
        throw DomainError("prior-free error levels must lie in (0, 1/8]");
    }
    const double sum = alpha_t1 + beta_t2;
    const double prior = std::min(alpha_t1, beta_t2) / sum;
    const double delta_upper = alpha_t1 * beta_t2 / sum;
    const double delta_lower = 2.0 * delta_upper;
    // Prior beta/(a+b) on p; when beta > alpha relabel so the first argument carries the smaller prior.
    const bool swapped = beta_t2 > alpha_t1;
    const Distribution& first = swapped ? q : p;
    const Distribution& second = swapped ? p : q;

    const ComplexityEstimate lo = n_star_bayes_estimate(first, second, prior, delta_lower);
    const ComplexityEstimate hi = n_star_bayes_estimate(first, second, prior, delta_upper);
    e.regime = hi.regime;
    e.lower = lo.lower;
    e.upper = hi.upper;
    e.point = geometric_point(e.lower, e.upper);
    e.warnings = hi.warnings;
    const double h_sq = hi.diagnostic("hellinger_sq");
    e.diagnostics.push_back({"bayes_prior", prior});
    e.diagnostics.push_back({"bayes_delta_lower", delta_lower});
    e.diagnostics.push_back({"bayes_delta_upper", delta_upper});
    e.diagnostics.push_back({"swapped", swapped ? 1.0 : 0.0});
    e.diagnostics.push_back({"hellinger_sq", h_sq});
    e.diagnostics.push_back({"hellinger_sandwich_lower", -std::log(std::max(alpha_t1, beta_t2)) / h_sq});
    e.diagnostics.push_back({"hellinger_sandwich_upper", -std::log(std::min(alpha_t1, beta_t2)) / h_sq});
    e.diagnostics.push_back({"bayes_point", static_cast<double>(hi.point)});
    std::ostringstream t;
    t << "prior-free via Bayesian prior " << fmt(prior) << (swapped ? " on q" : " on p") << ": lower from delta = "
      << fmt(delta_lower) << ", upper from delta = " << fmt(delta_upper) << "; " << hi.formula_trace;
    e.formula_trace = t.str();
    return e;
}

BoundPair general_bayes_bounds(const Distribution& p, const Distribution& q, double alpha, double gamma,
                               double lambda) {
    require_same_support(p, q);
    check_prior(alpha);
    check_gamma(gamma);
    if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in (0, 1)");
    const double js = kernel::js_alpha(p.probs(), q.probs(), alpha);
    const double h_bar = kernel::h_lambda(p.probs(), q.probs(), 1.0 - lambda);
    return {fano_lower(js, alpha, gamma), chernoff_upper(h_bar, lambda, alpha, 1.0 - gamma)};
}

ComplexityEstimate weak_detection_bounds(const Distribution& p, const Distribution& q, double alpha, double gamma) {
    require_same_support(p, q);
    check_prior(alpha);
    check_gamma(gamma);
    ComplexityEstimate e;
    e.regime = Regime::weak_detection;
    const double gamma_bar = 1.0 - gamma;
    const double log_inv_gbar = -std::log1p(-gamma);
    const double lam = std::min(0.5, log_inv_gbar / std::max(log_odds(alpha), 1e-300));
    const double js = kernel::js_alpha(p.probs(), q.probs(), alpha);
    const double h_sq = kernel::hellinger_sq(p.probs(), q.probs());
    const double h_bar = kernel::h_lambda(p.probs(), q.probs(), 1.0 - lam);
    const double log_inv = -std::log(alpha);

    const std::uint64_t fano = fano_lower(js, alpha, gamma);
    const std::uint64_t bhat = bhattacharyya_lower(h_sq, alpha, alpha * gamma_bar);
    e.lower = fano == kUnbounded ? kUnbounded : std::max<std::uint64_t>({fano, bhat, 1});
    e.upper = js > 0.0 ? ceil_count(64.0 * alpha * log_inv_gbar * std::exp(2.0 * lam * log_inv) / (lam * js))
                       : kUnbounded;
    e.point = geometric_point(e.lower, e.upper);

    const double eta = 0.5 - alpha;
    const double g_eta = std::max(gamma, eta);
    e.diagnostics.push_back({"lambda", lam});
    e.diagnostics.push_back({"js_alpha", js});
    e.diagnostics.push_back({"hellinger_sq", h_sq});
    e.diagnostics.push_back({"fano_lower", static_cast<double>(fano)});
    e.diagnostics.push_back({"chernoff_upper", static_cast<double>(chernoff_upper(h_bar, lam, alpha, gamma_bar))});
    e.diagnostics.push_back({"near_uniform_lower", gamma * g_eta / h_sq});
    e.diagnostics.push_back({"near_uniform_upper", g_eta / h_sq});
    if (alpha <= 0.25) {
        e.diagnostics.push_back({"small_prior_lower", alpha * gamma * log_inv / js});
        e.diagnostics.push_back({"small_prior_upper", alpha * log_inv / js});
    }
    std::ostringstream t;
    t << "weak detection at delta = alpha (1 - gamma) = " << fmt(alpha * gamma_bar)
      << ": lower = Fano (a g log((1-a)/a) + a^2 g^2)/JS; upper = 64 a log(1/(1-g)) e^{2 lambda log(1/a)}/(lambda JS)"
      << " with lambda = " << fmt(lam);
    e.formula_trace = t.str();
    return e;
}

double gaussian_tv(double mu1, double mu2, std::uint64_t n) {
    // 2 Phi(x) - 1 = erf(x / sqrt 2)
    const double x = std::sqrt(static_cast<double>(n)) * std::fabs(mu1 - mu2) / 2.0;
    return std::erf(x / std::sqrt(2.0));
}

}  // namespace ht
