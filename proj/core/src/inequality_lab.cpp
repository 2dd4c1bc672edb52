#include "ht/inequality_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "ht/divergences.hpp"
#include "ht/errors.hpp"
#include "ht/exact_oracle.hpp"
#include "ht/formulas.hpp"
#include "ht/numeric.hpp"
#include "ht/parallel.hpp"

namespace ht {
namespace {

const double kLog2 = std::log(2.0);

double lambda_for(double alpha) { return 0.5 * kLog2 / std::max(kLog2, -std::log(alpha)); }

// Plain closed forms in extended precision for the finite-difference oracle.
// x log(x/m) with x - m passed separately: x/m is within O(alpha) of 1 and rounding the ratio would
// dominate the finite differences at small alpha.
long double js_plain(long double p, long double q, long double a) {
    auto term = [](long double x, long double m, long double x_minus_m) {
        return x > 0 ? x * std::log1p(x_minus_m / m) : 0.0L;
    };
    const long double m1 = a * p + (1 - a) * q;
    const long double m0 = a * (1 - p) + (1 - a) * (1 - q);
    return a * (term(p, m1, (1 - a) * (p - q)) + term(1 - p, m0, (1 - a) * (q - p))) +
           (1 - a) * (term(q, m1, a * (q - p)) + term(1 - q, m0, a * (p - q)));
}

long double h_bar_plain(long double p, long double q, long double lam) {
    const long double e = 1 - lam;
    auto aff = [&](long double x, long double y) { return x > 0 ? std::pow(x, e) * std::pow(y, lam) : 0.0L; };
    return 1 - aff(p, q) - aff(1 - p, 1 - q);
}

struct Derivs {
    double d1;
    double d2;
};

template <class F>
Derivs five_point(F f, long double q, long double h) {
    const long double fm2 = f(q - 2 * h), fm1 = f(q - h), f0 = f(q), fp1 = f(q + h), fp2 = f(q + 2 * h);
    const long double d1 = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h);
    const long double d2 = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h);
    return {static_cast<double>(d1), static_cast<double>(d2)};
}

double rel_error(double a, double b) {
    const double diff = std::fabs(a - b);
    if (diff <= 1e-11) return 0.0;
    return diff / std::max(std::fabs(a), std::fabs(b));
}

}  // namespace

std::vector<BernoulliMass> bernoulli_grid(std::size_t resolution, std::size_t corner_points, double corner_min) {
    std::vector<BernoulliMass> out;
    if (resolution >= 2) {
        const double d = static_cast<double>(resolution - 1);
        for (std::size_t i = 0; i < resolution; ++i) {
            out.push_back({static_cast<double>(i) / d, static_cast<double>(resolution - 1 - i) / d});
        }
    }
    for (double x : log_grid(corner_min, 1e-2, corner_points)) {
        out.push_back({x, 1.0 - x});
        out.push_back({1.0 - x, x});
    }
    return out;
}

std::vector<double> dyadic_alphas(int count) {
    std::vector<double> a;
    for (int i = 1; i <= count; ++i) a.push_back(std::ldexp(1.0, -i));
    return a;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
    std::vector<double> g;
    if (count == 0) return g;
    if (count == 1) return {lo};
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < count; ++i) {
        g.push_back(std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1)));
    }
    g.front() = lo;
    g.back() = hi;
    return g;
}

double js_h_constant(double alpha, double lambda) {
    return 32.0 * std::exp(2.0 * lambda * -std::log(alpha)) * alpha / lambda;
}

double js_bernoulli(BernoulliMass p, BernoulliMass q, double alpha) {
    return kernel::js_alpha_term(p.one, q.one, alpha) + kernel::js_alpha_term(p.zero, q.zero, alpha);
}

double h_bar_bernoulli(BernoulliMass p, BernoulliMass q, double lambda) {
    const double v = kernel::h_lambda_term(p.one, q.one, 1.0 - lambda) + kernel::h_lambda_term(p.zero, q.zero, 1.0 - lambda);
    return std::clamp(v, 0.0, 1.0);
}

InequalityReport check_js_h_inequality(const InequalityGrid& grid) {
    for (double a : grid.alphas) {
        if (!(a > 0.0 && a <= 0.5)) throw DomainError("grid alphas must lie in (0, 1/2]");
    }
    if (!grid.lambdas.empty() && grid.lambdas.size() != grid.alphas.size()) {
        throw StructuralError("lambdas must be empty or match alphas in length");
    }
    const auto values = bernoulli_grid(grid.resolution, grid.corner_points, grid.corner_min);
    const std::size_t rows = values.size();

    struct RowResult {
        std::uint64_t violations = 0;
        double max_violation = -std::numeric_limits<double>::infinity();
        double max_ratio = 0.0;
        std::size_t worst_q = 0;
        std::uint64_t chain_violations = 0;
        std::uint64_t chain_points = 0;
    };
    const std::size_t na = grid.alphas.size();
    std::vector<RowResult> results(na * rows);

    parallel_for(na * rows, grid.threads, [&](std::size_t job) {
        const std::size_t ai = job / rows;
        const std::size_t pi = job % rows;
        const double alpha = grid.alphas[ai];
        const double lam = grid.lambdas.empty() ? lambda_for(alpha) : grid.lambdas[ai];
        const double c = js_h_constant(alpha, lam);
        const double info = alpha * -std::log(alpha);
        RowResult r;
        const BernoulliMass p = values[pi];
        for (std::size_t qi = 0; qi < rows; ++qi) {
            const BernoulliMass q = values[qi];
            const double js = js_bernoulli(p, q, alpha);
            const double h = h_bar_bernoulli(p, q, lam);
            const double rhs = c * h;
            const double gap = js - rhs;
            if (gap > r.max_violation) r.max_violation = gap;
            if (gap > grid.tolerance) ++r.violations;
            if (rhs > 0.0) {
                const double ratio = js / rhs;
                if (ratio > r.max_ratio) {
                    r.max_ratio = ratio;
                    r.worst_q = qi;
                }
            }
            if (js > 0.0 && h > 0.0) {
                ++r.chain_points;
                const double a = std::ceil(3.0 / 16.0 * info / js);
                const double b = std::ceil(2.0 / h);
                const double d = std::ceil(256.0 / kLog2 * info / js);
                if (!(a <= b && b <= d)) ++r.chain_violations;
            }
        }
        results[job] = r;
    });

    InequalityReport rep;
    rep.max_violation = -std::numeric_limits<double>::infinity();
    rep.per_alpha.resize(na);
    for (std::size_t ai = 0; ai < na; ++ai) {
        AlphaSummary& s = rep.per_alpha[ai];
        s.alpha = grid.alphas[ai];
        s.lambda = grid.lambdas.empty() ? lambda_for(s.alpha) : grid.lambdas[ai];
        for (std::size_t pi = 0; pi < rows; ++pi) {
            const RowResult& r = results[ai * rows + pi];
            s.violations += r.violations;
            s.max_ratio = std::max(s.max_ratio, r.max_ratio);
            rep.violations += r.violations;
            rep.max_violation = std::max(rep.max_violation, r.max_violation);
            rep.chain_violations += r.chain_violations;
            rep.chain_points += r.chain_points;
            if (r.max_ratio > rep.max_ratio) {
                rep.max_ratio = r.max_ratio;
                rep.worst = {values[pi].one, values[r.worst_q].one, s.alpha, s.lambda};
            }
        }
    }
    rep.points = static_cast<std::uint64_t>(rows) * rows * na;
    return rep;
}

double js_dq(double p, double q, double alpha) {
    const double ab = 1.0 - alpha;
    const double m1 = alpha * p + ab * q;
    const double m0 = alpha * (1.0 - p) + ab * (1.0 - q);
    return ab * (std::log(q) - std::log1p(-q) + std::log(m0) - std::log(m1));
}

double js_d2q(double p, double q, double alpha) {
    const double ab = 1.0 - alpha;
    const double pb = 1.0 - p, qb = 1.0 - q;
    const double m1 = alpha * p + ab * q;
    const double m0 = alpha * pb + ab * qb;
    const double num = alpha * p * pb + ab * p * qb + ab * q * pb - ab * q * qb;
    return alpha * ab * num / (q * qb * m1 * m0);
}

double h_bar_dq(double p, double q, double lambda) {
    const double lb = 1.0 - lambda;
    const double a = p > 0.0 ? std::pow(p, lb) * std::pow(q, -lb) : 0.0;
    const double b = p < 1.0 ? std::pow(1.0 - p, lb) * std::pow(1.0 - q, -lb) : 0.0;
    return lambda * (b - a);
}

double h_bar_d2q(double p, double q, double lambda) {
    const double lb = 1.0 - lambda;
    const double a = p > 0.0 ? std::pow(p, lb) * std::pow(q, -lb - 1.0) : 0.0;
    const double b = p < 1.0 ? std::pow(1.0 - p, lb) * std::pow(1.0 - q, -lb - 1.0) : 0.0;
    return lambda * lb * (a + b);
}

DerivativeReport derivative_check(const BernoulliPair& pair, double step, double rel_tol) {
    const double p = pair.p_bias, q = pair.q_bias, a = pair.alpha, lam = pair.lambda;
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p_bias must lie in [0, 1]");
    if (!(q > 2.0 * step && q < 1.0 - 2.0 * step)) {
        throw DomainError("q_bias must be interior, at least two finite-difference steps from {0, 1}");
    }
    if (!(a > 0.0 && a < 1.0) || !(lam > 0.0 && lam < 1.0)) throw DomainError("alpha and lambda must lie in (0, 1)");

    DerivativeReport r;
    r.js_d1 = js_dq(p, q, a);
    r.js_d2 = js_d2q(p, q, a);
    r.h_d1 = h_bar_dq(p, q, lam);
    r.h_d2 = h_bar_d2q(p, q, lam);
    const long double lp = p, la = a, ll = lam;
    const Derivs j = five_point([&](long double x) { return js_plain(lp, x, la); }, q, step);
    const Derivs h = five_point([&](long double x) { return h_bar_plain(lp, x, ll); }, q, step);
    r.js_d1_fd = j.d1;
    r.js_d2_fd = j.d2;
    r.h_d1_fd = h.d1;
    r.h_d2_fd = h.d2;
    r.max_rel_error = std::max({rel_error(r.js_d1, j.d1), rel_error(r.js_d2, j.d2), rel_error(r.h_d1, h.d1),
                                rel_error(r.h_d2, h.d2)});
    r.ok = r.max_rel_error <= rel_tol;
    return r;
}

namespace {

std::vector<double> interior_q_grid(std::size_t q_points) {
    std::vector<double> qs;
    for (std::size_t i = 0; i < q_points; ++i) qs.push_back((static_cast<double>(i) + 0.5) / static_cast<double>(q_points));
    for (double x : log_grid(1e-8, 1e-2, 25)) {
        qs.push_back(x);
        qs.push_back(1.0 - x);
    }
    qs.push_back(0.5);
    std::sort(qs.begin(), qs.end());
    return qs;
}

std::vector<double> p_half_grid(std::size_t p_points) {
    std::vector<double> ps;
    for (std::size_t i = 0; i < p_points; ++i) {
        ps.push_back(0.5 * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(1, p_points - 1)));
    }
    for (double x : log_grid(1e-8, 1e-2, 10)) ps.push_back(x);
    return ps;
}

std::vector<double> lambdas_for(const HessianGrid& grid, double alpha) {
    std::vector<double> l{lambda_for(alpha)};
    for (double x : grid.extra_lambdas) {
        if (x > 0.0 && x <= 0.5) l.push_back(x);
    }
    return l;
}

}  // namespace

HessianReport check_hessian_inequality(const HessianGrid& grid) {
    HessianReport rep;
    rep.low.region = "q <= p <= 1/2";
    rep.high.region = "q >= 1/2";
    rep.mid.region = "p <= q <= 1/2";
    const auto qs = interior_q_grid(grid.q_points);
    const auto ps = p_half_grid(grid.p_points);
    for (double alpha : grid.alphas) {
        for (double lam : lambdas_for(grid, alpha)) {
            const double c = js_h_constant(alpha, lam);
            for (double p : ps) {
                for (double q : qs) {
                    RegionReport& reg = q >= 0.5 ? rep.high : (q <= p ? rep.low : rep.mid);
                    const double lhs = js_d2q(p, q, alpha);
                    const double hd2 = h_bar_d2q(p, q, lam);
                    const double rhs = c * hd2;
                    ++reg.points;
                    if (lhs > rhs * (1.0 + 1e-12)) ++reg.violations;
                    if (rhs > 0.0) reg.worst_relative_slack = std::min(reg.worst_relative_slack, (rhs - lhs) / rhs);
                    // Only where both complements round-trip; otherwise the mirrored input is a different point.
                    if (1.0 - (1.0 - p) != p || 1.0 - (1.0 - q) != q) continue;
                    const double lhs_m = js_d2q(1.0 - p, 1.0 - q, alpha);
                    const double hd2_m = h_bar_d2q(1.0 - p, 1.0 - q, lam);
                    if (rel_error(lhs, lhs_m) > 1e-9 || rel_error(hd2, hd2_m) > 1e-9) ++rep.symmetry_mismatches;
                }
            }
        }
    }
    return rep;
}

ConvexityReport check_convexity(const HessianGrid& grid, std::size_t dense_q) {
    ConvexityReport rep;
    const auto ps = p_half_grid(grid.p_points);
    std::vector<double> f(dense_q);
    for (double alpha : grid.alphas) {
        for (double lam : lambdas_for(grid, alpha)) {
            const double c = js_h_constant(alpha, lam);
            for (double p : ps) {
                const BernoulliMass pm{p, 1.0 - p};
                for (std::size_t i = 0; i < dense_q; ++i) {
                    const double q = (static_cast<double>(i) + 0.5) / static_cast<double>(dense_q);
                    const BernoulliMass qm{q, 1.0 - q};
                    f[i] = c * h_bar_bernoulli(pm, qm, lam) - js_bernoulli(pm, qm, alpha);
                }
                for (std::size_t i = 1; i + 1 < dense_q; ++i) {
                    const double d2 = f[i - 1] - 2.0 * f[i] + f[i + 1];
                    const double scale = std::fabs(f[i - 1]) + 2.0 * std::fabs(f[i]) + std::fabs(f[i + 1]) + 1e-300;
                    ++rep.points;
                    rep.min_second_difference = std::min(rep.min_second_difference, d2 / scale);
                    if (d2 < -1e-12 * scale) ++rep.violations;
                }
            }
        }
    }
    return rep;
}

ClaimReport check_linear_vs_nearly_linear(std::span<const double> x_grid, double alpha, double lambda_star) {
    if (!(alpha > 0.0 && alpha <= 0.5)) throw DomainError("alpha must lie in (0, 1/2]");
    if (!(lambda_star > 0.0 && lambda_star <= 0.5)) throw DomainError("lambda_star must lie in (0, 1/2]");
    const double r = lambda_star * -std::log(alpha);
    ClaimReport rep;
    auto check = [&](double x) {
        if (!(x >= 0.0)) throw DomainError("x must be nonnegative");
        const double log_lhs = std::log1p(x / (1.0 + alpha * x));
        const double log_rhs = 2.0 * r + (1.0 - lambda_star) * std::log1p(x);
        ++rep.points;
        if (log_lhs > log_rhs + 1e-12) ++rep.violations;
        rep.max_ratio = std::max(rep.max_ratio, std::exp(log_lhs - log_rhs));
    };
    check(0.0);
    for (double x : x_grid) check(x);
    const double pivot = 1.0 / alpha;
    check(pivot);
    // Branch x <= 1/alpha bounds the left side by (1+x)^(1-l) (1+1/alpha)^l; branch x > 1/alpha by 1 + 1/alpha.
    rep.small_x_branch_at_pivot = std::pow(1.0 + pivot, 1.0 - lambda_star) * std::pow(1.0 + 1.0 / alpha, lambda_star);
    rep.large_x_branch_at_pivot = 1.0 + 1.0 / alpha;
    return rep;
}

std::vector<JointRangeInstance> random_joint_range_instances(std::size_t count, std::size_t max_k, std::uint64_t seed) {
    if (max_k < 3) throw DomainError("joint-range instances need max_k >= 3");
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> expo(1.0);
    std::uniform_int_distribution<std::size_t> size_dist(3, max_k);
    std::uniform_int_distribution<int> alpha_dist(1, 20);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<JointRangeInstance> out;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t k = size_dist(rng);
        auto draw = [&] {
            std::vector<double> v(k);
            double s = 0.0;
            for (double& x : v) {
                x = unit(rng) < 0.15 ? 0.0 : expo(rng);
                s += x;
            }
            if (s == 0.0) v[0] = s = 1.0;
            for (double& x : v) x /= s;
            return v;
        };
        auto pv = draw();
        auto qv = draw();
        // Pull q toward p half the time so near-diagonal pairs are covered.
        if (unit(rng) < 0.5) {
            const double t = std::pow(unit(rng), 3.0);
            for (std::size_t j = 0; j < k; ++j) qv[j] = t * qv[j] + (1.0 - t) * pv[j];
        }
        out.push_back({Distribution(std::move(pv)), Distribution(std::move(qv)), std::ldexp(1.0, -alpha_dist(rng))});
    }
    return out;
}

JointRangeReport joint_range_transfer_check(std::span<const JointRangeInstance> instances) {
    JointRangeReport rep;
    for (const auto& inst : instances) {
        require_same_support(inst.p, inst.q);
        const double lam = lambda_for(inst.alpha);
        const double c = js_h_constant(inst.alpha, lam);
        const double js = kernel::js_alpha(inst.p.probs(), inst.q.probs(), inst.alpha);
        const double h = kernel::h_lambda(inst.p.probs(), inst.q.probs(), 1.0 - lam);
        ++rep.instances;
        if (js > c * h + 1e-12) ++rep.violations;
        if (c * h > 0.0) rep.max_ratio = std::max(rep.max_ratio, js / (c * h));

        // Binary coarsening: split the LLR-sorted support at its middle.
        const std::size_t k = inst.p.size();
        std::vector<std::size_t> order(k);
        std::iota(order.begin(), order.end(), 0);
        auto llr = [&](std::size_t i) {
            const double a = inst.p[i], b = inst.q[i];
            if (b == 0.0) return a == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
            if (a == 0.0) return -std::numeric_limits<double>::infinity();
            return std::log(a / b);
        };
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return llr(x) < llr(y); });
        std::vector<std::size_t> cell(k);
        for (std::size_t r = 0; r < k; ++r) cell[order[r]] = r < k / 2 ? 0 : 1;
        const Distribution pc = inst.p.coarsen(cell, 2);
        const Distribution qc = inst.q.coarsen(cell, 2);
        const double js_c = kernel::js_alpha(pc.probs(), qc.probs(), inst.alpha);
        const double h_c = kernel::h_lambda(pc.probs(), qc.probs(), 1.0 - lam);
        if (js_c > js + 1e-12 || h_c > h + 1e-12 || js_c > c * h_c + 1e-12) ++rep.coarsening_violations;
    }
    return rep;
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw DomainError("slope fit needs at least two paired points");
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

std::size_t WeakDetectionReport::closed_form_matches() const {
    return static_cast<std::size_t>(std::count_if(closed_form.begin(), closed_form.end(),
                                                  [](const ClosedFormPoint& c) { return c.closed_form == c.oracle; }));
}

namespace {

double series_slope(const SlopeSeries& s) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < s.gammas.size(); ++i) {
        lx.push_back(std::log(s.gammas[i]));
        ly.push_back(std::log(static_cast<double>(s.n_star[i])));
    }
    return fit_slope(lx, ly);
}

}  // namespace

WeakDetectionReport weak_detection_examples(const WeakDetectionConfig& cfg) {
    WeakDetectionReport rep;
    const auto gammas = log_grid(cfg.gamma_lo, cfg.gamma_hi, cfg.gamma_points);

    // Gaussian pair N(s/2, 1) vs N(-s/2, 1): smallest n with TV >= gamma, by bisection on n.
    const double half = cfg.gaussian_separation / 2.0;
    for (double g : gammas) {
        std::uint64_t lo = 0, hi = 1;
        while (gaussian_tv(half, -half, hi) < g) {
            lo = hi;
            hi *= 2;
            if (hi > (std::uint64_t{1} << 62)) throw CapacityError("Gaussian separation too small for this gamma");
        }
        while (hi - lo > 1) {
            const std::uint64_t mid = lo + (hi - lo) / 2;
            (gaussian_tv(half, -half, mid) >= g ? hi : lo) = mid;
        }
        rep.gaussian.gammas.push_back(g);
        rep.gaussian.n_star.push_back(hi);
    }
    rep.gaussian.slope = series_slope(rep.gaussian);

    // Ber(1) vs Ber(1 - eps): TV after n samples is 1 - (1 - eps)^n.
    const double eps = cfg.bernoulli_epsilon;
    const Distribution p1({0.0, 1.0});
    const Distribution q1({eps, 1.0 - eps});
    auto tv_oracle = [&](std::uint64_t n) { return 1.0 - 2.0 * bayes_error_exact(p1, q1, 0.5, n); };
    auto tv_closed = [&](std::uint64_t n) { return -std::expm1(static_cast<double>(n) * std::log1p(-eps)); };
    for (std::uint64_t n : {1, 2, 3, 10, 100, 1000}) {
        rep.bernoulli_tv_error = std::max(rep.bernoulli_tv_error, std::fabs(tv_oracle(n) - tv_closed(n)));
    }
    for (double g : gammas) {
        std::uint64_t n = ceil_count(std::log1p(-g) / std::log1p(-eps));
        while (n > 1 && tv_oracle(n - 1) >= g) --n;
        while (tv_oracle(n) < g) ++n;
        rep.bernoulli_tv_error = std::max(rep.bernoulli_tv_error, std::fabs(tv_oracle(n) - tv_closed(n)));
        rep.bernoulli.gammas.push_back(g);
        rep.bernoulli.n_star.push_back(n);
    }
    rep.bernoulli.slope = series_slope(rep.bernoulli);

    // Ber(0) vs Ber(eps) at delta = alpha (1 - gamma).
    for (double a : {0.05, 0.1, 0.2, 0.3, 0.5}) {
        for (double g : {0.01, 0.1}) {
            for (double e : {0.05, 0.2}) {
                ClosedFormPoint c{a, g, e, 0, 0};
                const double gb = 1.0 - g;
                c.closed_form = ceil_count(std::log((1.0 - a) / (a * gb)) / -std::log1p(-e));
                const auto r = n_star_bayes_exact(
                    TestingInstance::bayesian(Distribution::bernoulli(0.0), Distribution::bernoulli(e), a, a * gb));
                c.oracle = r.n_star.value_or(kUnbounded);
                rep.closed_form.push_back(c);
            }
        }
    }
    return rep;
}

}  // namespace ht
