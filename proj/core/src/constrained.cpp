#include "ht/constrained.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ht/divergences.hpp"
#include "ht/errors.hpp"
#include "ht/formulas.hpp"
#include "ht/numeric.hpp"

namespace ht {
namespace {

constexpr double kRowTolerance = 1e-12;

double llr_key(double p, double q) {
    if (q == 0.0) return p == 0.0 ? 0.0 : kInf;
    if (p == 0.0) return -kInf;
    return std::log(p / q);
}

std::vector<std::size_t> llr_order(const Distribution& p, const Distribution& q) {
    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return llr_key(p[a], q[a]) < llr_key(p[b], q[b]); });
    return order;
}

// Smallest c with sum over {p > c q} of (p - c q)/(1 + c) equal to eps.
double upper_clip(std::span<const double> p, std::span<const double> q, double eps) {
    struct Sym {
        double ratio, p, q;
    };
    std::vector<Sym> syms;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] + q[i] > 0.0) syms.push_back({q[i] == 0.0 ? kInf : p[i] / q[i], p[i], q[i]});
    }
    std::sort(syms.begin(), syms.end(), [](const Sym& a, const Sym& b) { return a.ratio > b.ratio; });
    CompensatedSum a, b;
    std::size_t i = 0;
    while (i < syms.size()) {
        const double top = syms[i].ratio;
        while (i < syms.size() && syms[i].ratio == top) {
            a += syms[i].p;
            b += syms[i].q;
            ++i;
        }
        const double next = i < syms.size() ? syms[i].ratio : 0.0;
        const double c = (a.value() - eps) / (b.value() + eps);
        if (c >= next) return c;
    }
    return 0.0;
}

}  // namespace

void Channel::validate() const {
    if (matrix.empty()) throw StructuralError("channel has no rows");
    const std::size_t cols = matrix.front().size();
    if (cols == 0) throw StructuralError("channel has no outputs");
    for (const auto& row : matrix) {
        if (row.size() != cols) throw StructuralError("channel rows have different lengths");
        CompensatedSum s;
        for (double v : row) {
            if (!(v >= 0.0)) throw DomainError("channel entries must be nonnegative");
            s += v;
        }
        if (std::fabs(s.value() - 1.0) > kRowTolerance) throw DomainError("channel rows must sum to 1");
    }
    if (epsilon_ldp && !ldp_feasible(*this, *epsilon_ldp)) throw DomainError("channel violates its LDP level");
}

Distribution push_forward(const Channel& ch, const Distribution& p) {
    if (ch.inputs() != p.size()) throw StructuralError("channel input size differs from the distribution support");
    std::vector<CompensatedSum> out(ch.outputs());
    for (std::size_t x = 0; x < p.size(); ++x) {
        for (std::size_t y = 0; y < ch.outputs(); ++y) out[y] += p[x] * ch.matrix[x][y];
    }
    std::vector<double> probs;
    for (const auto& s : out) probs.push_back(s.value());
    return Distribution(std::move(probs));
}

double Objective::term(double p, double q) const {
    return kind == Kind::h_lambda ? kernel::h_lambda_term(p, q, param) : kernel::js_alpha_term(p, q, param);
}

double Objective::operator()(const Distribution& p, const Distribution& q) const {
    return kind == Kind::h_lambda ? h_lambda(p, q, param) : js_alpha(p, q, param);
}

std::string Objective::name() const { return kind == Kind::h_lambda ? "h_lambda" : "js_alpha"; }

Channel Quantizer::channel() const {
    Channel ch;
    ch.matrix.assign(cell_of.size(), std::vector<double>(outputs, 0.0));
    for (std::size_t x = 0; x < cell_of.size(); ++x) ch.matrix[x][cell_of[x]] = 1.0;
    return ch;
}

Quantizer optimal_quantizer_dp(const Distribution& p, const Distribution& q, std::size_t outputs, const Objective& obj) {
    require_same_support(p, q);
    if (outputs == 0) throw DomainError("a quantizer needs at least one output");
    if (!(obj.param > 0.0 && obj.param < 1.0)) throw DomainError("objective parameter must lie in (0, 1)");
    const std::size_t k = p.size();
    const std::size_t cells = std::min(outputs, k);
    const auto order = llr_order(p, q);

    // value[j][c]: best objective splitting sorted positions [j, k) into c nonempty runs.
    const double neg = -kInf;
    std::vector<std::vector<double>> value(k + 1, std::vector<double>(cells + 1, neg));
    std::vector<std::vector<double>> run(k + 1, std::vector<double>(k + 1, 0.0));
    for (std::size_t j = 0; j < k; ++j) {
        CompensatedSum pm, qm;
        for (std::size_t e = j + 1; e <= k; ++e) {
            pm += p[order[e - 1]];
            qm += q[order[e - 1]];
            run[j][e] = obj.term(pm.value(), qm.value());
        }
    }
    value[k][0] = 0.0;
    for (std::size_t c = 1; c <= cells; ++c) {
        for (std::size_t j = 0; j + c <= k; ++j) {
            double best = neg;
            for (std::size_t e = j + 1; e + (c - 1) <= k; ++e) {
                if (value[e][c - 1] == neg) continue;
                best = std::max(best, run[j][e] + value[e][c - 1]);
            }
            value[j][c] = best;
        }
    }

    Quantizer out;
    out.outputs = outputs;
    out.cell_of.assign(k, 0);
    std::size_t j = 0;
    for (std::size_t c = cells; c >= 1; --c) {
        const double target = value[j][c];
        const double tol = 1e-13 * std::max(1.0, std::fabs(target));
        std::size_t end = k;
        for (std::size_t e = j + 1; e + (c - 1) <= k; ++e) {
            if (value[e][c - 1] != neg && run[j][e] + value[e][c - 1] >= target - tol) {
                end = e;
                break;
            }
        }
        for (std::size_t r = j; r < end; ++r) out.cell_of[order[r]] = cells - c;
        j = end;
    }
    out.objective = obj(p.coarsen(out.cell_of, cells), q.coarsen(out.cell_of, cells));
    return out;
}

ConstrainedReport constrained_complexity_check(const Distribution& p, const Distribution& q, double alpha, double delta,
                                               std::size_t outputs, std::uint64_t n_cap) {
    ConstrainedReport rep;
    const double lam = default_lambda(std::min(alpha, 1.0 - alpha));
    const auto base = n_star_bayes_exact(TestingInstance::bayesian(p, q, alpha, delta), n_cap);
    rep.n_star = base.n_star;

    const Objective candidates[] = {Objective::hellinger(lam), Objective::jensen_shannon(alpha)};
    for (const Objective& obj : candidates) {
        const Quantizer quant = optimal_quantizer_dp(p, q, outputs, obj);
        const std::size_t cells = std::min(outputs, p.size());
        const auto pq = p.coarsen(quant.cell_of, cells);
        const auto qq = q.coarsen(quant.cell_of, cells);
        const auto res = n_star_bayes_exact(TestingInstance::bayesian(pq, qq, alpha, delta), n_cap);
        const std::uint64_t got = res.n_star.value_or(kUnbounded);
        if (!rep.n_quantized || got < *rep.n_quantized) {
            rep.n_quantized = got;
            rep.objective_used = obj.name();
        }
    }
    if (*rep.n_quantized == kUnbounded) rep.n_quantized.reset();

    if (rep.n_star && *rep.n_star > 0) {
        const double ns = static_cast<double>(*rep.n_star);
        const double d = static_cast<double>(outputs);
        rep.factor_alpha = std::max(1.0, std::log(ns / alpha) / d);
        rep.factor_plain = std::max(1.0, std::log(ns) / d);
        rep.ceiling = ns * rep.factor_alpha;
        rep.ratio = rep.n_quantized ? static_cast<double>(*rep.n_quantized) / ns : kInf;
    }
    if (rep.n_star && rep.n_quantized) rep.data_processing_holds = *rep.n_star <= *rep.n_quantized;
    if (rep.n_quantized && !rep.n_star) rep.data_processing_holds = false;
    return rep;
}

bool ldp_feasible(const Channel& ch, double epsilon) {
    if (std::isnan(epsilon) || epsilon < 0.0) return false;
    if (std::isinf(epsilon)) return true;
    const double factor = std::exp(epsilon);
    for (std::size_t y = 0; y < ch.outputs(); ++y) {
        double lo = kInf, hi = 0.0;
        for (const auto& row : ch.matrix) {
            lo = std::min(lo, row[y]);
            hi = std::max(hi, row[y]);
        }
        if (hi > factor * lo + 1e-12) return false;
    }
    return true;
}

LdpSearchResult ldp_brute_optimize(const Distribution& p, const Distribution& q, double epsilon, std::size_t outputs,
                                   const Objective& obj) {
    require_same_support(p, q);
    const std::size_t k = p.size();
    if (k > 4 || outputs != 2) throw CapacityError("LDP search is limited to |X| <= 4 inputs and 2 outputs");
    if (std::isnan(epsilon) || epsilon < 0.0) throw DomainError("epsilon must be nonnegative");

    // Row x of the channel is (a[x], 1 - a[x]).
    auto channel_of = [&](const std::vector<double>& a) {
        Channel ch;
        for (double v : a) ch.matrix.push_back({v, 1.0 - v});
        return ch;
    };
    auto feasible = [&](const std::vector<double>& a) {
        if (std::isinf(epsilon)) return true;
        const auto [mn, mx] = std::minmax_element(a.begin(), a.end());
        const double f = std::exp(epsilon);
        return *mx <= f * *mn + 1e-12 && (1.0 - *mn) <= f * (1.0 - *mx) + 1e-12;
    };
    auto value = [&](const std::vector<double>& a) {
        CompensatedSum p1, q1, p0, q0;
        for (std::size_t x = 0; x < k; ++x) {
            p1 += p[x] * a[x];
            q1 += q[x] * a[x];
            p0 += p[x] * (1.0 - a[x]);
            q0 += q[x] * (1.0 - a[x]);
        }
        return obj.term(p1.value(), q1.value()) + obj.term(p0.value(), q0.value());
    };

    constexpr int kSteps = 64;
    std::vector<double> best_a(k, 0.0);
    double best = value(best_a);
    std::vector<int> idx(k, 0);
    std::vector<double> a(k);
    // Output relabelling maps a to 1 - a, so a[0] <= 1/2 covers every channel.
    while (true) {
        for (std::size_t x = 0; x < k; ++x) a[x] = static_cast<double>(idx[x]) / kSteps;
        if (feasible(a)) {
            const double v = value(a);
            if (v > best) {
                best = v;
                best_a = a;
            }
        }
        std::size_t pos = k;
        for (std::size_t x = k; x-- > 0;) {
            const int limit = x == 0 ? kSteps / 2 : kSteps;
            if (idx[x] < limit) {
                ++idx[x];
                pos = x;
                break;
            }
            idx[x] = 0;
        }
        if (pos == k) break;
    }
    LdpSearchResult res;
    res.grid_objective = best;

    for (double step = 1.0 / 128.0; step >= std::ldexp(1.0, -20); step /= 2.0) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (std::size_t x = 0; x < k; ++x) {
                for (double dir : {1.0, -1.0}) {
                    std::vector<double> t = best_a;
                    t[x] = std::clamp(t[x] + dir * step, 0.0, 1.0);
                    if (!feasible(t)) continue;
                    const double v = value(t);
                    if (v > best + 1e-15) {
                        best = v;
                        best_a = std::move(t);
                        improved = true;
                    }
                }
            }
        }
    }

    // Two-level channels: rows in S send output 0 with e^eps/(1+e^eps), the rest with 1/(1+e^eps).
    // hi is rounded down and lo = 1 - hi is exact, so the pair stays feasible even when e^-eps is below one ulp.
    const double hi = std::isinf(epsilon) ? 1.0 : std::nextafter(1.0 / (1.0 + std::exp(-epsilon)), 0.0);
    const double lo = 1.0 - hi;
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
        std::vector<double> t(k);
        for (std::size_t x = 0; x < k; ++x) t[x] = (mask >> x) & 1u ? hi : lo;
        if (!feasible(t)) continue;
        const double v = value(t);
        if (v > best + 1e-15) {
            best = v;
            best_a = std::move(t);
        }
    }

    res.channel = channel_of(best_a);
    if (!std::isinf(epsilon)) res.channel.epsilon_ldp = epsilon;
    res.objective = best;
    return res;
}

LfdPair huber_lfd(const Distribution& p, const Distribution& q, double epsilon) {
    require_same_support(p, q);
    const double tv = classic_divergences(p, q).tv;
    if (!(epsilon > 0.0)) throw DomainError("contamination radius must be positive");
    if (!(epsilon < tv / 2.0)) throw DomainError("contamination radius must be below TV(p, q)/2; the neighborhoods overlap");

    const double c_hi = upper_clip(p.probs(), q.probs(), epsilon);
    const double c_lo = 1.0 / upper_clip(q.probs(), p.probs(), epsilon);
    if (!(c_lo < c_hi)) throw DomainError("clip thresholds crossed; contamination radius too large");

    const std::size_t k = p.size();
    std::vector<double> pp(k), qp(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double a = p[i], b = q[i];
        if (a > c_hi * b) {
            pp[i] = c_hi * (a + b) / (1.0 + c_hi);
            qp[i] = (a + b) / (1.0 + c_hi);
        } else if (a < c_lo * b) {
            pp[i] = c_lo * (a + b) / (1.0 + c_lo);
            qp[i] = (a + b) / (1.0 + c_lo);
        } else {
            pp[i] = a;
            qp[i] = b;
        }
    }
    LfdPair out;
    out.p_prime = Distribution(std::move(pp), p.labels());
    out.q_prime = Distribution(std::move(qp), q.labels());
    out.epsilon = epsilon;
    out.clip_lo = c_lo;
    out.clip_hi = c_hi;
    out.tv_p = classic_divergences(p, out.p_prime).tv;
    out.tv_q = classic_divergences(q, out.q_prime).tv;
    return out;
}

}  // namespace ht
