#include "ht/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "ht/divergences.hpp"
#include "ht/errors.hpp"
#include "ht/numeric.hpp"

namespace ht {
namespace {

// A support symbol after merging symbols that share a likelihood ratio.
struct Symbol {
    double llr;
    double p;
    double q;
};

double symbol_llr(double p, double q) {
    if (q == 0.0) return kInf;
    if (p == 0.0) return -kInf;
    return std::log(p) - std::log(q);
}

bool same_llr(double anchor, double x, double tol) {
    if (std::isinf(anchor) || std::isinf(x)) return anchor == x;
    return x - anchor <= tol;
}

// Drops symbols with no mass under either hypothesis and merges equal-ratio symbols (a sufficient statistic).
std::vector<Symbol> reduce_symbols(const Distribution& p, const Distribution& q) {
    require_same_support(p, q);
    std::vector<Symbol> raw;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0 && q[i] == 0.0) continue;
        raw.push_back({symbol_llr(p[i], q[i]), p[i], q[i]});
    }
    std::sort(raw.begin(), raw.end(), [](const Symbol& a, const Symbol& b) { return a.llr < b.llr; });
    std::vector<Symbol> out;
    for (const Symbol& s : raw) {
        if (!out.empty() && same_llr(out.back().llr, s.llr, 1e-12 * std::max(1.0, std::fabs(s.llr)))) {
            out.back().p += s.p;
            out.back().q += s.q;
        } else {
            out.push_back(s);
        }
    }
    for (Symbol& s : out) s.llr = symbol_llr(s.p, s.q);
    return out;
}

// Visits every type class of n draws over `symbols`, calling f(llr, p_mass, q_mass).
// Classes with zero mass under both hypotheses are skipped.
template <class F>
void for_each_type_class(const std::vector<Symbol>& symbols, std::size_t n, F&& f) {
    const std::size_t k = symbols.size();
    std::vector<double> log_fact(n + 1, 0.0);
    for (std::size_t c = 2; c <= n; ++c) log_fact[c] = std::lgamma(static_cast<double>(c) + 1.0);
    std::vector<double> log_p(k), log_q(k);
    for (std::size_t i = 0; i < k; ++i) {
        log_p[i] = symbols[i].p > 0.0 ? std::log(symbols[i].p) : -kInf;
        log_q[i] = symbols[i].q > 0.0 ? std::log(symbols[i].q) : -kInf;
    }

    struct Frame {
        double coef;  // -sum log c_i!
        double lp;
        double lq;
        double llr;
        bool p_zero;
        bool q_zero;
    };

    std::function<void(std::size_t, std::size_t, Frame)> rec = [&](std::size_t idx, std::size_t remaining, Frame fr) {
        const std::size_t lo = idx + 1 == k ? remaining : 0;
        for (std::size_t c = lo; c <= remaining; ++c) {
            Frame next = fr;
            if (c > 0) {
                const double dc = static_cast<double>(c);
                next.coef -= log_fact[c];
                if (symbols[idx].p == 0.0) next.p_zero = true; else next.lp += dc * log_p[idx];
                if (symbols[idx].q == 0.0) next.q_zero = true; else next.lq += dc * log_q[idx];
                if (std::isfinite(symbols[idx].llr)) next.llr += dc * symbols[idx].llr;
            }
            if (next.p_zero && next.q_zero) continue;
            if (idx + 1 == k) {
                const double base = log_fact[n] + next.coef;
                const double pm = next.p_zero ? 0.0 : std::exp(base + next.lp);
                const double qm = next.q_zero ? 0.0 : std::exp(base + next.lq);
                const double llr = next.q_zero ? kInf : (next.p_zero ? -kInf : next.llr);
                f(llr, pm, qm);
            } else {
                rec(idx + 1, remaining - c, next);
            }
        }
    };
    if (k == 0) return;
    rec(0, n, Frame{0.0, 0.0, 0.0, 0.0, false, false});
}

// Sorts atoms and merges neighbours whose llr lies within `tol` of the group's first atom.
// With `relative`, the tolerance scales with max(1, |llr|).
std::vector<LlrAtom> merge_sorted(std::vector<LlrAtom> atoms, double tol, bool relative);

bool llr_less(const LlrAtom& a, const LlrAtom& b) { return a.llr < b.llr; }

std::vector<LlrAtom> sort_and_merge(std::vector<LlrAtom> atoms, double tol, bool relative) {
    std::sort(atoms.begin(), atoms.end(), llr_less);
    return merge_sorted(std::move(atoms), tol, relative);
}

std::vector<LlrAtom> merge_sorted(std::vector<LlrAtom> atoms, double tol, bool relative) {
    std::vector<LlrAtom> out;
    out.reserve(atoms.size());
    std::size_t group_size = 0;
    double anchor = 0.0;
    auto finish_group = [&] {
        if (group_size > 1) {
            LlrAtom& g = out.back();
            if (std::isfinite(g.llr) && g.p_mass > 0.0 && g.q_mass > 0.0) {
                const double r = std::log(g.p_mass) - std::log(g.q_mass);
                if (std::isfinite(r) && g.p_mass >= 1e-290 && g.q_mass >= 1e-290) g.llr = r;
            }
        }
    };
    for (const LlrAtom& a : atoms) {
        if (a.p_mass == 0.0 && a.q_mass == 0.0) continue;
        const double t = relative ? tol * std::max(1.0, std::fabs(a.llr)) : tol;
        if (!out.empty() && same_llr(anchor, a.llr, t)) {
            out.back().p_mass += a.p_mass;
            out.back().q_mass += a.q_mass;
            ++group_size;
        } else {
            finish_group();
            out.push_back(a);
            anchor = a.llr;
            group_size = 1;
        }
    }
    finish_group();
    return out;
}

LlrAtomTable table_by_type_classes(const std::vector<Symbol>& symbols, std::size_t n) {
    LlrAtomTable t;
    t.n = n;
    t.strategy = TableStrategy::type_classes;
    std::vector<LlrAtom> atoms;
    for_each_type_class(symbols, n, [&](double llr, double pm, double qm) { atoms.push_back({llr, pm, qm}); });
    t.atoms = sort_and_merge(std::move(atoms), 1e-12, true);
    return t;
}

LlrAtomTable table_by_convolution(const std::vector<Symbol>& symbols, std::size_t n, const OracleLimits& limits) {
    LlrAtomTable t;
    t.n = n;
    t.strategy = TableStrategy::convolution;
    std::vector<LlrAtom> cur{{0.0, 1.0, 1.0}};
    for (std::size_t step = 0; step < n; ++step) {
        // One sorted run per symbol, then pairwise merges; a run broken by underflow falls back to a full sort.
        std::vector<LlrAtom> next;
        next.reserve(cur.size() * symbols.size());
        std::vector<std::size_t> run_ends;
        bool runs_sorted = true;
        for (const Symbol& s : symbols) {
            const std::size_t begin = next.size();
            for (const LlrAtom& a : cur) {
                const double pm = a.p_mass * s.p;
                const double qm = a.q_mass * s.q;
                if (pm == 0.0 && qm == 0.0) continue;
                const double llr = qm == 0.0 ? kInf : (pm == 0.0 ? -kInf : a.llr + s.llr);
                next.push_back({llr, pm, qm});
            }
            runs_sorted = runs_sorted && std::is_sorted(next.begin() + static_cast<std::ptrdiff_t>(begin), next.end(),
                                                        llr_less);
            run_ends.push_back(next.size());
        }
        if (runs_sorted) {
            std::vector<std::size_t> bounds{0};
            bounds.insert(bounds.end(), run_ends.begin(), run_ends.end());
            while (bounds.size() > 2) {
                std::vector<std::size_t> merged{0};
                for (std::size_t i = 0; i + 2 < bounds.size(); i += 2) {
                    const auto first = next.begin() + static_cast<std::ptrdiff_t>(bounds[i]);
                    std::inplace_merge(first, next.begin() + static_cast<std::ptrdiff_t>(bounds[i + 1]),
                                       next.begin() + static_cast<std::ptrdiff_t>(bounds[i + 2]), llr_less);
                    merged.push_back(bounds[i + 2]);
                }
                if (bounds.size() % 2 == 0) merged.push_back(bounds.back());
                bounds = std::move(merged);
            }
            cur = merge_sorted(std::move(next), limits.merge_tolerance, false);
        } else {
            cur = sort_and_merge(std::move(next), limits.merge_tolerance, false);
        }
        if (cur.size() > limits.max_atoms) {
            throw CapacityError("LLR table for n = " + std::to_string(n) + " exceeds " +
                                std::to_string(limits.max_atoms) + " atoms after merging, and C(n+k-1, k-1) exceeds " +
                                std::to_string(limits.max_type_classes) + " type classes");
        }
    }
    t.atoms = std::move(cur);
    return t;
}

void check_open_unit(double x, const char* name) {
    if (!(x > 0.0 && x < 1.0)) throw DomainError(std::string(name) + " must lie in (0, 1)");
}

bool meets(double error, double target) { return error <= target * (1.0 + kTargetSlack); }

// Largest n whose type-class count stays within the limit.
std::uint64_t max_type_class_n(std::size_t k, std::uint64_t max_classes) {
    if (k <= 1) return kUnbounded;
    std::uint64_t lo = 0, hi = 1;
    while (type_class_count(k, hi) <= max_classes) {
        lo = hi;
        hi *= 2;
        if (hi > (std::uint64_t{1} << 40)) return lo;
    }
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        (type_class_count(k, mid) <= max_classes ? lo : hi) = mid;
    }
    return lo;
}

// Certified sample count from min(a x, b y) <= (a x)^s (b y)^(1-s) and tensorization of H_s.
std::uint64_t chernoff_hint(const Distribution& p, const Distribution& q, double prior, double target) {
    std::uint64_t best = kUnbounded;
    for (int i = 1; i < 20; ++i) {
        const double s = i / 20.0;
        const double h = kernel::h_lambda(p.probs(), q.probs(), s);
        if (!(h > 0.0)) continue;
        const double num = s * std::log(prior) + (1.0 - s) * std::log1p(-prior) - std::log(target);
        if (num <= 0.0) return 0;
        best = std::min(best, ceil_count(num / -std::log1p(-h)));
    }
    return best;
}

using ErrorAt = std::function<double(std::uint64_t)>;

// Doubling then bisection for the smallest n with error(n) <= target.
NStarResult search_smallest_n(const ErrorAt& error_at, double target, std::uint64_t n_cap, std::uint64_t hint,
                              std::uint64_t feasible_n) {
    NStarResult res;
    auto eval = [&](std::uint64_t n) {
        const double e = error_at(n);
        res.trace.push_back({n, e});
        return e;
    };
    auto finish = [&](std::optional<std::uint64_t> n) {
        std::sort(res.trace.begin(), res.trace.end(), [](const TracePoint& a, const TracePoint& b) { return a.n < b.n; });
        res.n_star = n;
        return res;
    };

    if (meets(eval(0), target)) return finish(0);
    std::uint64_t lo = 0;
    std::uint64_t hi = 1;
    while (true) {
        if (hi > n_cap) hi = n_cap;
        bool ok = false;
        try {
            ok = meets(eval(hi), target);
        } catch (const CapacityError&) {
            // The doubling overshot the exact range; retry at the largest exactly enumerable n.
            if (feasible_n == kUnbounded || feasible_n <= lo || feasible_n >= hi) throw;
            hi = feasible_n;
            ok = meets(eval(hi), target);
            if (!ok) throw;
        }
        if (ok) break;
        lo = hi;
        if (hi >= n_cap) return finish(std::nullopt);
        hi = (hint != kUnbounded && hint > lo && hint < 2 * hi) ? hint : 2 * hi;
    }
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        (meets(eval(mid), target) ? hi : lo) = mid;
    }
    return finish(hi);
}

}  // namespace

__extension__ using Wide = unsigned __int128;

std::uint64_t type_class_count(std::size_t k, std::size_t n) {
    if (k == 0) return n == 0 ? 1 : 0;
    const std::uint64_t r = std::min<std::uint64_t>(k - 1, n);
    const std::uint64_t m = static_cast<std::uint64_t>(n) + k - 1;
    Wide result = 1;
    for (std::uint64_t i = 1; i <= r; ++i) {
        result = result * (m - r + i) / i;
        if (result > (static_cast<Wide>(1) << 62)) return kUnbounded;
    }
    return static_cast<std::uint64_t>(result);
}

LlrAtomTable build_llr_table_with(const Distribution& p, const Distribution& q, std::size_t n, TableStrategy strategy,
                                  const OracleLimits& limits) {
    const auto symbols = reduce_symbols(p, q);
    if (strategy == TableStrategy::type_classes) {
        if (type_class_count(symbols.size(), n) > limits.max_type_classes) {
            throw CapacityError("type-class enumeration for n = " + std::to_string(n) + " over " +
                                std::to_string(symbols.size()) + " symbols exceeds " +
                                std::to_string(limits.max_type_classes) + " classes");
        }
        return table_by_type_classes(symbols, n);
    }
    return table_by_convolution(symbols, n, limits);
}

LlrAtomTable build_llr_table(const Distribution& p, const Distribution& q, std::size_t n, const OracleLimits& limits) {
    const auto symbols = reduce_symbols(p, q);
    if (type_class_count(symbols.size(), n) <= limits.max_type_classes) return table_by_type_classes(symbols, n);
    return table_by_convolution(symbols, n, limits);
}

double bayes_error(const LlrAtomTable& table, double alpha) {
    check_open_unit(alpha, "alpha");
    CompensatedSum s;
    for (const LlrAtom& a : table.atoms) s += std::min(alpha * a.p_mass, (1.0 - alpha) * a.q_mass);
    return s.value();
}

double bayes_error_exact(const Distribution& p, const Distribution& q, double alpha, std::size_t n,
                         const OracleLimits& limits) {
    check_open_unit(alpha, "alpha");
    if (n == 0) {
        require_same_support(p, q);
        return std::min(alpha, 1.0 - alpha);
    }
    const auto symbols = reduce_symbols(p, q);
    if (type_class_count(symbols.size(), n) <= limits.max_type_classes) {
        // Stream the classes: the per-class minimum needs no sorting.
        CompensatedSum s;
        for_each_type_class(symbols, n,
                            [&](double, double pm, double qm) { s += std::min(alpha * pm, (1.0 - alpha) * qm); });
        return s.value();
    }
    return bayes_error(table_by_convolution(symbols, n, limits), alpha);
}

double np_curve_point(const LlrAtomTable& table, double alpha_t1) {
    if (!(alpha_t1 >= 0.0 && alpha_t1 <= 1.0)) throw DomainError("type-I level must lie in [0, 1]");
    if (alpha_t1 >= 1.0) return 0.0;
    const auto& atoms = table.atoms;
    // Reject p on the lowest-llr atoms while the rejected p-mass stays within alpha_t1.
    CompensatedSum rejected;
    std::size_t b = 0;
    double kept_fraction = 1.0;
    for (; b < atoms.size(); ++b) {
        const double room = alpha_t1 - rejected.value();
        if (atoms[b].p_mass <= room) {
            rejected += atoms[b].p_mass;
            continue;
        }
        kept_fraction = 1.0 - room / atoms[b].p_mass;
        break;
    }
    if (b == atoms.size()) return 0.0;
    CompensatedSum accepted_q;
    for (std::size_t i = atoms.size(); i-- > b + 1;) accepted_q += atoms[i].q_mass;
    accepted_q += kept_fraction * atoms[b].q_mass;
    return std::clamp(accepted_q.value(), 0.0, 1.0);
}

double np_curve_point(const Distribution& p, const Distribution& q, std::size_t n, double alpha_t1,
                      const OracleLimits& limits) {
    if (!(alpha_t1 >= 0.0 && alpha_t1 <= 1.0)) throw DomainError("type-I level must lie in [0, 1]");
    return np_curve_point(build_llr_table(p, q, n, limits), alpha_t1);
}

double mutual_info_product(const Distribution& p, const Distribution& q, double alpha, std::size_t n,
                           const OracleLimits& limits) {
    check_open_unit(alpha, "alpha");
    if (n == 0) {
        require_same_support(p, q);
        return 0.0;
    }
    const auto table = build_llr_table(p, q, n, limits);
    CompensatedSum s;
    for (const LlrAtom& a : table.atoms) s += kernel::js_alpha_term(a.p_mass, a.q_mass, alpha);
    return std::max(0.0, s.value());
}

TestingInstance TestingInstance::bayesian(Distribution p, Distribution q, double alpha, double delta) {
    require_same_support(p, q);
    check_open_unit(alpha, "prior alpha");
    if (!(delta > 0.0)) throw DomainError("target error delta must be positive");
    TestingInstance t;
    t.p = std::move(p);
    t.q = std::move(q);
    t.kind = InstanceKind::bayesian;
    t.alpha = alpha;
    t.delta = delta;
    return t;
}

TestingInstance TestingInstance::prior_free(Distribution p, Distribution q, double type1, double type2) {
    require_same_support(p, q);
    check_open_unit(type1, "type-I error");
    check_open_unit(type2, "type-II error");
    TestingInstance t;
    t.p = std::move(p);
    t.q = std::move(q);
    t.kind = InstanceKind::prior_free;
    t.alpha = type1;
    t.beta = type2;
    return t;
}

NStarResult n_star_bayes_exact(const TestingInstance& inst, std::uint64_t n_cap, const OracleLimits& limits) {
    if (inst.kind != InstanceKind::bayesian) throw DomainError("n_star_bayes_exact needs a Bayesian instance");
    const double a = inst.alpha;
    if (inst.delta >= std::min(a, 1.0 - a)) {
        NStarResult r;
        r.n_star = 0;
        r.trace.push_back({0, std::min(a, 1.0 - a)});
        return r;
    }
    const auto k = reduce_symbols(inst.p, inst.q).size();
    return search_smallest_n(
        [&](std::uint64_t n) { return bayes_error_exact(inst.p, inst.q, a, n, limits); }, inst.delta, n_cap,
        chernoff_hint(inst.p, inst.q, a, inst.delta), max_type_class_n(k, limits.max_type_classes));
}

NStarResult n_star_pf_exact(const TestingInstance& inst, std::uint64_t n_cap, const OracleLimits& limits) {
    if (inst.kind != InstanceKind::prior_free) throw DomainError("n_star_pf_exact needs a prior-free instance");
    const double a = inst.alpha;
    const double b = inst.beta;
    if (a + b >= 1.0) {
        NStarResult r;
        r.n_star = 0;
        r.trace.push_back({0, 1.0 - a});
        return r;
    }
    // A Bayesian solver at prior b/(a+b) and error ab/(a+b) also meets both error levels.
    const auto k = reduce_symbols(inst.p, inst.q).size();
    return search_smallest_n(
        [&](std::uint64_t n) { return np_curve_point(inst.p, inst.q, n, a, limits); }, b, n_cap,
        chernoff_hint(inst.p, inst.q, b / (a + b), a * b / (a + b)), max_type_class_n(k, limits.max_type_classes));
}

}  // namespace ht
