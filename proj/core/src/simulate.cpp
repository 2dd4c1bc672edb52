#include "ht/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/distributions/beta.hpp>

#include "ht/errors.hpp"
#include "ht/exact_oracle.hpp"
#include "ht/numeric.hpp"
#include "ht/parallel.hpp"
#include "ht/reductions.hpp"

namespace ht {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kBlock = 4096;

double default_threshold(double alpha) { return std::log1p(-alpha) - std::log(alpha); }

double tie_band(double thr) { return 1e-9 * std::max(1.0, std::fabs(thr)); }

void check_inputs(const Distribution& p, const Distribution& q, double alpha, const SimConfig& cfg) {
    require_same_support(p, q);
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("prior must lie in (0, 1)");
    if (cfg.trials == 0) throw DomainError("at least one trial is required");
}

// Inverse-CDF sampler with per-symbol LLR.
struct Sampler {
    std::vector<double> cdf_p, cdf_q, llr;

    Sampler(const Distribution& p, const Distribution& q) {
        CompensatedSum sp, sq;
        for (std::size_t i = 0; i < p.size(); ++i) {
            sp += p[i];
            sq += q[i];
            cdf_p.push_back(sp.value());
            cdf_q.push_back(sq.value());
            if (p[i] == 0.0 && q[i] == 0.0) {
                llr.push_back(0.0);
            } else if (q[i] == 0.0) {
                llr.push_back(kInf);
            } else if (p[i] == 0.0) {
                llr.push_back(-kInf);
            } else {
                llr.push_back(std::log(p[i]) - std::log(q[i]));
            }
        }
    }

    static std::size_t draw(const std::vector<double>& cdf, double u) {
        // Scale by the final cumulative mass so rounding in the running sum never leaves a gap at the top.
        const double v = u * cdf.back();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), v);
        const auto i = static_cast<std::size_t>(it - cdf.begin());
        return std::min(i, cdf.size() - 1);
    }

    double sample_llr(bool under_p, std::uint64_t n, CounterRng& rng) const {
        const auto& cdf = under_p ? cdf_p : cdf_q;
        double s = 0.0;
        for (std::uint64_t j = 0; j < n; ++j) s += llr[draw(cdf, rng.uniform())];
        return s;
    }
};

template <class Trial>
std::uint64_t count_errors(const SimConfig& cfg, Trial trial) {
    const std::uint64_t blocks = (cfg.trials + kBlock - 1) / kBlock;
    std::vector<std::uint64_t> per_block(blocks, 0);
    parallel_for(blocks, cfg.threads, [&](std::size_t b) {
        const std::uint64_t begin = b * kBlock;
        const std::uint64_t end = std::min(cfg.trials, begin + kBlock);
        std::uint64_t errs = 0;
        for (std::uint64_t t = begin; t < end; ++t) {
            CounterRng rng(cfg.seed, t);
            errs += trial(rng) ? 1 : 0;
        }
        per_block[b] = errs;
    });
    std::uint64_t total = 0;
    for (auto e : per_block) total += e;
    return total;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(splitmix64(seed ^ splitmix64(stream * 0xD1B54A32D192ED03ULL))) {}

std::uint64_t CounterRng::next() noexcept { return splitmix64(key_ + (++counter_) * kGolden); }

double CounterRng::uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

SimResult binomial_estimate(std::uint64_t errors, std::uint64_t trials) {
    if (trials == 0 || errors > trials) throw DomainError("invalid binomial counts");
    namespace bm = boost::math;
    SimResult r;
    r.errors = errors;
    r.trials = trials;
    const double x = static_cast<double>(errors), n = static_cast<double>(trials);
    r.err_hat = x / n;
    r.ci_lo = errors == 0 ? 0.0 : bm::quantile(bm::beta_distribution<double>(x, n - x + 1.0), 0.025);
    r.ci_hi = errors == trials ? 1.0 : bm::quantile(bm::beta_distribution<double>(x + 1.0, n - x), 0.975);
    return r;
}

SimResult simulate_lrt(const Distribution& p, const Distribution& q, double alpha, std::uint64_t n, const SimConfig& cfg) {
    check_inputs(p, q, alpha, cfg);
    const Sampler s(p, q);
    const double thr = cfg.threshold.value_or(default_threshold(alpha));
    const double cut = thr + tie_band(thr);
    const std::uint64_t errors = count_errors(cfg, [&](CounterRng& rng) {
        const bool truth_p = rng.uniform() < alpha;
        const bool says_p = s.sample_llr(truth_p, n, rng) > cut;
        return truth_p != says_p;
    });
    return binomial_estimate(errors, cfg.trials);
}

LrtErrors lrt_errors_exact(const Distribution& p, const Distribution& q, double alpha, std::uint64_t n,
                           std::optional<double> threshold) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("prior must lie in (0, 1)");
    const double thr = threshold.value_or(default_threshold(alpha));
    const double cut = thr + tie_band(thr);
    const auto table = build_llr_table(p, q, n);
    CompensatedSum one, two;
    for (const auto& a : table.atoms) {
        if (a.llr > cut) {
            two += a.q_mass;
        } else {
            one += a.p_mass;
        }
    }
    return {std::clamp(one.value(), 0.0, 1.0), std::clamp(two.value(), 0.0, 1.0)};
}

BoostedResult simulate_boosted(const Distribution& p, const Distribution& q, double alpha, std::uint64_t n,
                               std::uint64_t T, const SimConfig& cfg) {
    check_inputs(p, q, alpha, cfg);
    if (T == 0) throw DomainError("at least one bucket is required");
    BoostedResult out;
    out.bucket_size = (n + T - 1) / T;
    out.bucket_errors = lrt_errors_exact(p, q, alpha, out.bucket_size, cfg.threshold);
    const double tau = std::max(out.bucket_errors.type_one, out.bucket_errors.type_two);
    if (tau > 0.25) {
        throw DomainError("bucket error " + std::to_string(tau) + " exceeds 1/4; majority boosting does not apply");
    }
    // Under p an error needs at least ceil(T/2) q-votes; under q it needs more than T/2 p-votes.
    const double fail_p = binomial_upper_tail(T, out.bucket_errors.type_one, T - T / 2);
    const double fail_q = binomial_upper_tail(T, out.bucket_errors.type_two, T / 2 + 1);
    out.exact_error = alpha * fail_p + (1.0 - alpha) * fail_q;
    out.bound = boost_error_bound(tau, T).bound;

    const Sampler s(p, q);
    const double thr = cfg.threshold.value_or(default_threshold(alpha));
    const double cut = thr + tie_band(thr);
    const std::uint64_t m = out.bucket_size;
    const std::uint64_t errors = count_errors(cfg, [&](CounterRng& rng) {
        const bool truth_p = rng.uniform() < alpha;
        std::uint64_t votes_p = 0;
        for (std::uint64_t b = 0; b < T; ++b) votes_p += s.sample_llr(truth_p, m, rng) > cut ? 1 : 0;
        const bool says_p = 2 * votes_p > T;
        return truth_p != says_p;
    });
    out.sim = binomial_estimate(errors, cfg.trials);
    return out;
}

}  // namespace ht
