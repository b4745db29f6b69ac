#include "swapsim/numerics.hpp"

#include "swapsim/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace swapsim {

namespace {

constexpr unsigned kLnFactTable = 2001;

const std::vector<double>& ln_fact_table()
{
    static const std::vector<double> table = [] {
        std::vector<double> t(kLnFactTable);
        long double acc = 0.0L;
        t[0] = 0.0;
        for (unsigned n = 1; n < kLnFactTable; ++n) {
            acc += std::log(static_cast<long double>(n));
            t[n] = static_cast<double>(acc);
        }
        return t;
    }();
    return table;
}

} // namespace

double ln_factorial(unsigned n)
{
    if (n < kLnFactTable)
        return ln_fact_table()[n];
    return static_cast<double>(std::lgamma(static_cast<long double>(n) + 1.0L));
}

double ln_binomial(int n, int k)
{
    if (k < 0 || k > n)
        return -std::numeric_limits<double>::infinity();
    return ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k);
}

double binomial(int n, int k)
{
    if (n < 0 || k < 0 || k > n)
        return 0.0;
    k = std::min(k, n - k);
    // Multiplicative form stays integral at every step: r_i = C(n-k+i, i).
    std::uint64_t r = 1;
    constexpr std::uint64_t limit = std::numeric_limits<std::uint64_t>::max();
    for (int i = 1; i <= k; ++i) {
        if (r > limit / static_cast<std::uint64_t>(n))
            return std::exp(ln_binomial(n, k));
        r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return static_cast<double>(r);
}

double hyp2f1_terminating(unsigned n, unsigned lam, unsigned c, double z)
{
    using boost::multiprecision::cpp_bin_float_50;
    if (c == 0)
        throw InvalidArgument("hyp2f1_terminating: c must be positive");
    const unsigned deg = std::min(n, lam);
    const cpp_bin_float_50 zz(z);
    cpp_bin_float_50 term(1);
    cpp_bin_float_50 sum(1);
    for (unsigned m = 0; m < deg; ++m) {
        term *= cpp_bin_float_50(static_cast<unsigned long long>(n - m) * (lam - m));
        term /= cpp_bin_float_50(static_cast<unsigned long long>(c + m) * (m + 1));
        term *= zz;
        sum += term;
    }
    return static_cast<double>(sum);
}

void CompensatedSum::add(double x)
{
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
        comp_ += (sum_ - t) + x;
    else
        comp_ += (x - t) + sum_;
    sum_ = t;
}

SeriesResult sum_adaptive(const TermFn& term, double ratio_hint, double eps_rel)
{
    SeriesOptions opts;
    opts.eps_rel = eps_rel;
    return sum_adaptive(term, ratio_hint, opts);
}

SeriesResult sum_adaptive(const TermFn& term, double ratio_hint, const SeriesOptions& opts)
{
    if (!(ratio_hint >= 0.0 && ratio_hint < 1.0))
        throw NonConvergence("sum_adaptive: ratio hint " + std::to_string(ratio_hint) + " outside [0,1)");
    if (!(opts.eps_rel > 0.0))
        throw InvalidArgument("sum_adaptive: eps_rel must be positive");

    std::size_t min_terms = std::max<std::size_t>(opts.min_terms, 1);
    if (ratio_hint > 0.0) {
        const double need = std::ceil(std::log(opts.eps_rel) / std::log(ratio_hint));
        if (need > static_cast<double>(min_terms))
            min_terms = static_cast<std::size_t>(std::min(need, static_cast<double>(opts.max_terms)));
    }

    // Polynomial factors can have isolated near-zeros, so the stopping test must
    // hold on a run of consecutive terms, and the tail is based on the run's largest.
    const std::size_t run_needed = 1 + static_cast<std::size_t>(std::ceil(opts.degree_bound / 2.0));
    std::size_t run = 0;
    double run_max = 0.0;
    CompensatedSum acc;
    for (std::size_t n = 0; n < opts.max_terms; ++n) {
        const double t = term(n);
        if (!std::isfinite(t))
            throw NonConvergence("sum_adaptive: non-finite term at index " + std::to_string(n));
        acc.add(t);
        const double s = std::fabs(acc.value());
        const double at = std::fabs(t);
        if (at <= opts.eps_rel * s || (at == 0.0 && s == 0.0)) {
            run_max = run == 0 ? at : std::max(run_max, at);
            ++run;
        } else {
            run = 0;
            continue;
        }
        const std::size_t used = n + 1;
        if (used < min_terms || run < run_needed)
            continue;
        // Past index n the term ratio is at most r (1 + 1/n)^d <= r e^{d/n}.
        const double envelope = ratio_hint * std::exp(opts.degree_bound / std::max<double>(static_cast<double>(n), 1.0));
        if (envelope >= 1.0)
            continue;
        SeriesResult r;
        r.value = acc.value();
        r.tail_bound = run_max * envelope / (1.0 - envelope);
        r.terms_used = used;
        return r;
    }
    throw NonConvergence("sum_adaptive: no convergence within " + std::to_string(opts.max_terms) + " terms");
}

} // namespace swapsim
