#pragma once

#include <cstddef>
#include <functional>

namespace swapsim {

struct SeriesResult {
    double value = 0.0;
    double tail_bound = 0.0;
    std::size_t terms_used = 0;
};

// ln(n!)
double ln_factorial(unsigned n);

// C(n,k); 0 when k < 0 or k > n.
double binomial(int n, int k);

// ln C(n,k) for 0 <= k <= n.
double ln_binomial(int n, int k);

// 2F1(-n, -lam; c; z), a polynomial of degree min(n, lam). Coefficients are
// exact rationals C(n,m) C(lam,m) / C(c+m-1,m); the sum is accumulated in
// 50-digit binary floating point so cancellation for large negative z does
// not reach double precision.
double hyp2f1_terminating(unsigned n, unsigned lam, unsigned c, double z);

struct SeriesOptions {
    double eps_rel = 1e-12;
    // Terms may grow like n^degree_bound on top of the geometric envelope.
    double degree_bound = 0.0;
    std::size_t min_terms = 8;
    std::size_t max_terms = 1000000;
};

using TermFn = std::function<double(std::size_t)>;

// Sums term(0), term(1), ... for a series dominated by C r^n poly(n), with
// r = ratio_hint. Throws NonConvergence if ratio_hint >= 1 or max_terms is hit.
SeriesResult sum_adaptive(const TermFn& term, double ratio_hint, double eps_rel = 1e-12);
SeriesResult sum_adaptive(const TermFn& term, double ratio_hint, const SeriesOptions& opts);

// Neumaier compensated accumulator.
class CompensatedSum {
public:
    void add(double x);
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace swapsim
