#include "swapsim/inference.hpp"

#include "swapsim/errors.hpp"
#include "swapsim/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace swapsim {

namespace {

double tanh2(double chi)
{
    const double t = std::tanh(chi);
    return t * t;
}

void check_chi(double chi)
{
    if (!(chi >= 0.0) || !std::isfinite(chi))
        throw InvalidArgument("chi must be finite and non-negative");
}

// ln p_noclick(i) = ln(1-p) + i ln(1 - eta (1-p))
double ln_no_click(unsigned i, const DetectorSpec& s)
{
    const double eta1 = s.eta * (1.0 - s.p_dc);
    return std::log1p(-s.p_dc) + (i == 0 ? 0.0 : static_cast<double>(i) * std::log1p(-eta1));
}

double p_click(unsigned i, const DetectorSpec& s)
{
    return -std::expm1(ln_no_click(i, s));
}

// Count-family numerator r(i) = tanh^{2i} chi p(q|i) / (1 - tanh^2 r); the
// posterior is r(i) / sum_i' r(i').
class CountKernel {
public:
    CountKernel(unsigned q, double chi, const DetectorSpec& spec) : q_(q), spec_(spec)
    {
        spec.validate();
        if (spec.singular())
            throw SingularModel("count-family posterior: eta=1 with p_dc>0 is singular");
        t_ = tanh2(chi);
        x_ = thermal_r_from_pdc(spec);
        b_ = b_param(spec);
        hint_ = (1.0 - spec.eta) * t_ / (1.0 - b_);
        degree_ = 2.0 * q + 2.0;
    }

    double numerator(unsigned i) const
    {
        const double eta = spec_.eta;
        if (t_ == 0.0 && i > 0)
            return 0.0;
        if (i >= q_) {
            const double g = g_function(i, q_, spec_).value;
            return std::pow(t_, i) * std::pow(eta, q_) * std::pow(1.0 - eta, i - q_) * g;
        }
        const double g = g_function(q_, i, spec_).value;
        return std::pow(t_, i) * std::pow((1.0 - eta) * x_, q_ - i) * std::pow(eta, i) * g;
    }

    // sum_{i >= start} r(i), value plus its own truncation bound.
    SeriesResult series_from(unsigned start) const
    {
        SeriesOptions opts;
        opts.eps_rel = 1e-15;
        opts.degree_bound = degree_;
        return sum_adaptive([&](std::size_t n) { return numerator(start + static_cast<unsigned>(n)); }, hint_, opts);
    }

    double denominator() const
    {
        CompensatedSum s;
        for (unsigned i = 0; i <= q_; ++i)
            s.add(numerator(i));
        const SeriesResult tail = series_from(q_ + 1);
        s.add(tail.value);
        return s.value();
    }

    double hint() const { return hint_; }
    double degree() const { return degree_; }
    double x() const { return x_; }
    double t() const { return t_; }

private:
    unsigned q_;
    DetectorSpec spec_;
    double t_ = 0.0, x_ = 0.0, b_ = 0.0, hint_ = 0.0, degree_ = 0.0;
};

struct ThresholdKernel {
    double t, h, eta1, p, den_click;

    ThresholdKernel(double chi, const DetectorSpec& s)
    {
        s.validate();
        t = tanh2(chi);
        p = s.p_dc;
        eta1 = s.eta * (1.0 - s.p_dc);
        h = (1.0 - eta1) * t;
        den_click = (1.0 - t) * p + t * eta1;
    }

    double no_click(unsigned i) const { return std::pow(h, i) * (1.0 - h); }

    double click(unsigned i, const DetectorSpec& s) const
    {
        if (den_click == 0.0)
            throw MeaninglessConditional("click posterior undefined: no click is possible with this detector and source");
        if (t == 0.0)
            return i == 0 ? 1.0 : 0.0;
        return (1.0 - t) * (1.0 - h) * std::pow(t, i) * p_click(i, s) / den_click;
    }

    double no_click_tail(unsigned n) const { return std::pow(h, n + 1); }

    double click_tail(unsigned n, const DetectorSpec& s) const
    {
        if (t == 0.0)
            return 0.0;
        return std::pow(t, n + 1) * ((1.0 - t) * p_click(n + 1, s) + t * eta1) / den_click;
    }
};

int auto_cutoff_start(const TruncationControls& trunc)
{
    if (trunc.n_max > 0)
        return trunc.n_max;
    return std::max(trunc.n_floor, 0);
}

} // namespace

void validate_bank(const DetectorBank& bank)
{
    for (std::size_t k = 0; k < bank.size(); ++k) {
        try {
            bank[k].validate();
        } catch (const InvalidArgument& e) {
            throw InvalidArgument("detector " + std::to_string(k + 1) + ": " + e.what());
        }
    }
}

std::string to_string(const Outcome& o)
{
    if (o.threshold)
        return o.value ? "click" : "no_click";
    return std::to_string(o.value);
}

std::string to_string(const Readout& r)
{
    std::ostringstream os;
    for (std::size_t k = 0; k < r.size(); ++k)
        os << (k ? "," : "") << to_string(r[k]);
    return os.str();
}

Readout threshold_readout(int q, int r, int s, int t)
{
    return {Outcome{true, q ? 1u : 0u}, Outcome{true, r ? 1u : 0u}, Outcome{true, s ? 1u : 0u},
            Outcome{true, t ? 1u : 0u}};
}

Readout count_readout(unsigned q, unsigned r, unsigned s, unsigned t)
{
    return {Outcome::count(q), Outcome::count(r), Outcome::count(s), Outcome::count(t)};
}

double Posterior4::weight(const Occupation4& o) const
{
    double w = 1.0;
    for (std::size_t k = 0; k < 4; ++k) {
        if (o[k] < 0 || o[k] > cutoff(k))
            return 0.0;
        w *= factors[k][o[k]];
    }
    return w;
}

double Posterior4::total_weight() const
{
    double w = 1.0;
    for (const auto& f : factors) {
        CompensatedSum s;
        for (double v : f)
            s.add(v);
        w *= s.value();
    }
    return w;
}

std::size_t Posterior4::support_size() const
{
    std::size_t n = 1;
    for (const auto& f : factors)
        n *= static_cast<std::size_t>(std::count_if(f.begin(), f.end(), [](double v) { return v > 0.0; }));
    return n;
}

std::vector<std::pair<Occupation4, double>> Posterior4::materialize() const
{
    std::vector<std::pair<Occupation4, double>> out;
    for (int i = 0; i <= cutoff(0); ++i)
        for (int j = 0; j <= cutoff(1); ++j)
            for (int k = 0; k <= cutoff(2); ++k)
                for (int l = 0; l <= cutoff(3); ++l) {
                    const double w = factors[0][i] * factors[1][j] * factors[2][k] * factors[3][l];
                    if (w > 0.0)
                        out.emplace_back(Occupation4(i, j, k, l), w);
                }
    return out;
}

double f_count(unsigned q, unsigned i, double chi, const DetectorSpec& spec)
{
    check_chi(chi);
    CountKernel k(q, chi, spec);
    const double g = k.denominator();
    if (!(g > 0.0))
        throw MeaninglessConditional("count " + std::to_string(q) + " has zero probability under these parameters");
    return clamp_probability(k.numerator(i) / g, "f_count");
}

double f_threshold(ThresholdOutcome outcome, unsigned i, double chi, const DetectorSpec& spec)
{
    check_chi(chi);
    ThresholdKernel k(chi, spec);
    if (outcome == ThresholdOutcome::no_click)
        return clamp_probability(k.no_click(i), "f_threshold");
    return clamp_probability(k.click(i, spec), "f_threshold");
}

double outcome_likelihood(const Outcome& o, double chi, const DetectorSpec& spec)
{
    check_chi(chi);
    if (o.threshold) {
        ThresholdKernel k(chi, spec);
        if (o.value == 0)
            return clamp_probability((1.0 - k.t) * (1.0 - k.p) / (1.0 - k.h), "outcome_likelihood");
        return clamp_probability(k.den_click / (1.0 - k.h), "outcome_likelihood");
    }
    CountKernel k(o.value, chi, spec);
    return clamp_probability((1.0 - k.t()) * (1.0 - k.x()) * k.denominator(), "outcome_likelihood");
}

PosteriorFactor posterior_factor(const Outcome& o, double chi, const DetectorSpec& spec,
                                 const TruncationControls& trunc)
{
    check_chi(chi);
    const double target = trunc.eps / 4.0;
    const bool fixed = trunc.n_max > 0;
    const int start = auto_cutoff_start(trunc);
    const int ceiling = fixed ? trunc.n_max : std::max(trunc.n_ceiling, start);
    PosteriorFactor f;

    if (o.threshold) {
        ThresholdKernel k(chi, spec);
        const bool click = o.value != 0;
        auto value = [&](unsigned i) { return click ? k.click(i, spec) : k.no_click(i); };
        auto tail = [&](unsigned n) { return click ? k.click_tail(n, spec) : k.no_click_tail(n); };
        int n = start;
        while (!fixed && n < ceiling && tail(n) >= target)
            ++n;
        for (int i = 0; i <= n; ++i)
            f.values.push_back(clamp_probability(value(i), "posterior_factor"));
        f.tail = tail(n);
        return f;
    }

    CountKernel k(o.value, chi, spec);
    const double g = k.denominator();
    if (!(g > 0.0))
        throw MeaninglessConditional("count " + std::to_string(o.value) + " has zero probability under these parameters");
    auto envelope_tail = [&](int n, double r_n) {
        // Bound on sum_{i>n} r(i) / g from the term ratio envelope past n.
        const double env = k.hint() * std::exp(k.degree() / std::max(n, 1));
        if (env >= 1.0)
            return std::numeric_limits<double>::infinity();
        return r_n * env / (1.0 - env) / g;
    };
    int n = 0;
    for (;; ++n) {
        const double r = k.numerator(static_cast<unsigned>(n));
        f.values.push_back(clamp_probability(r / g, "posterior_factor"));
        if (n < start || n < static_cast<int>(o.value))
            continue;
        if (fixed ? n >= ceiling : (n >= ceiling || envelope_tail(n, r) < target))
            break;
    }
    const SeriesResult rest = k.series_from(static_cast<unsigned>(n + 1));
    f.tail = (rest.value + rest.tail_bound) / g;
    return f;
}

Posterior4 posterior_joint(const Readout& readout, double chi, const DetectorBank& bank,
                           const TruncationControls& trunc)
{
    check_chi(chi);
    validate_bank(bank);
    const bool family = readout[0].threshold;
    for (const auto& o : readout)
        if (o.threshold != family)
            throw InvalidArgument("posterior_joint: readout mixes threshold and count outcomes");
    if (!(trunc.eps > 0.0))
        throw InvalidArgument("truncation eps must be positive");

    Posterior4 post;
    double ln_keep = 0.0;
    post.evidence = 1.0;
    for (std::size_t k = 0; k < 4; ++k) {
        PosteriorFactor f = posterior_factor(readout[k], chi, bank[k], trunc);
        post.factors[k] = std::move(f.values);
        post.factor_tails[k] = f.tail;
        ln_keep += std::log1p(-std::min(f.tail, 1.0));
        post.evidence *= outcome_likelihood(readout[k], chi, bank[k]);
    }
    post.tail_bound = -std::expm1(ln_keep);
    return post;
}

} // namespace swapsim
