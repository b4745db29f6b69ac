#include "swapsim/detectors.hpp"

#include "swapsim/diagnostics.hpp"
#include "swapsim/errors.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

namespace swapsim {

namespace {

constexpr double kClampTol = 1e-12;
constexpr double kSingularB = 1.0 - 1e-12;

} // namespace

void DetectorSpec::validate() const
{
    if (!(eta >= 0.0 && eta <= 1.0)) {
        std::ostringstream os;
        os << "detector efficiency eta=" << eta << " outside [0,1]";
        throw InvalidArgument(os.str());
    }
    if (!(p_dc >= 0.0 && p_dc < 1.0)) {
        std::ostringstream os;
        os << "dark-count probability p_dc=" << p_dc << " outside [0,1)";
        throw InvalidArgument(os.str());
    }
}

std::string to_string(ThresholdOutcome o)
{
    return o == ThresholdOutcome::click ? "click" : "no_click";
}

double clamp_probability(double p, const char* where)
{
    if (std::isnan(p))
        throw NumericalError(std::string(where) + ": probability is NaN");
    if (p < 0.0) {
        if (p < -kClampTol)
            throw NumericalError(std::string(where) + ": probability " + std::to_string(p) + " below 0");
        return 0.0;
    }
    if (p > 1.0) {
        if (p > 1.0 + kClampTol)
            throw NumericalError(std::string(where) + ": probability " + std::to_string(p) + " above 1");
        return 1.0;
    }
    return p;
}

double thermal_r_from_pdc(const DetectorSpec& spec)
{
    spec.validate();
    if (spec.p_dc == 0.0)
        return 0.0;
    if (spec.singular())
        throw SingularModel("thermal_r_from_pdc: eta=1 with p_dc>0 has no finite thermal parameter");
    return spec.p_dc / (1.0 - spec.eta + spec.eta * spec.p_dc);
}

double b_param(const DetectorSpec& spec)
{
    spec.validate();
    if (spec.eta == 0.0 || spec.p_dc == 0.0)
        return 0.0;
    if (spec.singular()) {
        static std::atomic<bool> warned{false};
        if (!warned.exchange(true))
            emit_diagnostic("b_param: eta=1 with p_dc>0 is a singular margin; b clamped to 1-1e-12");
        return kSingularB;
    }
    const double ep = spec.eta * spec.p_dc;
    return ep / (ep + 1.0 - spec.eta);
}

SeriesResult g_function(unsigned kappa, unsigned lam, const DetectorSpec& spec)
{
    if (kappa < lam)
        return SeriesResult{0.0, 0.0, 1};
    const double b = b_param(spec);
    const double lead = binomial(static_cast<int>(kappa), static_cast<int>(lam));
    if (b == 0.0)
        return SeriesResult{lead, 0.0, 1};
    const unsigned m = kappa - lam;
    const double z = (spec.eta - 1.0) / spec.eta;
    const double ln_b = std::log(b);
    auto term = [&](std::size_t n) {
        const double f = hyp2f1_terminating(static_cast<unsigned>(n), lam, m + 1, z);
        if (f == 0.0)
            return 0.0;
        const double ln_mag = ln_binomial(static_cast<int>(m + n), static_cast<int>(m)) +
                              static_cast<double>(n) * ln_b + 2.0 * std::log(std::fabs(f));
        return lead * std::exp(ln_mag);
    };
    SeriesOptions opts;
    opts.eps_rel = 1e-15;
    // C(m+n, m) grows like n^m and the squared 2F1 like n^{2 lam}.
    opts.degree_bound = static_cast<double>(m + 2 * lam);
    return sum_adaptive(term, b, opts);
}

double prob_count_given_incident(unsigned q, unsigned i, const DetectorSpec& spec)
{
    spec.validate();
    if (spec.singular())
        throw SingularModel("prob_count_given_incident: eta=1 with p_dc>0 is singular for number-resolving detectors");
    const double eta = spec.eta;
    const double x = thermal_r_from_pdc(spec);
    const double pref = 1.0 - x; // (1-p)(1-eta)/(1-eta+eta p)
    double p;
    if (i >= q) {
        const double g = g_function(i, q, spec).value;
        p = pref * std::pow(eta, q) * std::pow(1.0 - eta, i - q) * g;
    } else {
        const double g = g_function(q, i, spec).value;
        // (1-eta) b / eta written without the division.
        p = pref * std::pow((1.0 - eta) * x, q - i) * std::pow(eta, i) * g;
    }
    return clamp_probability(p, "prob_count_given_incident");
}

double prob_threshold_given_incident(ThresholdOutcome outcome, unsigned i, const DetectorSpec& spec)
{
    spec.validate();
    const double eta1 = spec.eta * (1.0 - spec.p_dc);
    // log1p/expm1 keep the click probability accurate when both eta and p_dc are tiny.
    const double ln_nc = std::log1p(-spec.p_dc) + (i == 0 ? 0.0 : static_cast<double>(i) * std::log1p(-eta1));
    if (outcome == ThresholdOutcome::no_click)
        return clamp_probability(std::exp(ln_nc), "prob_threshold_given_incident");
    return clamp_probability(-std::expm1(ln_nc), "prob_threshold_given_incident");
}

} // namespace swapsim
