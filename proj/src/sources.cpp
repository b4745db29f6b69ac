#include "swapsim/sources.hpp"

#include "swapsim/diagnostics.hpp"
#include "swapsim/errors.hpp"
#include "swapsim/numerics.hpp"

#include <cmath>
#include <mutex>
#include <shared_mutex>
#include <sstream>

namespace swapsim {

void SourceParams::validate() const
{
    if (!(chi >= 0.0) || !std::isfinite(chi))
        throw InvalidArgument("chi must be finite and non-negative");
    if (chi >= 1.0) {
        std::ostringstream os;
        os << "chi=" << chi << " is far outside the weak-pumping regime; series converge slowly";
        emit_diagnostic(os.str());
    }
}

double SourceParams::tanh2() const
{
    const double t = std::tanh(chi);
    return t * t;
}

complex SourceParams::phi() const
{
    return complex(0.0, std::tanh(chi));
}

double SourceParams::omega() const
{
    return -std::log(std::cosh(chi));
}

std::string to_string(const Occupation4& o)
{
    std::ostringstream os;
    os << '(' << o[0] << ',' << o[1] << ',' << o[2] << ',' << o[3] << ')';
    return os.str();
}

double PureStateAD::norm2() const
{
    double s = 0.0;
    for (const auto& [occ, a] : amplitudes)
        s += std::norm(a);
    return s;
}

complex PureStateAD::amplitude(const Occupation4& o) const
{
    auto it = amplitudes.find(o);
    return it == amplitudes.end() ? complex(0.0) : it->second;
}

double prior_prob(const Occupation4& readout, const SourceParams& src)
{
    if (!readout.valid())
        throw InvalidArgument("prior_prob: negative occupation");
    const double c = std::cosh(src.chi);
    const double t2 = src.tanh2();
    const double c2 = c * c;
    return std::pow(t2, readout.total()) / (c2 * c2 * c2 * c2);
}

PureStateAD phi_state(const Occupation4& readout)
{
    if (!readout.valid())
        throw InvalidArgument("phi_state: negative occupation");
    const int i = readout[0], j = readout[1], k = readout[2], l = readout[3];
    PureStateAD st;
    st.total_photons = readout.total();
    const double ln_norm = -0.5 * st.total_photons * std::log(2.0) -
                           0.5 * (ln_factorial(i) + ln_factorial(j) + ln_factorial(k) + ln_factorial(l));
    // (c'_H)^i (c'_V)^j (b'_V)^k (b'_H)^l expressed in the outgoing modes:
    // mu, nu, kappa, lam count the a-side photons drawn from each factor.
    for (int mu = 0; mu <= i; ++mu)
        for (int nu = 0; nu <= j; ++nu)
            for (int ka = 0; ka <= k; ++ka)
                for (int la = 0; la <= l; ++la) {
                    const int aH = mu + la, aV = nu + ka;
                    const int dH = i + l - mu - la, dV = j + k - nu - ka;
                    const double ln_mag = ln_norm + ln_binomial(i, mu) + ln_binomial(j, nu) +
                                          ln_binomial(k, ka) + ln_binomial(l, la) +
                                          0.5 * (ln_factorial(aH) + ln_factorial(aV) + ln_factorial(dV) +
                                                 ln_factorial(dH));
                    const double sign = ((mu + nu) % 2 == 0) ? 1.0 : -1.0;
                    st.amplitudes[Occupation4(aH, aV, dV, dH)] += sign * std::exp(ln_mag);
                }
    for (auto it = st.amplitudes.begin(); it != st.amplitudes.end();) {
        // Exact cancellations leave rounding residue; drop it.
        if (std::abs(it->second) < 1e-15)
            it = st.amplitudes.erase(it);
        else
            ++it;
    }
    return st;
}

std::shared_ptr<const PureStateAD> phi_state_cached(const Occupation4& readout)
{
    static std::shared_mutex mutex;
    static std::map<Occupation4, std::shared_ptr<const PureStateAD>> cache;
    {
        std::shared_lock<std::shared_mutex> lock(mutex);
        auto it = cache.find(readout);
        if (it != cache.end())
            return it->second;
    }
    auto st = std::make_shared<const PureStateAD>(phi_state(readout));
    std::unique_lock<std::shared_mutex> lock(mutex);
    auto [it, inserted] = cache.emplace(readout, st);
    return it->second;
}

complex pdc_joint_amplitude(const std::array<int, 4>& pair_counts, const SourceParams& src)
{
    int total = 0;
    for (int n : pair_counts) {
        if (n < 0)
            throw InvalidArgument("pdc_joint_amplitude: negative pair count");
        total += n;
    }
    const double c = std::cosh(src.chi);
    const double mag = std::pow(std::tanh(src.chi), total) / (c * c * c * c);
    static const complex phases[4] = {complex(1, 0), complex(0, 1), complex(-1, 0), complex(0, -1)};
    return mag * phases[total % 4];
}

} // namespace swapsim
