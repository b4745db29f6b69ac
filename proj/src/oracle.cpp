#include "swapsim/oracle.hpp"

#include "swapsim/errors.hpp"
#include "swapsim/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <set>

namespace swapsim::oracle {

namespace {

constexpr double kThermalTail = 1e-13;

// tanh^2 r solving p_dc = (1-eta) x / (1 - eta x), by bisection.
double thermal_parameter(const DetectorSpec& spec)
{
    spec.validate();
    if (spec.p_dc == 0.0)
        return 0.0;
    if (spec.singular())
        throw SingularModel("oracle: eta=1 with p_dc>0 has no finite thermal environment");
    auto f = [&](double x) { return (1.0 - spec.eta) * x / (1.0 - spec.eta * x) - spec.p_dc; };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi)
            break;
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

int thermal_cutoff(double x)
{
    if (x == 0.0)
        return 0;
    int n = 0;
    while (std::pow(x, n) / (1.0 - x) >= kThermalTail)
        ++n;
    return n;
}

} // namespace

complex beamsplitter(int m, int n, int m_out, int n_out, double t)
{
    if (m < 0 || n < 0 || m_out < 0 || n_out < 0)
        throw InvalidArgument("beamsplitter: negative occupation");
    if (!(t >= 0.0 && t <= 1.0))
        throw InvalidArgument("beamsplitter: transmittance outside [0,1]");
    if (m + n != m_out + n_out)
        return 0.0;
    const double st = std::sqrt(t), sr = std::sqrt(1.0 - t);
    double sum = 0.0;
    for (int a = 0; a <= m; ++a) {
        const int b = m_out - a;
        if (b < 0 || b > n)
            continue;
        sum += binomial(m, a) * std::pow(st, a) * std::pow(-sr, m - a) * binomial(n, b) * std::pow(sr, b) *
               std::pow(st, n - b);
    }
    const double scale =
        std::exp(0.5 * (ln_factorial(m_out) + ln_factorial(n_out) - ln_factorial(m) - ln_factorial(n)));
    return sum * scale;
}

Eigen::MatrixXcd beamsplitter_block(int n, double t)
{
    Eigen::MatrixXcd U(n + 1, n + 1);
    for (int mo = 0; mo <= n; ++mo)
        for (int m = 0; m <= n; ++m)
            U(mo, m) = beamsplitter(m, n - m, mo, n - mo, t);
    return U;
}

double detector_prob(int q, int i, const DetectorSpec& spec, int n_thermal)
{
    if (q < 0 || i < 0)
        throw InvalidArgument("detector_prob: negative count");
    const double x = thermal_parameter(spec);
    // Terms start at n = q - i; the cutoff bounds the tail relative to the first one.
    const int needed = std::max(0, q - i) + thermal_cutoff(x);
    if (n_thermal == 0)
        n_thermal = needed;
    else if (n_thermal < needed)
        throw CutoffTooSmall("detector_prob: thermal cutoff " + std::to_string(n_thermal) + " below required " +
                             std::to_string(needed));
    CompensatedSum p;
    for (int n = 0; n <= n_thermal; ++n) {
        const int e = i + n - q;
        if (e < 0)
            continue;
        const double w = (1.0 - x) * std::pow(x, n);
        if (w == 0.0)
            continue;
        p.add(w * std::norm(beamsplitter(i, n, q, e, spec.eta)));
    }
    return p.value();
}

double threshold_prob(ThresholdOutcome o, int i, const DetectorSpec& spec)
{
    const double nc = detector_prob(0, i, spec);
    return o == ThresholdOutcome::no_click ? nc : 1.0 - nc;
}

SwapOracleResult swap_posterior(const Readout& readout, double chi, const DetectorBank& bank, int N)
{
    if (N < 0 || N > 8)
        throw InvalidArgument("swap_posterior: pair cutoff must lie in [0,8]");
    validate_bank(bank);
    const SourceParams src{chi};
    src.validate();
    const int top = 2 * N;

    // Likelihood of each detector's outcome given k incident photons.
    std::array<std::vector<double>, 4> like;
    for (int d = 0; d < 4; ++d) {
        like[d].resize(top + 1);
        for (int k = 0; k <= top; ++k)
            like[d][k] = readout[d].threshold ? threshold_prob(readout[d].threshold_outcome(), k, bank[d])
                                              : detector_prob(static_cast<int>(readout[d].value), k, bank[d]);
    }
    std::vector<Eigen::MatrixXcd> bs(top + 1);
    for (int n = 0; n <= top; ++n)
        bs[n] = beamsplitter_block(n, 0.5); // (first = b, second = c)

    SwapOracleResult res;
    res.pair_cutoff = N;
    std::vector<std::pair<Occupation4, std::shared_ptr<PureStateAD>>> comps;
    std::vector<double> raw;
    double evidence = 0.0;
    for (int i = 0; i <= top; ++i)
        for (int j = 0; j <= top; ++j)
            for (int k = 0; k <= top; ++k)
                for (int l = 0; l <= top; ++l) {
                    const int nh = i + l, nv = j + k;
                    if (nh > top || nv > top)
                        continue;
                    auto st = std::make_shared<PureStateAD>();
                    // H: b_H = n1, c_H = n3 -> b'_H = l, c'_H = i. V: b_V = n2, c_V = n4 -> b'_V = k, c'_V = j.
                    for (int n1 = std::max(0, nh - N); n1 <= std::min(N, nh); ++n1) {
                        const int n3 = nh - n1;
                        const complex bh = bs[nh](l, n1);
                        if (bh == 0.0)
                            continue;
                        for (int n2 = std::max(0, nv - N); n2 <= std::min(N, nv); ++n2) {
                            const int n4 = nv - n2;
                            const complex bv = bs[nv](k, n2);
                            if (bv == 0.0)
                                continue;
                            const complex a = pdc_joint_amplitude({n1, n2, n3, n4}, src) * bh * bv;
                            st->amplitudes[Occupation4(n1, n2, n4, n3)] += a;
                        }
                    }
                    double p = 0.0;
                    for (const auto& [o, a] : st->amplitudes)
                        p += std::norm(a);
                    if (p == 0.0)
                        continue;
                    const double L = like[0][i] * like[1][j] * like[2][k] * like[3][l];
                    if (L == 0.0)
                        continue;
                    const double scale = 1.0 / std::sqrt(p);
                    for (auto& [o, a] : st->amplitudes)
                        a *= scale;
                    st->total_photons = nh + nv;
                    comps.emplace_back(Occupation4(i, j, k, l), st);
                    raw.push_back(p * L);
                    evidence += p * L;
                }
    if (!(evidence > 0.0))
        throw MeaninglessConditional("swap_posterior: readout has zero probability inside the cutoff");
    res.evidence = evidence;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        const double w = raw[c] / evidence;
        res.weights[comps[c].first] = w;
        res.state.components.push_back(StateComponent{w, comps[c].second, comps[c].first});
    }
    return res;
}

MixedStateAD restrict_to_exact_support(const MixedStateAD& state, int N)
{
    MixedStateAD out;
    double total = 0.0;
    for (const auto& c : state.components) {
        const Occupation4& L = c.label;
        if (L[0] + L[3] <= N && L[1] + L[2] <= N) {
            out.components.push_back(c);
            total += c.weight;
        }
    }
    if (!(total > 0.0))
        throw EmptyPostselection("restrict_to_exact_support: no weight on the exact support");
    for (auto& c : out.components)
        c.weight /= total;
    return out;
}

complex rotation(const Occupation4& from, const Occupation4& to, const AngleConfig& angles)
{
    if (!from.valid() || !to.valid())
        throw InvalidArgument("oracle rotation: negative occupation");
    const int na = from[0] + from[1], nd = from[2] + from[3];
    if (to[0] + to[1] != na || to[2] + to[3] != nd)
        return 0.0;
    auto block = [](int n, double theta) {
        // J on |k, n-k> (k photons in the first mode): <k-1|J|k> = sqrt(k (n-k+1))/2.
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n + 1, n + 1);
        for (int k = 1; k <= n; ++k)
            J(k - 1, k) = J(k, k - 1) = 0.5 * std::sqrt(double(k) * (n - k + 1));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
        const Eigen::VectorXcd phase = (complex(0.0, theta) * es.eigenvalues().cast<complex>()).array().exp();
        return Eigen::MatrixXcd(es.eigenvectors().cast<complex>() * phase.asDiagonal() *
                                es.eigenvectors().transpose().cast<complex>());
    };
    const Eigen::MatrixXcd Ua = block(na, angles.bloch_alpha());
    const Eigen::MatrixXcd Ud = block(nd, angles.bloch_delta());
    return Ua(to[0], from[0]) * Ud(to[3], from[3]);
}

complex label_rotation(const Occupation4& from, const Occupation4& to, const AngleConfig& angles)
{
    const PureStateAD phi = phi_state(from);
    complex a = 0.0;
    for (const auto& [occ, amp] : phi.amplitudes)
        a += amp * rotation(occ, to, angles);
    return a;
}

double trace_distance(const MixedStateAD& a, const MixedStateAD& b)
{
    std::map<int, std::set<Occupation4>> by_total;
    for (const MixedStateAD* s : {&a, &b})
        for (const auto& c : s->components)
            for (const auto& [occ, amp] : c.state->amplitudes)
                by_total[occ.total()].insert(occ);
    double dist = 0.0;
    for (const auto& [total, occs] : by_total) {
        const std::vector<Occupation4> basis(occs.begin(), occs.end());
        const Eigen::MatrixXcd diff = density_matrix(a, basis) - density_matrix(b, basis);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
        dist += 0.5 * es.eigenvalues().cwiseAbs().sum();
    }
    return dist;
}

} // namespace swapsim::oracle
