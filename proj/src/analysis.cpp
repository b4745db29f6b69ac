#include "swapsim/analysis.hpp"

#include "swapsim/detectors.hpp"
#include "swapsim/diagnostics.hpp"
#include "swapsim/errors.hpp"
#include "swapsim/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace swapsim {

namespace {

constexpr double kDeg = M_PI / 180.0;

complex i_pow(int k)
{
    static const complex p[4] = {complex(1, 0), complex(0, 1), complex(-1, 0), complex(0, -1)};
    return p[((k % 4) + 4) % 4];
}

// Threshold probabilities for counts 0..n on one detector.
std::vector<std::array<double, 2>> threshold_table(int n, const DetectorSpec& spec)
{
    std::vector<std::array<double, 2>> t(n + 1);
    for (int x = 0; x <= n; ++x) {
        t[x][0] = prob_threshold_given_incident(ThresholdOutcome::no_click, x, spec);
        t[x][1] = prob_threshold_given_incident(ThresholdOutcome::click, x, spec);
    }
    return t;
}

} // namespace

AngleConfig AngleConfig::from_degrees(double alpha_deg, double delta_deg)
{
    return AngleConfig{alpha_deg * kDeg, delta_deg * kDeg};
}

CoincidencePattern make_pattern(int q2, int r2, int s2, int t2)
{
    auto o = [](int v) { return v ? ThresholdOutcome::click : ThresholdOutcome::no_click; };
    return {o(q2), o(r2), o(s2), o(t2)};
}

int pattern_index(const CoincidencePattern& p)
{
    int idx = 0;
    for (auto o : p)
        idx = idx * 2 + (o == ThresholdOutcome::click ? 1 : 0);
    return idx;
}

CoincidencePattern pattern_from_index(int idx)
{
    return make_pattern((idx >> 3) & 1, (idx >> 2) & 1, (idx >> 1) & 1, idx & 1);
}

Eigen::MatrixXcd rotation_block(int n, double theta)
{
    if (n < 0)
        throw InvalidArgument("rotation_block: negative photon number");
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    std::vector<double> cp(2 * n + 1), sp(2 * n + 1);
    cp[0] = sp[0] = 1.0;
    for (int k = 1; k <= 2 * n; ++k) {
        cp[k] = cp[k - 1] * c;
        sp[k] = sp[k - 1] * s;
    }
    Eigen::MatrixXcd R(n + 1, n + 1);
    for (int x = 0; x <= n; ++x) {
        for (int m = 0; m <= n; ++m) {
            // H^+ -> c H^+ + i s V^+,  V^+ -> i s H^+ + c V^+; u of the m H photons stay H.
            complex a = 0.0;
            const int mv = n - m;
            for (int u = std::max(0, x - mv); u <= std::min(m, x); ++u) {
                const int cpow = u + mv - (x - u);
                const int spow = (m - u) + (x - u);
                a += binomial(m, u) * binomial(mv, x - u) * cp[cpow] * sp[spow] * i_pow(spow);
            }
            const double ln_scale =
                0.5 * (ln_factorial(x) + ln_factorial(n - x) - ln_factorial(m) - ln_factorial(mv));
            R(x, m) = a * std::exp(ln_scale);
        }
    }
    return R;
}

complex fock_rotation_amplitude(const Occupation4& from, const Occupation4& to, const AngleConfig& angles)
{
    if (!from.valid() || !to.valid())
        throw InvalidArgument("fock_rotation_amplitude: negative occupation");
    const int na = from[0] + from[1], nd = from[2] + from[3];
    if (to[0] + to[1] != na || to[2] + to[3] != nd)
        return 0.0;
    const Eigen::MatrixXcd Ra = rotation_block(na, angles.bloch_alpha());
    const Eigen::MatrixXcd Rd = rotation_block(nd, angles.bloch_delta());
    // d side: d_H (index 3) is the first mode of its pair.
    return Ra(to[0], from[0]) * Rd(to[3], from[3]);
}

complex rotation_amplitude(const Occupation4& from, const Occupation4& to, const AngleConfig& angles)
{
    if (!to.valid())
        throw InvalidArgument("rotation_amplitude: negative occupation");
    if (from.total() != to.total())
        return 0.0;
    const auto phi = phi_state_cached(from);
    complex a = 0.0;
    for (const auto& [occ, amp] : phi->amplitudes)
        a += amp * fock_rotation_amplitude(occ, to, angles);
    return a;
}

complex disentangled_rotation_amplitude(const Occupation4& from, const Occupation4& to, const AngleConfig& angles)
{
    const int i1 = from[0], j1 = from[1], k1 = from[2], l1 = from[3];
    const int i2 = to[0], j2 = to[1], k2 = to[2], l2 = to[3];
    if (!from.valid() || !to.valid())
        throw InvalidArgument("disentangled_rotation_amplitude: negative occupation");
    if (from.total() != to.total())
        return 0.0;
    const double ca = std::cos(angles.bloch_alpha() / 2.0);
    const double cd = std::cos(angles.bloch_delta() / 2.0);
    if (std::fabs(ca) < 1e-12 || std::fabs(cd) < 1e-12)
        throw InvalidArgument("disentangled_rotation_amplitude: singular at cos(bloch angle / 2) = 0");
    const double ta = std::tan(angles.bloch_alpha() / 2.0);
    const double td = std::tan(angles.bloch_delta() / 2.0);
    const double pre = std::exp(-0.5 * from.total() * std::log(2.0) -
                                0.5 * (ln_factorial(i1) + ln_factorial(j1) + ln_factorial(k1) + ln_factorial(l1)));
    complex total = 0.0;
    for (int mu = 0; mu <= i1; ++mu)
        for (int nu = 0; nu <= j1; ++nu)
            for (int ka = 0; ka <= k1; ++ka)
                for (int la = 0; la <= l1; ++la) {
                    if (mu + nu + ka + la != i2 + j2)
                        continue;
                    const int mV = nu + ka;
                    const int mdV = j1 + k1 - nu - ka;
                    const double sign = ((mu + nu) % 2 == 0) ? 1.0 : -1.0;
                    const double base = sign * binomial(i1, mu) * binomial(j1, nu) * binomial(k1, ka) *
                                        binomial(l1, la) *
                                        std::sqrt(std::exp(ln_factorial(mu + la) + ln_factorial(nu + ka) +
                                                           ln_factorial(i1 + l1 - mu - la) +
                                                           ln_factorial(j1 + k1 - nu - ka)));
                    complex s = 0.0;
                    for (int na = 0; na <= std::min(j2, mV); ++na)
                        for (int nd = 0; nd <= std::min(k2, mdV); ++nd) {
                            complex x = std::pow(ca, i2 + j2 - 2 * na) * std::pow(cd, k2 + l2 - 2 * nd) *
                                        std::pow(ta, j2 + mV - 2 * na) * i_pow(j2 + mV - 2 * na) *
                                        std::pow(td, k2 + mdV - 2 * nd) * i_pow(k2 + mdV - 2 * nd);
                            x /= std::exp(ln_factorial(j2 - na) + ln_factorial(mV - na) + ln_factorial(k2 - nd) +
                                          ln_factorial(mdV - nd));
                            double p = 1.0;
                            for (int m = 1; m <= j2 - na; ++m)
                                p *= double(na + m) * (i2 + m);
                            for (int m = 1; m <= mV - na; ++m)
                                p *= double(na + m) * (i2 + j2 - mV + m);
                            for (int m = 1; m <= k2 - nd; ++m)
                                p *= double(nd + m) * (l2 + m);
                            for (int m = 1; m <= mdV - nd; ++m)
                                p *= double(nd + m) * (k2 + l2 - mdV + m);
                            s += x * std::sqrt(p);
                        }
                    total += base * s;
                }
    return pre * total;
}

double transition_prob(const Occupation4& from, const Occupation4& to, const AngleConfig& angles)
{
    return std::norm(rotation_amplitude(from, to, angles));
}

CoincidenceModel::CoincidenceModel(const std::vector<Input>& inputs, double alpha_real,
                                   const DetectorBank& analysis_bank, const TruncationControls& trunc)
    : alpha_(alpha_real), bank_(analysis_bank)
{
    validate_bank(analysis_bank);
    double total = 0.0;
    for (const auto& in : inputs) {
        if (!in.posterior || !(in.weight >= 0.0))
            throw InvalidArgument("CoincidenceModel: invalid mixture input");
        total += in.weight * in.posterior->total_weight();
        tail_ += in.weight * in.posterior->tail_bound;
    }
    const double floor_w = trunc.prune * total;

    int max_side = 0;
    for (const auto& in : inputs) {
        const auto& p = *in.posterior;
        max_side = std::max(max_side, std::max(p.cutoff(0) + p.cutoff(3), p.cutoff(1) + p.cutoff(2)) * 2);
    }
    const auto tabA = threshold_table(max_side, bank_[0]);
    const auto tabB = threshold_table(max_side, bank_[1]);
    std::vector<Eigen::MatrixXcd> rot_a(max_side + 1);
    for (int n = 0; n <= max_side; ++n)
        rot_a[n] = rotation_block(n, 2.0 * alpha_);

    sigma_.resize(max_side + 1);
    for (int nd = 0; nd <= max_side; ++nd)
        for (auto& m : sigma_[nd])
            m = Eigen::MatrixXcd::Zero(nd + 1, nd + 1);

    double skipped = 0.0;
    for (const auto& in : inputs) {
        for (const auto& [label, w0] : in.posterior->materialize()) {
            const double w = in.weight * w0;
            if (w == 0.0)
                continue;
            if (w < floor_w) {
                skipped += w;
                continue;
            }
            ++labels_used_;
            const auto phi = phi_state_cached(label);
            // Blocks of fixed (nA, nD): M(aH, dH).
            std::map<std::pair<int, int>, Eigen::MatrixXcd> blocks;
            for (const auto& [occ, a] : phi->amplitudes) {
                const int na = occ[0] + occ[1], nd = occ[2] + occ[3];
                auto it = blocks.find({na, nd});
                if (it == blocks.end())
                    it = blocks.emplace(std::make_pair(na, nd), Eigen::MatrixXcd::Zero(na + 1, nd + 1)).first;
                it->second(occ[0], occ[3]) = a;
            }
            for (const auto& [key, M] : blocks) {
                const auto [na, nd] = key;
                const Eigen::MatrixXcd X = rot_a[na] * M;
                for (int pa = 0; pa < 4; ++pa) {
                    Eigen::VectorXd fa(na + 1);
                    for (int x = 0; x <= na; ++x)
                        fa[x] = w * tabA[x][pa >> 1] * tabB[na - x][pa & 1];
                    sigma_[nd][pa].noalias() += X.transpose() * fa.asDiagonal() * X.conjugate();
                }
            }
        }
    }
    tail_ += skipped;
}

std::array<double, 16> CoincidenceModel::patterns(double delta_real) const
{
    std::array<double, 16> out{};
    const int max_side = static_cast<int>(sigma_.size()) - 1;
    const auto tabC = threshold_table(max_side, bank_[2]);
    const auto tabD = threshold_table(max_side, bank_[3]);
    std::array<CompensatedSum, 16> acc;
    for (int nd = 0; nd <= max_side; ++nd) {
        const Eigen::MatrixXcd Rd = rotation_block(nd, 2.0 * delta_real);
        for (int pa = 0; pa < 4; ++pa) {
            const Eigen::MatrixXcd& S = sigma_[nd][pa];
            if (S.cwiseAbs().maxCoeff() == 0.0)
                continue;
            const Eigen::MatrixXcd RS = Rd * S;
            for (int y = 0; y <= nd; ++y) {
                // y photons in d_H after rotation, nd - y in d_V.
                const double diag = (RS.row(y) * Rd.row(y).adjoint())(0, 0).real();
                for (int pd = 0; pd < 4; ++pd) {
                    const double fd = tabC[nd - y][pd >> 1] * tabD[y][pd & 1];
                    acc[pa * 4 + pd].add(fd * diag);
                }
            }
        }
    }
    for (int k = 0; k < 16; ++k)
        out[k] = std::clamp(acc[k].value(), 0.0, 1.0);
    return out;
}

double CoincidenceModel::probability(const CoincidencePattern& p, double delta_real) const
{
    return patterns(delta_real)[pattern_index(p)];
}

std::pair<double, double> CoincidenceModel::curves(double delta_real) const
{
    const auto p = patterns(delta_real);
    const double anti = p[pattern_index(make_pattern(1, 0, 1, 0))] + p[pattern_index(make_pattern(0, 1, 0, 1))];
    const double corr = p[pattern_index(make_pattern(0, 1, 1, 0))] + p[pattern_index(make_pattern(1, 0, 0, 1))];
    return {anti, corr};
}

double coincidence_prob(const CoincidencePattern& pattern, const Posterior4& posterior, const AngleConfig& angles,
                        const DetectorBank& analysis_bank, const TruncationControls& trunc)
{
    CoincidenceModel model({{&posterior, 1.0}}, angles.alpha_real, analysis_bank, trunc);
    return model.probability(pattern, angles.delta_real);
}

BellConditioning condition_on_accepted(const ExperimentConfig& cfg)
{
    cfg.validate();
    const Readout a = cfg.bell_threshold ? threshold_readout(1, 0, 1, 0) : count_readout(1, 0, 1, 0);
    const Readout b = cfg.bell_threshold ? threshold_readout(0, 1, 0, 1) : count_readout(0, 1, 0, 1);
    BellConditioning c;
    c.first = posterior_joint(a, cfg.chi, cfg.bell_bank, cfg.truncation);
    c.second = posterior_joint(b, cfg.chi, cfg.bell_bank, cfg.truncation);
    const double la = c.first.evidence, lb = c.second.evidence;
    if (!(la + lb > 0.0))
        throw MeaninglessConditional("accepted Bell readouts have zero probability");
    c.weight_first = la / (la + lb);
    c.weight_second = lb / (la + lb);
    return c;
}

CoincidenceModel make_union_model(const ExperimentConfig& cfg, const BellConditioning& cond)
{
    return CoincidenceModel({{&cond.first, cond.weight_first}, {&cond.second, cond.weight_second}}, cfg.alpha_real,
                            cfg.analysis_bank, cfg.truncation);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn)
{
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : hw;
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t k = 0; k < n; ++k)
            fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t k = next.fetch_add(1);
                if (k >= n)
                    return;
                try {
                    fn(k);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    next = n;
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

ScanResult four_fold_scan(const ExperimentConfig& cfg, const std::vector<double>& delta_grid, int threads)
{
    const BellConditioning cond = condition_on_accepted(cfg);
    const CoincidenceModel model = make_union_model(cfg, cond);
    ScanResult r;
    r.delta = delta_grid;
    r.anticorr.resize(delta_grid.size());
    r.corr.resize(delta_grid.size());
    r.tail_bound = model.tail_bound();
    for (std::size_t k = 0; k < 4; ++k)
        r.cutoffs[k] = std::max(cond.first.cutoff(k), cond.second.cutoff(k));
    parallel_for(delta_grid.size(), threads, [&](std::size_t k) {
        const auto [a, c] = model.curves(delta_grid[k]);
        r.anticorr[k] = a;
        r.corr[k] = c;
    });
    return r;
}

double visibility(const std::vector<double>& samples)
{
    if (samples.empty())
        throw InvalidArgument("visibility: empty curve");
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    const double s = *mx + *mn;
    if (!(s > 0.0))
        throw InvalidArgument("visibility: degenerate curve (max + min = 0)");
    return std::clamp((*mx - *mn) / s, 0.0, 1.0);
}

namespace {

// Golden-section search for the extremum of f on [lo, hi]; sign = +1 maximizes.
std::pair<double, double> golden_extremum(const std::function<double(double)>& f, double lo, double hi, double sign)
{
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = sign * f(x1), f2 = sign * f(x2);
    while (b - a > 1e-5 * kDeg) {
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = sign * f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = sign * f(x2);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

} // namespace

VisibilityResult refined_visibility(const CoincidenceModel& model, double window_deg)
{
    auto anti = [&](double d) { return model.curves(d).first; };
    const double a = model.alpha_real();
    const double w = window_deg * kDeg;
    VisibilityResult r;
    r.tail_bound = model.tail_bound();

    double best_max_x = a, best_max = anti(a);
    double best_min_x = a + M_PI / 2.0, best_min = anti(best_min_x);
    if (w > 0.0) {
        const auto [xm, vm] = golden_extremum(anti, a - w, a + w, 1.0);
        if (vm > best_max) {
            best_max = vm;
            best_max_x = xm;
        }
        const auto [xn, vn] = golden_extremum(anti, a + M_PI / 2.0 - w, a + M_PI / 2.0 + w, -1.0);
        if (vn < best_min) {
            best_min = vn;
            best_min_x = xn;
        }
    }
    r.max_value = best_max;
    r.min_value = best_min;
    r.delta_max = best_max_x;
    r.delta_min = best_min_x;
    r.shift_max_deg = (best_max_x - a) / kDeg;
    r.shift_min_deg = (best_min_x - a - M_PI / 2.0) / kDeg;
    if (std::fabs(r.shift_max_deg) > 0.1 || std::fabs(r.shift_min_deg) > 0.1) {
        std::ostringstream os;
        os << "visibility: extremum refinement moved by " << r.shift_max_deg << " deg (max), " << r.shift_min_deg
           << " deg (min)";
        emit_diagnostic(os.str());
    }
    const double s = best_max + best_min;
    if (!(s > 0.0))
        throw InvalidArgument("visibility: degenerate curve (max + min = 0)");
    r.visibility = std::clamp((best_max - best_min) / s, 0.0, 1.0);
    return r;
}

VisibilityResult scan_visibility(const ExperimentConfig& cfg)
{
    const BellConditioning cond = condition_on_accepted(cfg);
    return refined_visibility(make_union_model(cfg, cond));
}

double chsh_s(double V)
{
    if (!(V >= 0.0 && V <= 1.0))
        throw InvalidArgument("chsh_s: visibility outside [0,1]");
    return 2.0 * std::sqrt(2.0) * V;
}

std::vector<ChiPoint> visibility_vs_chi(const ExperimentConfig& cfg, const std::vector<double>& chi_grid, int threads)
{
    std::vector<ChiPoint> out(chi_grid.size());
    parallel_for(chi_grid.size(), threads, [&](std::size_t k) {
        ExperimentConfig c = cfg;
        c.chi = chi_grid[k];
        out[k].chi = chi_grid[k];
        out[k].result = scan_visibility(c);
    });
    return out;
}

} // namespace swapsim
