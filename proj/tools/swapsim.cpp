#include "swapsim/swapsim.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

using namespace swapsim;

namespace {

enum Exit { kOk = 0, kUsage = 1, kConfig = 2, kNumeric = 3, kMismatch = 4 };

struct Options {
    std::string config;
    std::vector<std::string> overrides;
    std::string out;
    std::string delta_grid = "0:180:181";
    std::string chi_grid = "0.01:0.5:50";
    std::string readout = "1010";
    bool postselect = false;
    int threads = -1; // -1: take the config value
    int state_cutoff = 6;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "start:stop:count", inclusive, evenly spaced.
std::vector<double> parse_grid(const std::string& text, const char* flag)
{
    double a = 0, b = 0;
    int n = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &a, &b, &n, &tail) != 3 || n < 1 || !std::isfinite(a) ||
        !std::isfinite(b))
        throw UsageError(std::string(flag) + ": expected start:stop:count, got '" + text + "'");
    std::vector<double> g(n);
    for (int k = 0; k < n; ++k)
        g[k] = n == 1 ? a : a + (b - a) * k / (n - 1);
    return g;
}

ExperimentConfig resolve(const Options& o, bool require_chi)
{
    ExperimentConfig cfg = o.config.empty() ? parse_config_text("", false) : parse_config_file(o.config, false);
    for (const auto& s : o.overrides)
        apply_override(cfg, s);
    if (o.threads >= 0)
        cfg.threads = o.threads;
    if (require_chi && std::isnan(cfg.chi))
        throw ConfigError("chi is required");
    if (!std::isnan(cfg.chi))
        cfg.validate();
    return cfg;
}

Readout parse_readout(const std::string& text, bool threshold)
{
    std::vector<unsigned> v;
    if (text.find(',') != std::string::npos) {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ','))
            v.push_back(static_cast<unsigned>(std::stoul(item)));
    } else {
        for (char c : text) {
            if (c < '0' || c > '9')
                throw UsageError("--readout: expected four digits or q,r,s,t");
            v.push_back(static_cast<unsigned>(c - '0'));
        }
    }
    if (v.size() != 4)
        throw UsageError("--readout: expected four outcomes");
    if (threshold) {
        for (unsigned x : v)
            if (x > 1)
                throw UsageError("--readout: threshold outcomes are 0 or 1");
        return threshold_readout(v[0], v[1], v[2], v[3]);
    }
    return count_readout(v[0], v[1], v[2], v[3]);
}

// Output stream for --out, or stdout.
class Sink {
public:
    explicit Sink(const std::string& path)
    {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_)
                throw UsageError("cannot open " + path + " for writing");
        }
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }
    bool to_file() const { return file_ != nullptr; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void config_header(std::ostream& os, const ExperimentConfig& cfg)
{
    for (const auto& [k, v] : describe_config(cfg))
        if (k != "threads")
            os << "# " << k << " = " << v << '\n';
}

std::string cutoffs_text(const std::array<int, 4>& c)
{
    return std::to_string(c[0]) + " " + std::to_string(c[1]) + " " + std::to_string(c[2]) + " " +
           std::to_string(c[3]);
}

// Post-selected fidelity of the union state, assembled at a capped cutoff.
struct FidelityReport {
    double fidelity = 0.0;
    double success = 0.0;
    double tail = 0.0;
};

FidelityReport postselected_fidelity(const ExperimentConfig& cfg, int cutoff)
{
    ExperimentConfig capped = cfg;
    capped.truncation.n_max = cutoff;
    const BellConditioning cond = condition_on_accepted(capped);
    FidelityReport r;
    for (const auto& [post, w] : {std::pair{&cond.first, cond.weight_first}, {&cond.second, cond.weight_second}}) {
        const PostselectResult ps = postselect(assemble_state(*post, cfg.truncation.max_components));
        r.fidelity += w * fidelity_psi_minus(ps.state);
        r.success += w * ps.success_prob;
        r.tail = std::max(r.tail, ps.state.tail_bound);
    }
    return r;
}

int cmd_scan(const Options& o)
{
    const ExperimentConfig cfg = resolve(o, true);
    std::vector<double> grid = parse_grid(o.delta_grid, "--delta-grid");
    for (double& d : grid)
        d *= M_PI / 180.0;
    const ScanResult s = four_fold_scan(cfg, grid, cfg.threads);
    const VisibilityResult v = scan_visibility(cfg);
    const FidelityReport f = postselected_fidelity(cfg, o.state_cutoff);
    const double grid_v = visibility(s.anticorr);

    Sink sink(o.out);
    auto& os = sink.os();
    os << "# swapsim scan\n";
    config_header(os, cfg);
    os << "# cutoffs = " << cutoffs_text(s.cutoffs) << '\n';
    os << "# tail_bound = " << format_number(s.tail_bound) << '\n';
    os << "# visibility = " << format_number(v.visibility) << '\n';
    os << "# visibility_grid = " << format_number(grid_v) << '\n';
    os << "# fidelity_postselected = " << format_number(f.fidelity) << '\n';
    os << "# werner_visibility = " << format_number(werner_visibility(f.fidelity)) << '\n';
    os << "# chsh_s = " << format_number(chsh_s(v.visibility)) << '\n';
    os << "# state_cutoff = " << o.state_cutoff << '\n';
    os << "delta_deg,anticorr,corr\n";
    for (std::size_t k = 0; k < s.delta.size(); ++k)
        os << format_number(s.delta[k] * 180.0 / M_PI) << ',' << format_number(s.anticorr[k]) << ','
           << format_number(s.corr[k]) << '\n';
    if (sink.to_file())
        std::printf("V = %s\nF = %s\nS = %s\n", format_number(v.visibility).c_str(),
                    format_number(f.fidelity).c_str(), format_number(chsh_s(v.visibility)).c_str());
    return kOk;
}

int cmd_sweep(const Options& o)
{
    ExperimentConfig cfg = resolve(o, false);
    const std::vector<double> grid = parse_grid(o.chi_grid, "--chi-grid");
    for (double c : grid)
        if (!(c > 0.0))
            throw UsageError("--chi-grid: chi must be positive");
    cfg.chi = grid.front();
    cfg.validate();
    const auto pts = visibility_vs_chi(cfg, grid, cfg.threads);
    double tail = 0.0;
    for (const auto& p : pts)
        tail = std::max(tail, p.result.tail_bound);

    Sink sink(o.out);
    auto& os = sink.os();
    os << "# swapsim sweep-chi\n";
    for (const auto& [k, v] : describe_config(cfg))
        if (k != "threads" && k != "chi")
            os << "# " << k << " = " << v << '\n';
    os << "# tail_bound = " << format_number(tail) << '\n';
    os << "chi,visibility\n";
    for (const auto& p : pts)
        os << format_number(p.chi) << ',' << format_number(p.result.visibility) << '\n';
    return kOk;
}

int cmd_posterior(const Options& o)
{
    const ExperimentConfig cfg = resolve(o, true);
    const Readout r = parse_readout(o.readout, cfg.bell_threshold);
    const Posterior4 p = posterior_joint(r, cfg.chi, cfg.bell_bank, cfg.truncation);

    Sink sink(o.out);
    auto& os = sink.os();
    os << "# swapsim posterior\n";
    config_header(os, cfg);
    os << "# readout = " << to_string(r) << '\n';
    os << "# evidence = " << format_number(p.evidence) << '\n';
    os << "# tail_bound = " << format_number(p.tail_bound) << '\n';
    os << "# support_size = " << p.support_size() << '\n';
    for (std::size_t k = 0; k < 4; ++k)
        os << "# factor_tail." << k + 1 << " = " << format_number(p.factor_tails[k]) << '\n';
    os << "detector,i,probability\n";
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t i = 0; i < p.factors[k].size(); ++i)
            os << k + 1 << ',' << i << ',' << format_number(p.factors[k][i]) << '\n';
    return kOk;
}

int cmd_state(const Options& o)
{
    const ExperimentConfig cfg = resolve(o, true);
    const Readout r = parse_readout(o.readout, cfg.bell_threshold);
    TruncationControls tc = cfg.truncation;
    tc.n_max = o.state_cutoff;
    MixedStateAD st = assemble_state(posterior_joint(r, cfg.chi, cfg.bell_bank, tc), tc.max_components);
    std::map<std::string, std::string> meta;
    for (const auto& [k, v] : describe_config(cfg))
        if (k != "threads")
            meta[k] = v;
    meta["readout"] = to_string(r);
    meta["state_cutoff"] = std::to_string(o.state_cutoff);
    if (o.postselect) {
        const PostselectResult ps = postselect(st);
        meta["postselected"] = "true";
        meta["success_prob"] = format_number(ps.success_prob, 17);
        meta["fidelity_psi_minus"] = format_number(fidelity_psi_minus(ps.state), 17);
        st = ps.state;
    }
    Sink sink(o.out);
    write_state(sink.os(), st, meta);
    return kOk;
}

// Oracle cross-checks at reduced cutoff on the configured banks.
int cmd_verify(const Options& o)
{
    ExperimentConfig cfg = resolve(o, false);
    if (std::isnan(cfg.chi))
        cfg.chi = std::sqrt(0.06);
    bool ok = true;
    auto report = [&](const char* name, double err, double tol) {
        const bool pass = err <= tol;
        ok = ok && pass;
        std::printf("%-9s %-34s %.3e (tolerance %.0e)\n", pass ? "ok" : "MISMATCH", name, err, tol);
    };

    std::vector<DetectorSpec> specs(cfg.bell_bank.begin(), cfg.bell_bank.end());
    specs.insert(specs.end(), cfg.analysis_bank.begin(), cfg.analysis_bank.end());
    const double t = std::pow(std::tanh(cfg.chi), 2);
    const int top = t > 0.0 ? static_cast<int>(std::ceil(std::log(1e-20) / std::log(t))) : 1;

    double e_count = 0.0, e_thr = 0.0, e_fc = 0.0, e_ft = 0.0;
    for (const auto& s : specs) {
        for (int i = 0; i <= 4; ++i)
            for (auto oc : {ThresholdOutcome::no_click, ThresholdOutcome::click})
                e_thr = std::max(e_thr, std::fabs(prob_threshold_given_incident(oc, i, s) -
                                                  oracle::threshold_prob(oc, i, s)));
        for (auto oc : {ThresholdOutcome::no_click, ThresholdOutcome::click}) {
            std::vector<double> like(top + 1);
            double z = 0.0;
            for (int i = 0; i <= top; ++i)
                z += (like[i] = (1.0 - t) * std::pow(t, i) * oracle::threshold_prob(oc, i, s));
            if (z > 0.0)
                for (int i = 0; i <= 4; ++i)
                    e_ft = std::max(e_ft, std::fabs(f_threshold(oc, i, cfg.chi, s) - like[i] / z));
        }
        if (s.singular())
            continue;
        for (int q = 0; q <= 4; ++q) {
            std::vector<double> like(top + 1);
            double z = 0.0;
            for (int i = 0; i <= top; ++i) {
                const double p = oracle::detector_prob(q, i, s);
                if (i <= 4)
                    e_count = std::max(e_count, std::fabs(prob_count_given_incident(q, i, s) - p));
                z += (like[i] = (1.0 - t) * std::pow(t, i) * p);
            }
            if (z > 0.0)
                for (int i = 0; i <= 4; ++i)
                    e_fc = std::max(e_fc, std::fabs(f_count(q, i, cfg.chi, s) - like[i] / z));
        }
    }
    report("detector p(q|i)", e_count, 1e-9);
    report("detector threshold", e_thr, 1e-12);
    report("count posterior f", e_fc, 1e-9);
    report("threshold posterior f", e_ft, 1e-9);

    double e_state = 0.0;
    TruncationControls tc;
    tc.n_max = 3;
    for (const auto& r : {cfg.bell_threshold ? threshold_readout(1, 0, 1, 0) : count_readout(1, 0, 1, 0),
                          cfg.bell_threshold ? threshold_readout(0, 1, 0, 1) : count_readout(0, 1, 0, 1)}) {
        const auto closed =
            oracle::restrict_to_exact_support(assemble_state(posterior_joint(r, cfg.chi, cfg.bell_bank, tc)), 3);
        const auto brute = oracle::restrict_to_exact_support(oracle::swap_posterior(r, cfg.chi, cfg.bell_bank, 3).state, 3);
        e_state = std::max(e_state, oracle::trace_distance(closed, brute));
    }
    report("swapped state (trace distance)", e_state, 1e-8);

    double e_rot = 0.0;
    for (int k = 0; k < 6; ++k) {
        const AngleConfig a{cfg.alpha_real, k * M_PI / 5.0};
        for (int n = 0; n <= 3; ++n)
            for (int i = 0; i <= n; ++i)
                for (int j = 0; j <= n - i; ++j)
                    for (int l = 0; l <= n - i - j; ++l) {
                        const Occupation4 from(i, j, l, n - i - j - l);
                        for (int x = 0; x <= n; ++x)
                            for (int y = 0; y <= n - x; ++y)
                                for (int z = 0; z <= n - x - y; ++z) {
                                    const Occupation4 to(x, y, z, n - x - y - z);
                                    e_rot = std::max(e_rot, std::fabs(std::norm(rotation_amplitude(from, to, a)) -
                                                                      std::norm(oracle::label_rotation(from, to, a))));
                                }
                    }
    }
    report("rotation |A|^2", e_rot, 1e-10);
    return ok ? kOk : kMismatch;
}

int guarded(const std::function<int()>& fn)
{
    try {
        return fn();
    } catch (const UsageError& e) {
        std::fprintf(stderr, "swapsim: %s\n", e.what());
        return kUsage;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "swapsim: config: %s\n", e.what());
        return kConfig;
    } catch (const InvalidArgument& e) {
        std::fprintf(stderr, "swapsim: config: %s\n", e.what());
        return kConfig;
    } catch (const Error& e) {
        std::fprintf(stderr, "swapsim: %s\n", e.what());
        return kNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "swapsim: %s\n", e.what());
        return kUsage;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Entanglement swapping with imperfect sources and detectors"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c) {
        c->add_option("--config", o.config, "Configuration file (key = value)");
        c->add_option("--set", o.overrides, "Override one key, e.g. --set chi=0.1 (repeatable)");
        c->add_option("--out", o.out, "Output path (default stdout)");
        c->add_option("--threads", o.threads, "Worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
    };

    auto* scan = app.add_subcommand("scan", "Four-fold coincidence curves versus the d-side angle");
    common(scan);
    scan->add_option("--delta-grid", o.delta_grid, "start:stop:count in degrees")->capture_default_str();
    scan->add_option("--state-cutoff", o.state_cutoff, "Per-detector cutoff for the post-selected fidelity")
        ->capture_default_str()
        ->check(CLI::Range(1, 16));

    auto* sweep = app.add_subcommand("sweep-chi", "Visibility versus source brightness");
    common(sweep);
    sweep->add_option("--chi-grid", o.chi_grid, "start:stop:count")->capture_default_str();

    auto* post = app.add_subcommand("posterior", "Posterior factors for a Bell readout");
    common(post);
    post->add_option("--readout", o.readout, "Bell readout, e.g. 1010 or 2,0,1,0")->capture_default_str();

    auto* state = app.add_subcommand("state", "Serialized mixed state for a Bell readout");
    common(state);
    state->add_option("--readout", o.readout, "Bell readout, e.g. 1010 or 2,0,1,0")->capture_default_str();
    state->add_flag("--postselect", o.postselect, "Keep at least one photon on each side");
    state->add_option("--state-cutoff", o.state_cutoff, "Per-detector posterior cutoff")
        ->capture_default_str()
        ->check(CLI::Range(0, 16));

    auto* verify = app.add_subcommand("verify", "Cross-check closed forms against the brute-force oracle");
    common(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    if (scan->parsed())
        return guarded([&] { return cmd_scan(o); });
    if (sweep->parsed())
        return guarded([&] { return cmd_sweep(o); });
    if (post->parsed())
        return guarded([&] { return cmd_posterior(o); });
    if (state->parsed())
        return guarded([&] { return cmd_state(o); });
    return guarded([&] { return cmd_verify(o); });
}
