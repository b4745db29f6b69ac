#pragma once

#include "swapsim/config.hpp"
#include "swapsim/inference.hpp"
#include "swapsim/sources.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace swapsim {

// Real-space polarization rotation angles of modes a and d, in radians.
struct AngleConfig {
    double alpha_real = 0.0;
    double delta_real = 0.0;

    static AngleConfig from_degrees(double alpha_deg, double delta_deg);
    double bloch_alpha() const { return 2.0 * alpha_real; }
    double bloch_delta() const { return 2.0 * delta_real; }
    double waveplate_alpha() const { return 0.5 * alpha_real; }
    double waveplate_delta() const { return 0.5 * delta_real; }
};

// Second-stage threshold readout over (D_a+, D_a-, D_d-, D_d+), which watch
// (a_H, a_V, d_V, d_H) after rotation.
using CoincidencePattern = std::array<ThresholdOutcome, 4>;

CoincidencePattern make_pattern(int q2, int r2, int s2, int t2);
// Index in 0..15, q2 most significant.
int pattern_index(const CoincidencePattern& p);
CoincidencePattern pattern_from_index(int idx);

// <x, n-x| exp(i theta J) |m, n-m> on one polarization pair, J = (V^+H + H^+V)/2,
// first mode H. theta is the Bloch angle.
Eigen::MatrixXcd rotation_block(int n, double theta);

// <to| U_a(alpha) (x) U_d(delta) |from> between Fock states of (a_H,a_V,d_V,d_H).
complex fock_rotation_amplitude(const Occupation4& from, const Occupation4& to, const AngleConfig& angles);

// A = <to| U_a (x) U_d |Phi_from>, from an ideal Bell readout label.
complex rotation_amplitude(const Occupation4& from, const Occupation4& to, const AngleConfig& angles);

// The same amplitude written through the disentangled su(2) product with
// cos/tan factors. Singular where cos(bloch/2) = 0; throws InvalidArgument there.
complex disentangled_rotation_amplitude(const Occupation4& from, const Occupation4& to, const AngleConfig& angles);

// W = |A|^2
double transition_prob(const Occupation4& from, const Occupation4& to, const AngleConfig& angles);

// Four-fold pattern probabilities for a fixed a-side angle, as a function of
// the d-side angle. The posterior mixture is reduced once to small d-side
// matrices; each delta then costs a handful of tiny matrix products.
class CoincidenceModel {
public:
    struct Input {
        const Posterior4* posterior;
        double weight; // mixture coefficient, normalized by the caller
    };

    CoincidenceModel(const std::vector<Input>& inputs, double alpha_real, const DetectorBank& analysis_bank,
                     const TruncationControls& trunc = {});

    // All 16 pattern probabilities at delta, indexed by pattern_index.
    std::array<double, 16> patterns(double delta_real) const;
    double probability(const CoincidencePattern& p, double delta_real) const;
    // (anticorrelated, correlated) sums.
    std::pair<double, double> curves(double delta_real) const;

    double alpha_real() const { return alpha_; }
    // Posterior truncation tails plus mass skipped below the pruning floor.
    double tail_bound() const { return tail_; }
    std::size_t labels_used() const { return labels_used_; }

private:
    double alpha_;
    DetectorBank bank_;
    double tail_ = 0.0;
    std::size_t labels_used_ = 0;
    // sigma_[nD][pa] : (nD+1) x (nD+1)
    std::vector<std::array<Eigen::MatrixXcd, 4>> sigma_;
};

double coincidence_prob(const CoincidencePattern& pattern, const Posterior4& posterior, const AngleConfig& angles,
                        const DetectorBank& analysis_bank, const TruncationControls& trunc = {});

// Accepted Bell readouts (1,0,1,0) and (0,1,0,1) and their posteriors.
struct BellConditioning {
    Posterior4 first;
    Posterior4 second;
    double weight_first = 0.5;
    double weight_second = 0.5;
};

BellConditioning condition_on_accepted(const ExperimentConfig& cfg);
CoincidenceModel make_union_model(const ExperimentConfig& cfg, const BellConditioning& cond);

struct ScanResult {
    std::vector<double> delta;
    std::vector<double> anticorr;
    std::vector<double> corr;
    double tail_bound = 0.0;
    std::array<int, 4> cutoffs{};
};

// Anticorrelated P(1,0,1,0)+P(0,1,0,1) and correlated P(0,1,1,0)+P(1,0,0,1)
// curves conditioned on either accepted Bell readout.
ScanResult four_fold_scan(const ExperimentConfig& cfg, const std::vector<double>& delta_grid, int threads = 0);

// (max - min)/(max + min) over the samples.
double visibility(const std::vector<double>& samples);

struct VisibilityResult {
    double visibility = 0.0;
    double max_value = 0.0;
    double min_value = 0.0;
    double delta_max = 0.0; // radians
    double delta_min = 0.0;
    double shift_max_deg = 0.0; // refinement shift from the analytic extremum
    double shift_min_deg = 0.0;
    double tail_bound = 0.0;
};

// Extrema of the anticorrelated curve at delta = alpha and alpha + pi/2,
// refined by a bounded search within +-window_deg.
VisibilityResult refined_visibility(const CoincidenceModel& model, double window_deg = 2.0);
VisibilityResult scan_visibility(const ExperimentConfig& cfg);

// S = 2 sqrt2 V
double chsh_s(double V);

struct ChiPoint {
    double chi = 0.0;
    VisibilityResult result;
};

// One refined visibility per chi; the per-point result does not depend on
// the number of worker threads.
std::vector<ChiPoint> visibility_vs_chi(const ExperimentConfig& cfg, const std::vector<double>& chi_grid,
                                        int threads = 0);

// Evaluates fn(k) for k in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

} // namespace swapsim
