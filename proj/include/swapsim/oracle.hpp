#pragma once

#include "swapsim/analysis.hpp"
#include "swapsim/detectors.hpp"
#include "swapsim/inference.hpp"
#include "swapsim/sources.hpp"
#include "swapsim/swapstate.hpp"

#include <map>

namespace swapsim::oracle {

// <m', n'| B |m, n> for c^+ -> sqrt(t) c^+ - sqrt(1-t) e^+, e^+ -> sqrt(1-t) c^+ + sqrt(t) e^+,
// obtained by expanding the transformed creation operators.
complex beamsplitter(int m, int n, int m_out, int n_out, double transmittance);

// Block of the beamsplitter on total photon number n: U(m', m) = <m', n-m'|B|m, n-m>.
Eigen::MatrixXcd beamsplitter_block(int n, double transmittance);

// p(q|i) from |i><i| (x) thermal on a truncated environment mode, mixed at a
// beamsplitter of transmittance eta. The thermal parameter is found by
// bisection on the dark-count relation. n_thermal = 0 picks the cutoff.
double detector_prob(int q, int i, const DetectorSpec& spec, int n_thermal = 0);

// Threshold outcome probability built from detector_prob(0|i).
double threshold_prob(ThresholdOutcome o, int i, const DetectorSpec& spec);

struct SwapOracleResult {
    // Posterior over ideal readouts (c'_H, c'_V, b'_V, b'_H) with every squeezer
    // truncated at n pairs. Exact on labels with i+l <= n and j+k <= n.
    std::map<Occupation4, double> weights;
    MixedStateAD state;
    double evidence = 0.0; // unnormalized readout probability inside the cutoff
    int pair_cutoff = 0;
};

// Brute-force entanglement swap: enumerate squeezer pair counts, apply the
// balanced beamsplitter to (b, c) per polarization, weight each ideal
// readout by the imperfect-detector likelihood, and normalize.
SwapOracleResult swap_posterior(const Readout& readout, double chi, const DetectorBank& bank, int pair_cutoff);

// Restricts to labels with i+l <= n and j+k <= n and renormalizes.
MixedStateAD restrict_to_exact_support(const MixedStateAD& state, int pair_cutoff);

// Same Fock-to-Fock element as fock_rotation_amplitude, obtained by
// diagonalizing the tridiagonal generator on each fixed-total block.
complex rotation(const Occupation4& from, const Occupation4& to, const AngleConfig& angles);

// sum over Phi_from's amplitudes of rotation(.)
complex label_rotation(const Occupation4& from, const Occupation4& to, const AngleConfig& angles);

// Trace distance 1/2 ||rho - sigma||_1, block by total photon number.
double trace_distance(const MixedStateAD& a, const MixedStateAD& b);

} // namespace swapsim::oracle
