#pragma once

#include "swapsim/numerics.hpp"

#include <string>

namespace swapsim {

struct DetectorSpec {
    double eta = 1.0;  // effective efficiency, transmission losses included
    double p_dc = 0.0; // dark-count probability per detection window

    // Throws InvalidArgument unless 0 <= eta <= 1 and 0 <= p_dc < 1.
    void validate() const;
    bool degenerate() const { return eta == 0.0 && p_dc == 0.0; }
    bool singular() const { return eta == 1.0 && p_dc > 0.0; }
};

enum class ThresholdOutcome { no_click = 0, click = 1 };

std::string to_string(ThresholdOutcome o);

// tanh^2 r of the fictitious thermal mode: p_dc = (1-eta) x / (1 - eta x).
double thermal_r_from_pdc(const DetectorSpec& spec);

// b = eta p_dc / (eta p_dc + 1 - eta). At eta = 1, p_dc > 0 the value is
// clamped to 1 - 1e-12 and a diagnostic is emitted.
double b_param(const DetectorSpec& spec);

// G(kappa, lam) = sum_n C(kappa,lam) C(kappa-lam+n, n) b^n 2F1(-n,-lam;kappa-lam+1;(eta-1)/eta)^2,
// zero for kappa < lam.
SeriesResult g_function(unsigned kappa, unsigned lam, const DetectorSpec& spec);

// p(q|i) for a photon-number resolving detector.
double prob_count_given_incident(unsigned q, unsigned i, const DetectorSpec& spec);

// p(outcome|i) for a threshold detector.
double prob_threshold_given_incident(ThresholdOutcome outcome, unsigned i, const DetectorSpec& spec);

// Clamps a floating probability to [0,1]; throws NumericalError if it lies
// outside by more than 1e-12.
double clamp_probability(double p, const char* where);

} // namespace swapsim
