#pragma once

#include "swapsim/detectors.hpp"
#include "swapsim/sources.hpp"

#include <array>
#include <string>
#include <vector>

namespace swapsim {

// Detectors ordered (c'_H, c'_V, b'_V, b'_H), matching readout letters (q,r,s,t).
using DetectorBank = std::array<DetectorSpec, 4>;

void validate_bank(const DetectorBank& bank);

// One detector's readout: either a photon count or a threshold outcome.
struct Outcome {
    bool threshold = true;
    unsigned value = 0; // count, or 0/1 for no_click/click

    static Outcome count(unsigned q) { return Outcome{false, q}; }
    static Outcome click() { return Outcome{true, 1}; }
    static Outcome no_click() { return Outcome{true, 0}; }
    static Outcome of(ThresholdOutcome o) { return Outcome{true, o == ThresholdOutcome::click ? 1u : 0u}; }

    ThresholdOutcome threshold_outcome() const
    {
        return value ? ThresholdOutcome::click : ThresholdOutcome::no_click;
    }
    bool operator==(const Outcome&) const = default;
};

using Readout = std::array<Outcome, 4>;

std::string to_string(const Outcome& o);
std::string to_string(const Readout& r);

// Threshold readout from 0/1 flags.
Readout threshold_readout(int q, int r, int s, int t);
Readout count_readout(unsigned q, unsigned r, unsigned s, unsigned t);

struct TruncationControls {
    int n_max = 0; // 0 selects the cutoff automatically
    double eps = 1e-12;
    int n_floor = 6;
    int n_ceiling = 24;
    std::size_t max_components = 4000000; // memory budget for materialized states
    // Posterior labels lighter than prune x (total weight) are skipped by the
    // coincidence sums; their mass is added to the reported tail.
    double prune = 1e-15;
};

// Posterior over ideal readouts (i,j,k,l), stored as four 1-D factors.
struct Posterior4 {
    std::array<std::vector<double>, 4> factors;
    std::array<double, 4> factor_tails{0, 0, 0, 0};
    double tail_bound = 0.0;
    // Marginal probability of the imperfect readout under the source prior.
    double evidence = 0.0;

    int cutoff(std::size_t k) const { return static_cast<int>(factors[k].size()) - 1; }
    double weight(const Occupation4& o) const;
    double total_weight() const;
    std::size_t support_size() const;
    // All (occupation, weight) pairs with nonzero weight, lexicographic order.
    std::vector<std::pair<Occupation4, double>> materialize() const;
};

// f^q_i: posterior probability of i photons given count q.
double f_count(unsigned q, unsigned i, double chi, const DetectorSpec& spec);

// Posterior probability of i photons given a threshold outcome.
double f_threshold(ThresholdOutcome outcome, unsigned i, double chi, const DetectorSpec& spec);

// Marginal probability of a single detector's outcome under the one-mode
// thermal prior (1 - tanh^2 chi) tanh^{2i} chi.
double outcome_likelihood(const Outcome& o, double chi, const DetectorSpec& spec);

struct PosteriorFactor {
    std::vector<double> values; // f(i), i = 0..cutoff
    double tail = 0.0;          // bound on sum_{i > cutoff} f(i)
};

PosteriorFactor posterior_factor(const Outcome& o, double chi, const DetectorSpec& spec,
                                 const TruncationControls& trunc);

Posterior4 posterior_joint(const Readout& readout, double chi, const DetectorBank& bank,
                           const TruncationControls& trunc = {});

} // namespace swapsim
