#pragma once

#include "swapsim/swapsim.hpp"

#include <random>
#include <vector>

namespace testing {

inline swapsim::DetectorBank uniform_bank(double eta, double pdc)
{
    swapsim::DetectorBank b;
    for (auto& d : b)
        d = swapsim::DetectorSpec{eta, pdc};
    return b;
}

inline swapsim::DetectorBank reference_bell_bank()
{
    return {swapsim::DetectorSpec{0.045, 3e-5}, swapsim::DetectorSpec{0.045, 3e-5},
            swapsim::DetectorSpec{0.135, 1e-5}, swapsim::DetectorSpec{0.135, 1e-5}};
}

inline swapsim::ExperimentConfig reference_config()
{
    swapsim::ExperimentConfig c;
    c.chi = std::sqrt(0.06);
    c.bell_bank = reference_bell_bank();
    c.analysis_bank = uniform_bank(0.04, 3e-5);
    return c;
}

// Randomized (eta, p_dc) grid used by the normalization properties.
inline std::vector<swapsim::DetectorSpec> random_specs(std::size_t n, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> eta(0.02, 0.98);
    std::uniform_real_distribution<double> lp(-7.0, -2.0);
    std::vector<swapsim::DetectorSpec> out;
    for (std::size_t k = 0; k < n; ++k)
        out.push_back(swapsim::DetectorSpec{eta(rng), std::pow(10.0, lp(rng))});
    return out;
}

} // namespace testing
