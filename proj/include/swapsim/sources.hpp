#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <string>

namespace swapsim {

using complex = std::complex<double>;

struct SourceParams {
    double chi = 0.0;

    void validate() const; // chi >= 0; diagnostic when chi >= 1
    double tanh2() const;  // tanh^2 chi
    complex phi() const;   // i tanh chi
    double omega() const;  // -ln cosh chi
};

// Photon counts in an ordered 4-mode register. For output states the order is
// (a_H, a_V, d_V, d_H); for Bell readouts it is (c'_H, c'_V, b'_V, b'_H).
struct Occupation4 {
    std::array<int, 4> n{0, 0, 0, 0};

    Occupation4() = default;
    Occupation4(int n1, int n2, int n3, int n4) : n{n1, n2, n3, n4} {}

    int operator[](std::size_t k) const { return n[k]; }
    int& operator[](std::size_t k) { return n[k]; }
    int total() const { return n[0] + n[1] + n[2] + n[3]; }
    bool valid() const { return n[0] >= 0 && n[1] >= 0 && n[2] >= 0 && n[3] >= 0; }

    auto operator<=>(const Occupation4&) const = default;
};

std::string to_string(const Occupation4& o);

struct PureStateAD {
    int total_photons = 0;
    std::map<Occupation4, complex> amplitudes;

    double norm2() const;
    complex amplitude(const Occupation4& o) const;
};

// tanh^{2(i+j+k+l)} chi / cosh^8 chi
double prior_prob(const Occupation4& readout, const SourceParams& src);

// Pure state of (a_H, a_V, d_V, d_H) left by ideal readout (i,j,k,l). The global
// phase i^{i+j+k+l} is dropped.
PureStateAD phi_state(const Occupation4& readout);

// Shared, memoized phi_state. Safe for concurrent use.
std::shared_ptr<const PureStateAD> phi_state_cached(const Occupation4& readout);

// Amplitude of n pairs in each of the four two-mode squeezers
// (a_H b_H, a_V b_V, c_H d_H, c_V d_V): e^{4 omega} phi^{sum n}.
complex pdc_joint_amplitude(const std::array<int, 4>& pair_counts, const SourceParams& src);

} // namespace swapsim
