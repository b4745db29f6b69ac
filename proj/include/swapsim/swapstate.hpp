#pragma once

#include "swapsim/inference.hpp"
#include "swapsim/sources.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace swapsim {

struct StateComponent {
    double weight = 0.0;
    std::shared_ptr<const PureStateAD> state;
    Occupation4 label; // ideal readout that produced this component, if any
};

struct MixedStateAD {
    std::vector<StateComponent> components;
    double tail_bound = 0.0;

    double total_weight() const;
};

// Components (P_ijkl, |Phi_ijkl>) over the posterior's support.
MixedStateAD assemble_state(const Posterior4& posterior, std::size_t max_components = 4000000);

struct PostselectResult {
    MixedStateAD state;
    double success_prob = 0.0; // Tr[Pi rho Pi] over the represented weight
};

// Keeps the amplitude with at least one photon in (a_H,a_V) and at least one
// in (d_V,d_H). Weights are normalized against success_prob + tail_bound so
// the output stays tail-consistent. Throws EmptyPostselection when
// success_prob <= tail_bound.
PostselectResult postselect(const MixedStateAD& state);

// <psi-|rho|psi->, psi- = (|1010> - |0101>)/sqrt2 in (a_H, a_V, d_V, d_H) order.
double fidelity_psi_minus(const MixedStateAD& state);

// V = (4F - 1)/3
double werner_visibility(double F);

// Dense density matrix on the Fock states listed in `basis` (every basis
// occupation must be distinct). Amplitude outside the basis is ignored.
Eigen::MatrixXcd density_matrix(const MixedStateAD& state, const std::vector<Occupation4>& basis);

// All occupations (aH,aV,dV,dH) with aH+aV <= max_a and dV+dH <= max_d.
std::vector<Occupation4> side_limited_basis(int max_a, int max_d);

// Plain-text serialization. Header lines start with '#'; `meta` entries are
// written as "# key = value". Each data line is
//   component weight aH aV dV dH re im
// with one line per nonzero amplitude of each component.
void write_state(std::ostream& os, const MixedStateAD& state, const std::map<std::string, std::string>& meta = {});

struct StateFile {
    MixedStateAD state;
    std::map<std::string, std::string> meta;
};

StateFile read_state(std::istream& is);

} // namespace swapsim
