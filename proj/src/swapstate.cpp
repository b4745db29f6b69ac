#include "swapsim/swapstate.hpp"

#include "swapsim/errors.hpp"
#include "swapsim/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace swapsim {

double MixedStateAD::total_weight() const
{
    CompensatedSum s;
    for (const auto& c : components)
        s.add(c.weight);
    return s.value();
}

MixedStateAD assemble_state(const Posterior4& posterior, std::size_t max_components)
{
    const std::size_t n = posterior.support_size();
    if (n > max_components)
        throw BudgetExceeded("assemble_state: posterior support " + std::to_string(n) + " exceeds budget of " +
                             std::to_string(max_components) + " components");
    MixedStateAD out;
    out.tail_bound = posterior.tail_bound;
    out.components.reserve(n);
    for (const auto& [occ, w] : posterior.materialize())
        out.components.push_back(StateComponent{w, phi_state_cached(occ), occ});
    return out;
}

PostselectResult postselect(const MixedStateAD& state)
{
    PostselectResult res;
    std::vector<StateComponent> kept;
    CompensatedSum success;
    for (const auto& c : state.components) {
        if (c.weight <= 0.0)
            continue;
        auto st = std::make_shared<PureStateAD>();
        st->total_photons = c.state->total_photons;
        double dropped = 0.0;
        for (const auto& [occ, a] : c.state->amplitudes) {
            if (occ[0] + occ[1] > 0 && occ[2] + occ[3] > 0)
                st->amplitudes.emplace(occ, a);
            else
                dropped += std::norm(a);
        }
        if (st->amplitudes.empty())
            continue;
        const double s = st->norm2();
        StateComponent out{c.weight * s, nullptr, c.label};
        if (dropped == 0.0) {
            out.state = c.state;
        } else {
            const double scale = 1.0 / std::sqrt(s);
            for (auto& [occ, a] : st->amplitudes)
                a *= scale;
            out.state = std::move(st);
        }
        success.add(out.weight);
        kept.push_back(std::move(out));
    }
    res.success_prob = success.value();
    if (!(res.success_prob > state.tail_bound))
        throw EmptyPostselection("postselect: success probability " + std::to_string(res.success_prob) +
                                 " does not exceed the truncation tail " + std::to_string(state.tail_bound));
    const double norm = res.success_prob + state.tail_bound;
    for (auto& c : kept)
        c.weight /= norm;
    res.state.components = std::move(kept);
    res.state.tail_bound = state.tail_bound / norm;
    return res;
}

double fidelity_psi_minus(const MixedStateAD& state)
{
    const Occupation4 up(1, 0, 1, 0), down(0, 1, 0, 1);
    CompensatedSum f;
    for (const auto& c : state.components) {
        if (c.state->total_photons != 2)
            continue;
        const complex ov = (c.state->amplitude(up) - c.state->amplitude(down)) / std::sqrt(2.0);
        f.add(c.weight * std::norm(ov));
    }
    return std::clamp(f.value(), 0.0, 1.0);
}

double werner_visibility(double F)
{
    if (!(F >= 0.0 && F <= 1.0))
        throw InvalidArgument("werner_visibility: fidelity outside [0,1]");
    return (4.0 * F - 1.0) / 3.0;
}

std::vector<Occupation4> side_limited_basis(int max_a, int max_d)
{
    std::vector<Occupation4> basis;
    for (int na = 0; na <= max_a; ++na)
        for (int nd = 0; nd <= max_d; ++nd)
            for (int aH = 0; aH <= na; ++aH)
                for (int dH = 0; dH <= nd; ++dH)
                    basis.emplace_back(aH, na - aH, nd - dH, dH);
    return basis;
}

Eigen::MatrixXcd density_matrix(const MixedStateAD& state, const std::vector<Occupation4>& basis)
{
    std::map<Occupation4, Eigen::Index> index;
    for (std::size_t k = 0; k < basis.size(); ++k)
        if (!index.emplace(basis[k], static_cast<Eigen::Index>(k)).second)
            throw InvalidArgument("density_matrix: duplicate basis occupation " + to_string(basis[k]));
    const auto n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXcd v(n);
    for (const auto& c : state.components) {
        v.setZero();
        bool any = false;
        for (const auto& [occ, a] : c.state->amplitudes) {
            auto it = index.find(occ);
            if (it != index.end()) {
                v[it->second] = a;
                any = true;
            }
        }
        if (any)
            rho.noalias() += c.weight * v * v.adjoint();
    }
    return rho;
}

void write_state(std::ostream& os, const MixedStateAD& state, const std::map<std::string, std::string>& meta)
{
    os << "# swapsim mixed state v1\n";
    for (const auto& [k, v] : meta)
        os << "# " << k << " = " << v << '\n';
    {
        std::ostringstream t;
        t << std::setprecision(17) << state.tail_bound;
        os << "# tail_bound = " << t.str() << '\n';
    }
    os << "# components = " << state.components.size() << '\n';
    os << "# columns: component weight aH aV dV dH re im\n";
    std::ostringstream line;
    line << std::setprecision(17);
    for (std::size_t k = 0; k < state.components.size(); ++k) {
        const auto& c = state.components[k];
        for (const auto& [occ, a] : c.state->amplitudes) {
            line.str("");
            line << k << ' ' << c.weight << ' ' << occ[0] << ' ' << occ[1] << ' ' << occ[2] << ' ' << occ[3] << ' '
                 << a.real() << ' ' << a.imag() << '\n';
            os << line.str();
        }
    }
}

StateFile read_state(std::istream& is)
{
    StateFile out;
    std::string line;
    int lineno = 0;
    long current = -1;
    std::shared_ptr<PureStateAD> cur;
    auto flush = [&] {
        if (cur) {
            out.state.components.back().state = cur;
            cur.reset();
        }
    };
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        if (line[0] == '#') {
            const auto eq = line.find(" = ");
            if (eq != std::string::npos) {
                std::string key = line.substr(1, eq - 1);
                key.erase(0, key.find_first_not_of(' '));
                out.meta[key] = line.substr(eq + 3);
            }
            continue;
        }
        std::istringstream ls(line);
        long comp;
        double w, re, im;
        int n0, n1, n2, n3;
        if (!(ls >> comp >> w >> n0 >> n1 >> n2 >> n3 >> re >> im))
            throw ConfigError("malformed state line", lineno);
        if (comp != current) {
            if (comp != current + 1)
                throw ConfigError("component indices must be consecutive", lineno);
            flush();
            current = comp;
            out.state.components.push_back(StateComponent{w, nullptr, Occupation4{}});
            cur = std::make_shared<PureStateAD>();
            cur->total_photons = n0 + n1 + n2 + n3;
        }
        cur->amplitudes[Occupation4(n0, n1, n2, n3)] = complex(re, im);
    }
    flush();
    auto it = out.meta.find("tail_bound");
    if (it != out.meta.end())
        out.state.tail_bound = std::stod(it->second);
    return out;
}

} // namespace swapsim
