#include "helpers.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <sstream>

using namespace swapsim;

namespace {

MixedStateAD pure(const Occupation4& label)
{
    MixedStateAD m;
    m.components.push_back({1.0, phi_state_cached(label), label});
    return m;
}

MixedStateAD from_amplitudes(const std::map<Occupation4, complex>& amps)
{
    auto st = std::make_shared<PureStateAD>();
    st->amplitudes = amps;
    st->total_photons = amps.begin()->first.total();
    MixedStateAD m;
    m.components.push_back({1.0, st, {}});
    return m;
}

} // namespace

TEST_SUITE("swapstate")
{
    TEST_CASE("assemble from a point posterior")
    {
        Posterior4 p;
        for (auto& f : p.factors)
            f = {1.0};
        const MixedStateAD vac = assemble_state(p);
        REQUIRE(vac.components.size() == 1);
        CHECK(vac.components[0].weight == 1.0);
        CHECK(vac.components[0].state->amplitude({0, 0, 0, 0}) == complex(1.0));

        Posterior4 q;
        q.factors = {std::vector<double>{0, 1}, {1}, {0, 1}, {1}};
        const MixedStateAD s = assemble_state(q);
        REQUIRE(s.components.size() == 1);
        CHECK(s.components[0].state->amplitudes == phi_state({1, 0, 1, 0}).amplitudes);
    }

    TEST_CASE("assemble preserves weight and purity")
    {
        const Posterior4 p = posterior_joint(threshold_readout(1, 0, 1, 0), 0.24, testing::reference_bell_bank());
        const MixedStateAD m = assemble_state(p);
        CHECK(m.total_weight() == doctest::Approx(p.total_weight()).epsilon(1e-12));
        CHECK(std::fabs(m.total_weight() + m.tail_bound - 1.0) < 1e-9);
        for (const auto& c : m.components)
            CHECK(std::fabs(c.state->norm2() - 1.0) < 1e-12);
        CHECK_THROWS_AS(assemble_state(p, 10), BudgetExceeded);
    }

    TEST_CASE("post-selecting the single-pair state yields psi-minus")
    {
        const PostselectResult r = postselect(pure({1, 0, 1, 0}));
        CHECK(r.success_prob == doctest::Approx(0.5).epsilon(1e-15));
        REQUIRE(r.state.components.size() == 1);
        const auto& st = *r.state.components[0].state;
        CHECK(st.amplitudes.size() == 2);
        // (|1010> - |0101>)/sqrt2 up to a global sign
        const complex a = st.amplitude({1, 0, 1, 0}), b = st.amplitude({0, 1, 0, 1});
        CHECK(std::abs(std::abs(a) - 1.0 / std::sqrt(2.0)) < 1e-15);
        CHECK(std::abs(a + b) < 1e-15);
        CHECK(fidelity_psi_minus(r.state) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(werner_visibility(fidelity_psi_minus(r.state)) == doctest::Approx(1.0).epsilon(1e-14));
    }

    TEST_CASE("vacuum cannot be post-selected")
    {
        CHECK_THROWS_AS(postselect(pure({0, 0, 0, 0})), EmptyPostselection);
    }

    TEST_CASE("post-selection is idempotent")
    {
        const Posterior4 p = posterior_joint(threshold_readout(1, 0, 1, 0), 0.24, testing::reference_bell_bank());
        const PostselectResult once = postselect(assemble_state(p));
        const PostselectResult twice = postselect(once.state);
        REQUIRE(once.state.components.size() == twice.state.components.size());
        for (std::size_t k = 0; k < once.state.components.size(); ++k) {
            CHECK(twice.state.components[k].weight == doctest::Approx(once.state.components[k].weight).epsilon(1e-12));
            CHECK(twice.state.components[k].state->amplitudes == once.state.components[k].state->amplitudes);
        }
        CHECK(twice.state.tail_bound == doctest::Approx(once.state.tail_bound));
        CHECK(std::fabs(once.state.total_weight() + once.state.tail_bound - 1.0) < 1e-12);
    }

    TEST_CASE("fidelity limits")
    {
        const double r = 1.0 / std::sqrt(2.0);
        CHECK(fidelity_psi_minus(from_amplitudes({{{1, 0, 1, 0}, r}, {{0, 1, 0, 1}, -r}})) == doctest::Approx(1.0));
        MixedStateAD mixed;
        for (const Occupation4 o : {Occupation4(1, 0, 1, 0), Occupation4(1, 0, 0, 1), Occupation4(0, 1, 1, 0),
                                    Occupation4(0, 1, 0, 1)}) {
            auto st = std::make_shared<PureStateAD>();
            st->total_photons = 2;
            st->amplitudes[o] = 1.0;
            mixed.components.push_back({0.25, st, {}});
        }
        CHECK(fidelity_psi_minus(mixed) == doctest::Approx(0.25));
    }

    TEST_CASE("fidelity is linear in mixture weights")
    {
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<MixedStateAD> parts;
        for (const Occupation4 o : {Occupation4(1, 0, 1, 0), Occupation4(0, 1, 0, 1), Occupation4(1, 1, 0, 0),
                                    Occupation4(2, 0, 1, 1)})
            parts.push_back(postselect(pure(o)).state);
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<double> w(parts.size());
            double s = 0;
            for (double& x : w)
                s += (x = u(rng));
            MixedStateAD mix;
            double expect = 0.0;
            for (std::size_t k = 0; k < parts.size(); ++k) {
                for (auto c : parts[k].components) {
                    c.weight *= w[k] / s;
                    mix.components.push_back(c);
                }
                expect += w[k] / s * fidelity_psi_minus(parts[k]);
            }
            CHECK(fidelity_psi_minus(mix) == doctest::Approx(expect).epsilon(1e-14));
        }
    }

    TEST_CASE("Werner relation")
    {
        CHECK(werner_visibility(1.0) == 1.0);
        CHECK(werner_visibility(0.25) == 0.0);
        CHECK(werner_visibility(0.85) == doctest::Approx(0.8));
        CHECK_THROWS_AS(werner_visibility(1.5), InvalidArgument);
    }

    TEST_CASE("density matrix on the two-photon-per-side sector is a state")
    {
        const Posterior4 p = posterior_joint(threshold_readout(1, 0, 1, 0), 0.24, testing::reference_bell_bank());
        const MixedStateAD m = postselect(assemble_state(p)).state;
        const Eigen::MatrixXcd rho = density_matrix(m, side_limited_basis(2, 2));
        CHECK((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10);
        CHECK(rho.trace().real() <= 1.0 + 1e-12);
    }

    TEST_CASE("text serialization round trip")
    {
        const Posterior4 p = posterior_joint(threshold_readout(1, 0, 1, 0), 0.1, testing::uniform_bank(0.3, 1e-4));
        const MixedStateAD m = assemble_state(p);
        std::stringstream ss;
        write_state(ss, m, {{"chi", "0.1"}, {"readout", "click,no_click,click,no_click"}});
        const StateFile f = read_state(ss);
        CHECK(f.meta.at("chi") == "0.1");
        CHECK(f.meta.at("readout") == "click,no_click,click,no_click");
        CHECK(f.state.tail_bound == m.tail_bound);
        REQUIRE(f.state.components.size() == m.components.size());
        for (std::size_t k = 0; k < m.components.size(); ++k) {
            CHECK(f.state.components[k].weight == m.components[k].weight);
            CHECK(f.state.components[k].state->amplitudes == m.components[k].state->amplitudes);
        }
        std::stringstream bad("0 0.5 1 0 1\n");
        CHECK_THROWS_AS(read_state(bad), ConfigError);
    }
}
