#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace swapsim;

namespace {

Posterior4 point_posterior(const Occupation4& o)
{
    Posterior4 p;
    for (std::size_t k = 0; k < 4; ++k) {
        p.factors[k].assign(o[k] + 1, 0.0);
        p.factors[k][o[k]] = 1.0;
    }
    p.evidence = 1.0;
    return p;
}

std::vector<Occupation4> occupations_with_total(int n)
{
    std::vector<Occupation4> out;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n - i; ++j)
            for (int k = 0; k <= n - i - j; ++k)
                out.emplace_back(i, j, k, n - i - j - k);
    return out;
}

} // namespace

TEST_SUITE("analysis")
{
    TEST_CASE("angle conventions")
    {
        const AngleConfig a = AngleConfig::from_degrees(45.0, 90.0);
        CHECK(a.alpha_real == doctest::Approx(M_PI / 4));
        CHECK(a.bloch_alpha() == doctest::Approx(M_PI / 2));
        CHECK(a.bloch_delta() == doctest::Approx(M_PI));
        CHECK(a.waveplate_alpha() == doctest::Approx(M_PI / 8));
    }

    TEST_CASE("pattern indexing")
    {
        for (int k = 0; k < 16; ++k)
            CHECK(pattern_index(pattern_from_index(k)) == k);
        CHECK(pattern_index(make_pattern(1, 0, 1, 0)) == 10);
    }

    TEST_CASE("identity rotation")
    {
        const AngleConfig id{0.0, 0.0};
        for (int n = 0; n <= 3; ++n)
            for (const auto& a : occupations_with_total(n))
                for (const auto& b : occupations_with_total(n))
                    CHECK(std::abs(fock_rotation_amplitude(a, b, id) - complex(a == b ? 1.0 : 0.0)) < 1e-15);
        // For a Bell-readout label the identity reads out Phi's own amplitudes.
        for (const auto& to : occupations_with_total(2))
            CHECK(std::abs(rotation_amplitude({1, 0, 1, 0}, to, id) - phi_state({1, 0, 1, 0}).amplitude(to)) < 1e-15);
    }

    TEST_CASE("single photon rotation is a spin-1/2 rotation")
    {
        for (double alpha : {0.1, 0.7, M_PI / 4, 2.0}) {
            const AngleConfig a{alpha, 0.0};
            const complex stay = fock_rotation_amplitude({1, 0, 0, 0}, {1, 0, 0, 0}, a);
            const complex flip = fock_rotation_amplitude({1, 0, 0, 0}, {0, 1, 0, 0}, a);
            CHECK(std::norm(stay) == doctest::Approx(std::cos(alpha) * std::cos(alpha)));
            CHECK(std::abs(stay - complex(std::cos(alpha))) < 1e-15);
            CHECK(std::abs(flip - complex(0.0, std::sin(alpha))) < 1e-15);
        }
    }

    TEST_CASE("label amplitudes match the expm reference")
    {
        // mpmath expm of the generator, tests/oracles/generate.py
        const complex a = rotation_amplitude({1, 0, 1, 0}, {0, 1, 1, 0}, {M_PI / 4, 0.0});
        CHECK(std::abs(a - complex(0.0, -0.3535533905932737622)) < 1e-14);
        CHECK(transition_prob({1, 0, 1, 0}, {0, 1, 1, 0}, {M_PI / 4, 0.0}) == doctest::Approx(0.125));
        CHECK(transition_prob({1, 0, 1, 0}, {1, 0, 1, 0}, {M_PI / 4, M_PI / 4}) == doctest::Approx(0.25));
    }

    TEST_CASE("transition probabilities are unitary")
    {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> ang(0.0, M_PI);
        for (int rep = 0; rep < 8; ++rep) {
            const AngleConfig a{ang(rng), ang(rng)};
            for (int n = 0; n <= 4; ++n)
                for (const auto& from : occupations_with_total(n)) {
                    double s = 0.0;
                    for (const auto& to : occupations_with_total(n))
                        s += transition_prob(from, to, a);
                    CHECK(std::fabs(s - 1.0) < 1e-10);
                }
        }
    }

    TEST_CASE("disentangled formula agrees at regular angles")
    {
        std::mt19937 rng(19);
        std::uniform_real_distribution<double> ang(0.05, 1.4);
        for (int rep = 0; rep < 6; ++rep) {
            const AngleConfig a{ang(rng), ang(rng)};
            for (int n = 0; n <= 4; ++n)
                for (const auto& from : occupations_with_total(n))
                    for (const auto& to : occupations_with_total(n)) {
                        const complex x = rotation_amplitude(from, to, a);
                        const complex y = disentangled_rotation_amplitude(from, to, a);
                        CHECK(std::fabs(std::abs(x) - std::abs(y)) < 1e-12);
                    }
        }
        CHECK_THROWS_AS(disentangled_rotation_amplitude({1, 0, 1, 0}, {1, 0, 1, 0}, {M_PI / 4, M_PI / 2}),
                        InvalidArgument);
    }

    TEST_CASE("vacuum gives no clicks")
    {
        const Posterior4 p = posterior_joint(threshold_readout(0, 0, 0, 0), 1e-9, testing::uniform_bank(1.0, 0.0));
        const double prob = coincidence_prob(make_pattern(0, 0, 0, 0), p, {M_PI / 4, 0.3}, testing::uniform_bank(0.5, 0.0));
        CHECK(prob == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("ideal single-pair coincidence is one quarter")
    {
        const Posterior4 p = point_posterior({1, 0, 1, 0});
        const auto ideal = testing::uniform_bank(1.0, 0.0);
        const AngleConfig a{M_PI / 4, M_PI / 4};
        CHECK(coincidence_prob(make_pattern(1, 0, 1, 0), p, a, ideal) == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(coincidence_prob(make_pattern(0, 1, 0, 1), p, a, ideal) == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(coincidence_prob(make_pattern(0, 1, 1, 0), p, a, ideal) == doctest::Approx(0.0).epsilon(1e-14));
    }

    TEST_CASE("pattern probabilities match a direct double sum")
    {
        const Posterior4 p = posterior_joint(threshold_readout(1, 0, 1, 0), 0.2, testing::uniform_bank(0.3, 1e-4));
        const auto bank = testing::uniform_bank(0.5, 1e-3);
        const AngleConfig a{0.4, 1.1};
        CoincidenceModel model({{&p, 1.0}}, a.alpha_real, bank);
        const auto pats = model.patterns(a.delta_real);
        // Straight sum over labels and output Fock states with W and detector probabilities.
        std::array<double, 16> direct{};
        for (const auto& [label, w] : p.materialize()) {
            if (w < 1e-14)
                continue;
            for (const auto& to : occupations_with_total(label.total())) {
                const double W = transition_prob(label, to, a);
                if (W == 0.0)
                    continue;
                for (int k = 0; k < 16; ++k) {
                    const auto pat = pattern_from_index(k);
                    double d = 1.0;
                    for (int m = 0; m < 4; ++m)
                        d *= prob_threshold_given_incident(pat[m], to[m], bank[m]);
                    direct[k] += w * W * d;
                }
            }
        }
        for (int k = 0; k < 16; ++k)
            CHECK(std::fabs(pats[k] - direct[k]) < 1e-12);
    }

    TEST_CASE("ideal curves are complementary and phase shifted")
    {
        ExperimentConfig c;
        c.chi = 0.01;
        c.bell_bank = testing::uniform_bank(1.0, 0.0);
        c.analysis_bank = testing::uniform_bank(1.0, 0.0);
        std::vector<double> grid;
        for (int k = 0; k <= 36; ++k)
            grid.push_back(k * 5.0 * M_PI / 180.0);
        const ScanResult s = four_fold_scan(c, grid, 1);
        for (std::size_t k = 0; k + 18 < grid.size(); ++k)
            CHECK(std::fabs(s.corr[k] - s.anticorr[k + 18]) < 1e-12);
        const std::size_t imax = std::max_element(s.anticorr.begin(), s.anticorr.end()) - s.anticorr.begin();
        const std::size_t imin = std::min_element(s.anticorr.begin(), s.anticorr.end()) - s.anticorr.begin();
        CHECK(grid[imax] == doctest::Approx(M_PI / 4));
        CHECK(grid[imin] == doctest::Approx(3 * M_PI / 4));
        CHECK(visibility(s.anticorr) > 0.999);
    }

    TEST_CASE("the two accepted readouts give the same curve for a uniform bank")
    {
        ExperimentConfig c = testing::reference_config();
        c.bell_bank = testing::uniform_bank(0.1, 2e-5);
        const BellConditioning cond = condition_on_accepted(c);
        CoincidenceModel a({{&cond.first, 1.0}}, c.alpha_real, c.analysis_bank);
        CoincidenceModel b({{&cond.second, 1.0}}, c.alpha_real, c.analysis_bank);
        for (double d : {0.0, 0.3, 0.785, 1.2, 2.4}) {
            const auto x = a.curves(d), y = b.curves(d);
            CHECK(std::fabs(x.first - y.first) < 1e-10);
            CHECK(std::fabs(x.second - y.second) < 1e-10);
        }
    }

    TEST_CASE("scan output does not depend on the thread count")
    {
        ExperimentConfig c = testing::reference_config();
        c.chi = 0.15;
        std::vector<double> grid;
        for (int k = 0; k < 13; ++k)
            grid.push_back(k * M_PI / 12);
        const ScanResult one = four_fold_scan(c, grid, 1);
        const ScanResult three = four_fold_scan(c, grid, 3);
        CHECK(one.anticorr == three.anticorr);
        CHECK(one.corr == three.corr);
        const auto v1 = visibility_vs_chi(c, {0.05, 0.1, 0.2}, 1);
        const auto v3 = visibility_vs_chi(c, {0.05, 0.1, 0.2}, 3);
        for (std::size_t k = 0; k < v1.size(); ++k)
            CHECK(v1[k].result.visibility == v3[k].result.visibility);
    }

    TEST_CASE("visibility and CHSH arithmetic")
    {
        CHECK(visibility({0.3, 0.3, 0.3}) == 0.0);
        CHECK(visibility({0.0, 0.2, 0.5}) == 1.0);
        CHECK_THROWS_AS(visibility({0.0, 0.0}), InvalidArgument);
        CHECK(chsh_s(1.0) == doctest::Approx(2.0 * std::sqrt(2.0)));
        CHECK(chsh_s(1.0 / std::sqrt(2.0)) == doctest::Approx(2.0));
        CHECK(chsh_s(0.777) == doctest::Approx(2.19768).epsilon(1e-5));
    }

    TEST_CASE("visibility stays in [0,1]")
    {
        ExperimentConfig c = testing::reference_config();
        for (double chi : {0.01, 0.1, 0.3, 0.5}) {
            c.chi = chi;
            const double v = scan_visibility(c).visibility;
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}
