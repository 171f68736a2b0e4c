#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dnls/diagnostics.hpp"
#include "dnls/util.hpp"

using namespace dnls;

namespace {

SpectralField random_field(int M, Rng& rng, int band = -1) {
    SpectralField f(M);
    const int B = (band < 0) ? M / 2 - 1 : band;
    for (int k = -B; k <= B; ++k) f.at(k) = 0.3 * rng.cgauss();
    return f;
}

PhysParams params(int M, double gamma, SpectralField f = {}) {
    PhysParams p;
    p.gamma = gamma;
    p.forcing = f.empty() ? SpectralField(M) : std::move(f);
    return p;
}

}  // namespace

TEST_CASE("energy residual: exact flows sit at roundoff") {
    const int M = 32;
    Rng rng(3);

    SUBCASE("f = 0, linear flow") {
        PhysParams p = params(M, 0.5);
        p.cubic_enabled = false;
        SpectralField u0 = random_field(M, rng);
        SchemeSpec s{Method::strang_split, 1e-3, 1.0, 10};
        Trajectory traj = integrate_full(u0, p, s);
        ResidualReport rep = energy_residual(traj, p);
        for (double r : rep.per_interval) CHECK(std::abs(r) < 1e-12);
    }
    SUBCASE("steady run from g, nonlinearity off") {
        SpectralField f = random_field(M, rng, 5);
        PhysParams p = params(M, 0.5, f);
        p.cubic_enabled = false;
        SpectralField g = steady_state_g(f, p.gamma);
        SchemeSpec s{Method::strang_split, 1e-3, 1.0, 10};
        Trajectory traj = integrate_full(g, p, s);
        ResidualReport rep = energy_residual(traj, p);
        for (double r : rep.per_interval) CHECK(std::abs(r) < 1e-12);
        // all samples constant
        for (size_t i = 0; i < traj.samples(); ++i)
            CHECK(traj.diagnostics[i].l2_sq ==
                  doctest::Approx(l2_norm_sq(g)).epsilon(1e-12));
    }
    SUBCASE("full dynamics: residual drops by 4-8 when dt halves") {
        SpectralField f = random_field(M, rng, 3);
        PhysParams p = params(M, 0.5, f);
        SpectralField u0 = random_field(M, rng, 8);
        SchemeSpec s1{Method::strang_split, 2e-3, 1.0, 1};
        SchemeSpec s2{Method::strang_split, 1e-3, 1.0, 1};
        const double r1 = energy_residual(integrate_full(u0, p, s1), p).max_per_unit_time;
        const double r2 = energy_residual(integrate_full(u0, p, s2), p).max_per_unit_time;
        CHECK(r1 / r2 > 3.5);
        CHECK(r1 / r2 < 9.0);
    }
    SUBCASE("fewer than two samples rejected") {
        Trajectory traj;
        traj.times.push_back(0.0);
        traj.states.emplace_back(SpectralField(M));
        traj.diagnostics.push_back({});
        CHECK_THROWS_AS(energy_residual(traj, params(M, 0.5)), std::invalid_argument);
    }
}

TEST_CASE("absorbing check: envelope, entry, persistence") {
    const int M = 32;
    Rng rng(7);

    SUBCASE("f = 0 saturates the decay envelope without violations") {
        PhysParams p = params(M, 0.5);
        SpectralField u0 = random_field(M, rng);
        SchemeSpec s{Method::strang_split, 1e-3, 2.0, 50};
        Trajectory traj = integrate_full(u0, p, s);
        AbsorbingReport rep = absorbing_check(traj, u0, p);
        CHECK(rep.violations == 0);
        CHECK(rep.M0 == 0.0);
    }
    SUBCASE("u0 = 0 stays under the forcing envelope") {
        SpectralField f = random_field(M, rng, 3);
        PhysParams p = params(M, 0.5, f);
        SchemeSpec s{Method::strang_split, 1e-3, 5.0, 100};
        Trajectory traj = integrate_full(SpectralField(M), p, s);
        AbsorbingReport rep = absorbing_check(traj, SpectralField(M), p);
        CHECK(rep.violations == 0);
        const double f_sq = l2_norm_sq(f);
        for (size_t i = 0; i < traj.samples(); ++i) {
            const double bound = (1.0 - std::exp(-p.gamma * traj.times[i])) /
                                 (p.gamma * p.gamma) * f_sq;
            CHECK(traj.diagnostics[i].l2_sq <= bound + 1e-6);
        }
    }
    SUBCASE("a 5 M0 start enters the ball and stays") {
        SpectralField f = SpectralField::from_mode(M, 1, cplx{0.5, 0.0});
        PhysParams p = params(M, 0.5, f);
        const double M0 = 2.0 * std::sqrt(l2_norm_sq(f)) / p.gamma;
        SpectralField u0 = random_field(M, rng, 8);
        u0 *= (5.0 * M0 / std::sqrt(l2_norm_sq(u0)));
        SchemeSpec s{Method::strang_split, 1e-3, 40.0, 200};
        Trajectory traj = integrate_full(u0, p, s);
        AbsorbingReport rep = absorbing_check(traj, u0, p);
        CHECK(rep.violations == 0);
        CHECK(rep.entry_time >= 0.0);
        CHECK(rep.entry_time <= (2.0 / p.gamma) * std::log(5.0 * 10.0));
        CHECK(rep.persistent);
    }
}

TEST_CASE("equicontinuity modulus") {
    const int M = 32;
    Rng rng(11);

    SUBCASE("constant trajectory has zero modulus") {
        SpectralField f = random_field(M, rng, 4);
        PhysParams p = params(M, 0.5, f);
        p.cubic_enabled = false;
        SpectralField g = steady_state_g(f, p.gamma);
        SchemeSpec s{Method::strang_split, 1e-2, 1.0, 10};
        Trajectory traj = integrate_full(g, p, s);
        EquicontinuityReport rep = equicontinuity_modulus(traj, p);
        CHECK(rep.modulus < 1e-10);
    }
    SUBCASE("undriven decay is bounded by 2 gamma ||u0||^2") {
        PhysParams p = params(M, 0.5);
        SpectralField u0 = random_field(M, rng);
        SchemeSpec s{Method::strang_split, 1e-3, 1.0, 20};
        Trajectory traj = integrate_full(u0, p, s);
        EquicontinuityReport rep = equicontinuity_modulus(traj, p);
        CHECK(rep.modulus <= 2.0 * p.gamma * l2_norm_sq(u0) * (1.0 + 1e-6));
        CHECK(rep.modulus <= rep.bracket);
    }
    SUBCASE("generic run stays below the run bracket") {
        SpectralField f = random_field(M, rng, 3);
        PhysParams p = params(M, 0.4, f);
        SpectralField u0 = random_field(M, rng, 10);
        SchemeSpec s{Method::strang_split, 1e-3, 2.0, 40};
        Trajectory traj = integrate_full(u0, p, s);
        EquicontinuityReport rep = equicontinuity_modulus(traj, p);
        CHECK(rep.modulus <= rep.bracket);
    }
}

TEST_CASE("tail profile") {
    const int M = 64;

    SUBCASE("single mode vanishes past its wavenumber") {
        SpectralField u = SpectralField::from_mode(M, 1, cplx{1.0, 0.0});
        const std::vector<int> cuts{1, 2, 8};
        auto prof = tail_profile(u, cuts);
        for (const auto& [N, eps] : prof) {
            (void)N;
            CHECK(eps == 0.0);
        }
    }
    SUBCASE("geometric coefficients match the closed-form tail") {
        SpectralField u(M);
        for (int k = u.min_wavenumber() + 1; k <= u.max_wavenumber(); ++k)
            u.at(k) = std::pow(2.0, -std::abs(k));
        const std::vector<int> cuts{2, 4, 8, 16};
        auto prof = tail_profile(u, cuts);
        for (const auto& [N, eps] : prof) {
            // finite geometric sum: 2 pi * 2 * sum_{k=N+1}^{M/2-1} 4^{-k}
            double tail_sq = 0.0;
            for (int k = N + 1; k <= M / 2 - 1; ++k) tail_sq += 2.0 * std::pow(4.0, -k);
            tail_sq *= two_pi;
            CHECK(eps == doctest::Approx(std::sqrt(tail_sq)).epsilon(1e-12));
        }
        for (size_t i = 1; i < prof.size(); ++i) CHECK(prof[i].second <= prof[i - 1].second);
    }
    SUBCASE("cutoff beyond the resolved band rejected") {
        SpectralField u(M);
        const std::vector<int> cuts{M / 2};
        CHECK_THROWS_AS(tail_profile(u, cuts), std::invalid_argument);
    }
}

TEST_CASE("weak pairing") {
    const int M = 32;
    SpectralField e1 = SpectralField::from_mode(M, 1, cplx{1.0, 0.0});
    SpectralField e2 = SpectralField::from_mode(M, 2, cplx{1.0, 0.0});
    CHECK(std::abs(weak_pairing(e1, e1) - cplx{two_pi, 0.0}) < 1e-14);
    CHECK(std::abs(weak_pairing(e1, e2)) < 1e-14);

    Rng rng(13);
    SpectralField u = random_field(M, rng);
    SpectralField phi = random_field(M, rng);
    // independent quadrature oracle on the collocation grid
    cplx quad{0.0, 0.0};
    for (int j = 0; j < M; ++j) {
        const double x = two_pi * j / M;
        cplx uv{0.0, 0.0}, pv{0.0, 0.0};
        for (int k = -M / 2 + 1; k <= M / 2 - 1; ++k) {
            uv += u.at(k) * std::exp(cplx{0.0, k * x});
            pv += phi.at(k) * std::exp(cplx{0.0, k * x});
        }
        quad += uv * std::conj(pv);
    }
    quad *= two_pi / static_cast<double>(M);
    CHECK(std::abs(weak_pairing(u, phi) - quad) < 1e-10);
    // conjugate symmetry
    CHECK(std::abs(weak_pairing(u, phi) - std::conj(weak_pairing(phi, u))) < 1e-12);
}

TEST_CASE("decay fit") {
    SUBCASE("exact exponential is recovered to roundoff") {
        std::vector<double> t, v;
        for (int i = 0; i <= 100; ++i) {
            t.push_back(0.05 * i);
            v.push_back(3.7 * std::exp(-0.62 * 0.05 * i));
        }
        DecayFit fit = decay_fit(t, v);
        CHECK(fit.rate == doctest::Approx(-0.62).epsilon(1e-10));
        CHECK(fit.log_prefactor == doctest::Approx(std::log(3.7)).epsilon(1e-10));
        CHECK(fit.points_used == 101);
    }
    SUBCASE("linear high-band run decays at exactly -gamma") {
        const int M = 32;
        Rng rng(17);
        PhysParams p = params(M, 0.8);
        p.cubic_enabled = false;
        SpectralField w0 = project(random_field(M, rng), 5, Band::high);
        SchemeSpec s{Method::strang_split, 1e-2, 1.0, 10};
        Trajectory traj = integrate_full(w0, p, s);
        std::vector<double> t, v;
        for (size_t i = 0; i < traj.samples(); ++i) {
            t.push_back(traj.times[i]);
            v.push_back(std::sqrt(traj.diagnostics[i].l2_sq));
        }
        DecayFit fit = decay_fit(t, v);
        CHECK(fit.rate == doctest::Approx(-p.gamma).epsilon(1e-10));
    }
    SUBCASE("floor censoring and degenerate input") {
        std::vector<double> t{0.0, 1.0, 2.0, 3.0};
        std::vector<double> v{1.0, 0.1, 1e-14, 1e-15};
        DecayFit fit = decay_fit(t, v);
        CHECK(fit.points_used == 2);
        std::vector<double> dead{1e-13, 1e-14};
        std::vector<double> td{0.0, 1.0};
        CHECK_THROWS_AS(decay_fit(td, dead), std::invalid_argument);
    }
}

TEST_CASE("fill_energy_residuals aligns intervals with closing samples") {
    const int M = 16;
    Rng rng(19);
    SpectralField f = random_field(M, rng, 2);
    PhysParams p = params(M, 0.5, f);
    SchemeSpec s{Method::strang_split, 1e-3, 0.1, 10};
    Trajectory traj = integrate_full(random_field(M, rng, 4), p, s);
    fill_energy_residuals(traj, p);
    CHECK(traj.diagnostics[0].energy_residual == 0.0);
    ResidualReport rep = energy_residual(traj, p);
    for (size_t i = 1; i < traj.samples(); ++i)
        CHECK(traj.diagnostics[i].energy_residual == rep.per_interval[i - 1]);
}
