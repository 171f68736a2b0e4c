#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dnls/integrate.hpp"
#include "dnls/util.hpp"

using namespace dnls;

namespace {

SpectralField random_field(int M, Rng& rng, int band = -1) {
    SpectralField f(M);
    const int B = (band < 0) ? M / 2 - 1 : band;
    for (int k = -B; k <= B; ++k) f.at(k) = 0.3 * rng.cgauss();
    return f;
}

double dist(const SpectralField& a, const SpectralField& b) {
    return std::sqrt(l2_norm_sq(a - b));
}

PhysParams params(int M, double gamma, SpectralField f = {}) {
    PhysParams p;
    p.gamma = gamma;
    p.forcing = f.empty() ? SpectralField(M) : std::move(f);
    return p;
}

// Closed-form single-mode solution of the full equation with f = 0:
// u(t) = A e^{-gamma t} exp(i(kx + k^2 t - s A^2 (1 - e^{-2 gamma t})/(2 gamma))).
SpectralField single_mode_exact(int M, int k, double A, double gamma, int sign, double t) {
    const double amp = A * std::exp(-gamma * t);
    const double phase = static_cast<double>(k) * k * t -
                         sign * A * A * (1.0 - std::exp(-2.0 * gamma * t)) / (2.0 * gamma);
    return SpectralField::from_mode(M, k, amp * cplx{std::cos(phase), std::sin(phase)});
}

}  // namespace

TEST_CASE("linear step: exact dissipation, Duhamel, fixed point") {
    const int M = 32;
    Rng rng(5);

    SUBCASE("f = 0: norm decays by exactly e^{-gamma dt}") {
        PhysParams p = params(M, 0.8);
        SpectralField u = random_field(M, rng);
        const double before = std::sqrt(l2_norm_sq(u));
        SpectralField v = linear_step(u, 0.37, p, true);
        const double after = std::sqrt(l2_norm_sq(v));
        CHECK(after == doctest::Approx(std::exp(-0.8 * 0.37) * before).epsilon(1e-14));
    }
    SUBCASE("one step from rest reproduces the per-mode Duhamel formula") {
        SpectralField f = random_field(M, rng, 5);
        PhysParams p = params(M, 0.6, f);
        const double dt = 0.21;
        SpectralField v = linear_step(SpectralField(M), dt, p, true);
        for (int k = -M / 2 + 1; k <= M / 2 - 1; ++k) {
            const cplx lam{-0.6, static_cast<double>(k) * k};
            const cplx want = f.at(k) * (std::exp(lam * dt) - 1.0) / lam;
            CHECK(std::abs(v.at(k) - want) < 1e-14 * (1.0 + std::abs(want)));
        }
    }
    SUBCASE("large-dt iterates converge to the steady state g") {
        SpectralField f = random_field(M, rng, 5);
        PhysParams p = params(M, 0.5, f);
        SpectralField g = steady_state_g(f, p.gamma);
        SpectralField u(M);
        for (int it = 0; it < 6; ++it) u = linear_step(u, 40.0, p, true);
        CHECK(dist(u, g) < 1e-8 * std::sqrt(l2_norm_sq(g)));
    }
}

TEST_CASE("nonlinear step: unitary collocation phase") {
    const int M = 32;
    Rng rng(9);

    SUBCASE("single mode rotates by e^{-i |c|^2 dt}") {
        const cplx c{0.8, 0.3};
        SpectralField u = SpectralField::from_mode(M, 4, c);
        SpectralField v = nonlinear_step(u, 0.5, +1);
        const double angle = -std::norm(c) * 0.5;
        const cplx want = c * cplx{std::cos(angle), std::sin(angle)};
        CHECK(std::abs(v.at(4) - want) < 1e-13);
        for (int k = v.min_wavenumber(); k <= v.max_wavenumber(); ++k)
            if (k != 4) CHECK(std::abs(v.at(k)) < 1e-13);
    }
    SUBCASE("dt = 0 is the identity") {
        SpectralField u = random_field(M, rng);
        SpectralField v = nonlinear_step(u, 0.0, +1);
        CHECK(dist(u, v) == 0.0);
    }
    SUBCASE("collocation moduli and the L2 norm are preserved") {
        SpectralField u = random_field(M, rng);
        SpectralField v = nonlinear_step(u, 0.13, -1);
        const double n0 = std::sqrt(l2_norm_sq(u));
        const double n1 = std::sqrt(l2_norm_sq(v));
        CHECK(std::abs(n1 - n0) < 1e-12 * n0);
        auto before = synthesize(u, M - 1);
        auto after = synthesize(v, M - 1);
        for (size_t j = 0; j < before.size(); ++j)
            CHECK(std::abs(std::abs(after[j]) - std::abs(before[j])) < 1e-13);
    }
}

TEST_CASE("full integration: single-mode closed form and convergence order") {
    const int M = 64;
    const double gamma = 0.5;
    const double A = 1.0;
    const int k = 1;
    PhysParams p = params(M, gamma);
    SpectralField u0 = single_mode_exact(M, k, A, gamma, +1, 0.0);

    SchemeSpec s;
    s.dt = 1e-3;
    s.horizon = 10.0;
    s.store_every = 2000;

    Trajectory traj = integrate_full(u0, p, s);
    const SpectralField exact = single_mode_exact(M, k, A, gamma, +1, 10.0);
    const double err = dist(traj.primary_field(traj.samples() - 1), exact);
    CHECK(err < 1e-8);

    SchemeSpec s2 = s;
    s2.dt = 5e-4;
    Trajectory traj2 = integrate_full(u0, p, s2);
    const double err2 = dist(traj2.primary_field(traj2.samples() - 1), exact);
    CHECK(err / err2 > 3.7);  // second order
}

TEST_CASE("full integration: undriven runs dissipate monotonically") {
    const int M = 32;
    Rng rng(13);
    PhysParams p = params(M, 0.4);
    SpectralField u0 = random_field(M, rng);
    SchemeSpec s;
    s.dt = 1e-3;
    s.horizon = 1.0;
    s.store_every = 100;
    Trajectory traj = integrate_full(u0, p, s);
    const double n0 = std::sqrt(l2_norm_sq(u0));
    for (size_t i = 0; i < traj.samples(); ++i) {
        const double bound = std::exp(-p.gamma * traj.times[i]) * n0;
        CHECK(std::sqrt(traj.diagnostics[i].l2_sq) <= bound * (1.0 + 1e-6));
    }
}

TEST_CASE("full integration: determinism is bit-exact") {
    const int M = 32;
    Rng rng(21);
    SpectralField f = random_field(M, rng, 3);
    PhysParams p = params(M, 0.5, f);
    SpectralField u0 = random_field(M, rng);
    SchemeSpec s;
    s.dt = 1e-2;
    s.horizon = 0.5;
    s.store_every = 10;
    Trajectory a = integrate_full(u0, p, s);
    Trajectory b = integrate_full(u0, p, s);
    REQUIRE(a.samples() == b.samples());
    for (size_t i = 0; i < a.samples(); ++i) {
        const SpectralField fa = a.primary_field(i);
        const SpectralField fb = b.primary_field(i);
        for (int k = fa.min_wavenumber(); k <= fa.max_wavenumber(); ++k)
            CHECK(fa.at(k) == fb.at(k));
    }
}

TEST_CASE("full integration: scheme cross-validation on well-resolved data") {
    // At M = 128 with low-band data the collocation and Galerkin cubic agree
    // to spectral accuracy, so all three schemes approach the same limit.
    const int M = 128;
    Rng rng(29);
    SpectralField f(M), u0(M);
    for (int k = -2; k <= 2; ++k) f.at(k) = 0.1 * rng.cgauss();
    for (int k = -4; k <= 4; ++k) u0.at(k) = 0.1 * rng.cgauss();
    PhysParams p = params(M, 0.5, f);
    SchemeSpec strang{Method::strang_split, 5e-4, 1.0, 2000};
    SchemeSpec etd{Method::etd_rk2, 5e-4, 1.0, 2000};
    SchemeSpec rk4{Method::rk4_reference, 5e-4, 1.0, 2000};

    const SpectralField a = integrate_full(u0, p, strang).primary_field(1);
    const SpectralField b = integrate_full(u0, p, etd).primary_field(1);
    const SpectralField c = integrate_full(u0, p, rk4).primary_field(1);
    CHECK(dist(a, c) < 1e-7);
    CHECK(dist(b, c) < 2e-6);  // the two-stage exponential scheme has a larger constant
    CHECK(dist(a, b) < 2e-6);

    SchemeSpec bad{Method::rk4_reference, 1e-3, 1.0, 10};  // k^2 dt too large here
    CHECK_THROWS_AS(integrate_full(u0, p, bad), std::invalid_argument);
}

TEST_CASE("blow-up guard trips with a tiny threshold factor") {
    const int M = 32;
    Rng rng(33);
    SpectralField f = random_field(M, rng, 2);
    PhysParams p = params(M, 0.5, f);
    SchemeSpec s{Method::strang_split, 1e-2, 1.0, 1};
    IntegrateOptions opt;
    opt.blowup_factor = 1e-9;
    CHECK_THROWS_AS(integrate_full(random_field(M, rng), p, s, opt), BlowupError);
}

TEST_CASE("modified integration: gap decays exactly at rate 2 gamma") {
    const int M = 32;
    Rng rng(37);
    SpectralField f = random_field(M, rng, 3);
    PhysParams p = params(M, 0.5, f);
    SpectralField v0 = random_field(M, rng, 6);
    const double gap0 = two_pi;
    ModifiedState s0{v0, l2_norm_sq(v0) + gap0};

    SchemeSpec s{Method::strang_split, 1e-3, 2.0, 200};
    Trajectory traj = integrate_modified(s0, p, s);
    for (size_t i = 0; i < traj.samples(); ++i) {
        const ModifiedState& ms = std::get<ModifiedState>(traj.states[i]);
        const double gap = ms.a - traj.diagnostics[i].l2_sq;
        const double want = gap0 * std::exp(-2.0 * p.gamma * traj.times[i]);
        CHECK(gap == doctest::Approx(want).epsilon(1e-4));
    }
}

TEST_CASE("modified integration: a identically ||v||^2 tracks the plain flow") {
    const int M = 32;
    Rng rng(43);
    SpectralField f = random_field(M, rng, 3);
    PhysParams p = params(M, 0.5, f);
    SpectralField v0 = random_field(M, rng, 6);
    ModifiedState s0{v0, l2_norm_sq(v0)};
    SchemeSpec s{Method::strang_split, 1e-3, 1.0, 1000};

    Trajectory mod = integrate_modified(s0, p, s);
    Trajectory full = integrate_full(v0, p, s);
    const SpectralField vm = mod.primary_field(mod.samples() - 1);
    const SpectralField uf = full.primary_field(full.samples() - 1);
    CHECK(dist(vm, uf) < 1e-5);
}

TEST_CASE("modified integration: tabulated a reproduces the coupled run") {
    const int M = 32;
    Rng rng(47);
    SpectralField f = random_field(M, rng, 3);
    PhysParams p = params(M, 0.5, f);
    SpectralField v0 = random_field(M, rng, 6);
    ModifiedState s0{v0, l2_norm_sq(v0) + 1.5};
    SchemeSpec s{Method::strang_split, 1e-3, 1.0, 1};

    Trajectory ode = integrate_modified(s0, p, s);
    AValueTable table;
    for (size_t i = 0; i < ode.samples(); ++i) {
        table.t.push_back(ode.times[i]);
        table.a.push_back(std::get<ModifiedState>(ode.states[i]).a);
    }
    IntegrateOptions opt;
    opt.a_table = &table;
    Trajectory tab = integrate_modified(s0, p, s, opt);
    const double d = dist(ode.primary_field(ode.samples() - 1),
                          tab.primary_field(tab.samples() - 1));
    CHECK(d < 1e-5);
}

TEST_CASE("decomposition integration: v + w telescopes to the direct run") {
    const int M = 64;
    const int N = 8;
    Rng rng(51);
    SpectralField f = random_field(M, rng, 4);
    PhysParams p = params(M, 0.5, f);
    SpectralField u0 = random_field(M, rng, 20);
    SchemeSpec s{Method::strang_split, 1e-3, 2.0, 200};

    DecompState s0{project(u0, N, Band::low), project(u0, N, Band::high), N};
    CHECK(std::sqrt(l2_norm_sq(s0.w)) ==
          doctest::Approx(std::sqrt(l2_norm_sq(project(u0, N, Band::high)))));

    Trajectory dec = integrate_decomposition(s0, p, s);
    Trajectory full = integrate_full(u0, p, s);
    REQUIRE(dec.samples() == full.samples());
    for (size_t i = 0; i < dec.samples(); ++i) {
        const double d = dist(dec.primary_field(i), full.primary_field(i));
        CHECK(d < 1e-10);
    }
    CHECK(dec.aux_z.size() == dec.samples());
}

TEST_CASE("decomposition integration: w stays zero when u0 is low-band") {
    const int M = 32;
    const int N = 10;
    Rng rng(57);
    SpectralField f = random_field(M, rng, 3);
    PhysParams p = params(M, 0.5, f);
    SpectralField u0 = random_field(M, rng, N);  // supported in |k| <= N
    SchemeSpec s{Method::strang_split, 1e-3, 0.5, 100};

    DecompState s0{project(u0, N, Band::low), project(u0, N, Band::high), N};
    Trajectory dec = integrate_decomposition(s0, p, s);
    for (size_t i = 0; i < dec.samples(); ++i) {
        const DecompState& d = std::get<DecompState>(dec.states[i]);
        // w is driven only through Q_N(|u|^2 u - |v|^2 v); with w(0) = 0 the
        // kicks vanish identically, so w remains exactly zero
        CHECK(std::sqrt(l2_norm_sq(d.w)) == 0.0);
    }
}

TEST_CASE("z run with constant v: pure linear decay at v = 0") {
    const int M = 32;
    const int N = 5;
    Rng rng(63);
    PhysParams p = params(M, 0.7);
    SpectralField z0 = project(random_field(M, rng), N, Band::high);
    SchemeSpec s{Method::strang_split, 1e-2, 1.0, 10};
    Trajectory traj = integrate_z_const_v(z0, SpectralField(M), N, p, s);
    const double n0 = std::sqrt(l2_norm_sq(z0));
    for (size_t i = 0; i < traj.samples(); ++i) {
        const double want = n0 * std::exp(-p.gamma * traj.times[i]);
        CHECK(std::sqrt(traj.diagnostics[i].l2_sq) ==
              doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("resume: start_step continues the same sampling grid") {
    const int M = 32;
    Rng rng(69);
    SpectralField f = random_field(M, rng, 3);
    PhysParams p = params(M, 0.5, f);
    SpectralField u0 = random_field(M, rng);
    SchemeSpec s{Method::strang_split, 1e-2, 1.0, 10};

    Trajectory whole = integrate_full(u0, p, s);
    SchemeSpec first_half = s;
    first_half.horizon = 0.5;
    Trajectory front = integrate_full(u0, p, first_half);
    const SpectralField mid = front.primary_field(front.samples() - 1);
    IntegrateOptions opt;
    opt.start_step = 50;
    Trajectory back = integrate_full(mid, p, s, opt);

    const SpectralField a = whole.primary_field(whole.samples() - 1);
    const SpectralField b = back.primary_field(back.samples() - 1);
    for (int k = a.min_wavenumber(); k <= a.max_wavenumber(); ++k)
        CHECK(a.at(k) == b.at(k));
}

TEST_CASE("scheme validation and default dt") {
    CHECK_THROWS_AS((SchemeSpec{Method::strang_split, 0.0, 1.0, 1}.validate()),
                    std::invalid_argument);
    CHECK_THROWS_AS((SchemeSpec{Method::strang_split, 0.5, 0.1, 1}.validate()),
                    std::invalid_argument);
    CHECK(default_dt(16) == doctest::Approx(1e-3));
    CHECK(default_dt(128) == doctest::Approx(0.1 * two_pi / (128.0 * 128.0)));
}
