#include "dnls/equations.hpp"

#include <cmath>
#include <stdexcept>

namespace dnls {

namespace {

const cplx kI{0.0, 1.0};

// -i u_xx - gamma u, diagonal per mode: (i k^2 - gamma) u_hat(k).
void add_linear(SpectralField& out, const SpectralField& u, double gamma) {
    for (int k = u.min_wavenumber(); k <= u.max_wavenumber(); ++k) {
        const double k2 = static_cast<double>(k) * k;
        out.at(k) += cplx{-gamma, k2} * u.at(k);
    }
}

}  // namespace

void PhysParams::validate() const {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (nonlin_sign != 1 && nonlin_sign != -1)
        throw std::invalid_argument("nonlin_sign must be +1 or -1");
    if (!forcing.empty() && !forcing.finite())
        throw std::invalid_argument("forcing must be finite");
}

SpectralField rhs_full(const SpectralField& u, const PhysParams& p, int pad) {
    SpectralField out(u.size());
    add_linear(out, u, p.gamma);
    if (p.cubic_enabled) {
        SpectralField cubic = cubic_self(u, pad);
        const cplx scale = -kI * static_cast<double>(p.nonlin_sign);
        out += scale * std::move(cubic);
    }
    if (!p.forcing.empty()) {
        if (p.forcing.size() != u.size()) throw std::invalid_argument("grid mismatch");
        out += p.forcing;
    }
    return out;
}

SpectralField wick_lambda(const SpectralField& u, int pad) {
    SpectralField out = cubic_self(u, pad);
    const double mean_intensity = l2_norm_sq(u) / M_PI;
    for (int k = u.min_wavenumber(); k <= u.max_wavenumber(); ++k)
        out.at(k) -= mean_intensity * u.at(k);
    return out;
}

ModifiedRhs rhs_modified(const ModifiedState& s, const PhysParams& p, int pad) {
    if (s.a < 0.0) throw std::invalid_argument("carried scalar a must be >= 0");
    const double vnorm_sq = l2_norm_sq(s.v);

    ModifiedRhs out;
    out.dv = rhs_full(s.v, p, pad);
    // extra skew term (-i/pi)(a - ||v||^2) v; contributes zero to d||v||^2/dt
    const cplx skew = -kI * ((s.a - vnorm_sq) / M_PI);
    for (int k = s.v.min_wavenumber(); k <= s.v.max_wavenumber(); ++k)
        out.dv.at(k) += skew * s.v.at(k);

    out.da = -2.0 * p.gamma * s.a + 2.0 * pairing(p.forcing, s.v).real();
    return out;
}

DecompRhs rhs_decomposition(const DecompState& s, const PhysParams& p, int pad) {
    const int M = s.v.size();
    if (s.w.size() != M) throw std::invalid_argument("grid mismatch");
    if (s.cutoff < 0 || s.cutoff >= M / 2)
        throw std::invalid_argument("cutoff exceeds resolved band (need N < M/2)");

    const SpectralField u = s.v + s.w;
    const cplx scale = -kI * static_cast<double>(p.nonlin_sign);

    DecompRhs out{SpectralField(M), SpectralField(M)};
    add_linear(out.dv, s.v, p.gamma);
    add_linear(out.dw, s.w, p.gamma);
    if (!p.forcing.empty()) out.dv += p.forcing;

    if (p.cubic_enabled) {
        const SpectralField cu = cubic_self(u, pad);
        const SpectralField cv = cubic_self(s.v, pad);
        // dv gets -i s [ |v|^2 v + P_N(|u|^2 u) - P_N(|v|^2 v) ]
        // dw gets -i s [ Q_N(|u|^2 u) - Q_N(|v|^2 v) ]
        SpectralField nv = cv + project(cu - cv, s.cutoff, Band::low);
        SpectralField nw = project(cu - cv, s.cutoff, Band::high);
        out.dv += scale * std::move(nv);
        out.dw += scale * std::move(nw);
    }
    return out;
}

SpectralField rhs_z(const SpectralField& z, const SpectralField& v, int N,
                    const PhysParams& p, int pad) {
    const int M = z.size();
    if (v.size() != M) throw std::invalid_argument("grid mismatch");
    if (N < 0 || N >= M / 2)
        throw std::invalid_argument("cutoff exceeds resolved band (need N < M/2)");
    for (int k = -N; k <= N; ++k)
        if (z.at(k) != cplx{0.0, 0.0})
            throw std::invalid_argument("z must have no content at |k| <= N");

    SpectralField out(M);
    add_linear(out, z, p.gamma);
    if (p.cubic_enabled) {
        const cplx scale = -kI * static_cast<double>(p.nonlin_sign);
        out += scale * project(cubic_self(v, pad), N, Band::high);
    }
    return out;
}

SpectralField steady_state_g(const SpectralField& f, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    SpectralField g(f.size());
    for (int k = f.min_wavenumber(); k <= f.max_wavenumber(); ++k) {
        const double k2 = static_cast<double>(k) * k;
        g.at(k) = f.at(k) / cplx{gamma, -k2};
    }
    return g;
}

}  // namespace dnls
