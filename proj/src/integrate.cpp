#include "dnls/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dnls {

namespace {

const cplx kI{0.0, 1.0};

cplx lambda_of(int k, double gamma) {
    return cplx{-gamma, static_cast<double>(k) * k};
}

// Exact affine per-mode update u <- E u + f (E - 1)/lambda over one interval.
struct LinearOp {
    std::vector<cplx> E;    // multiplier per centered index
    std::vector<cplx> duh;  // forcing Duhamel term per centered index
    int M = 0;

    void apply(SpectralField& u, bool with_forcing) const {
        auto c = u.coeffs();
        for (size_t i = 0; i < c.size(); ++i) {
            c[i] *= E[i];
            if (with_forcing) c[i] += duh[i];
        }
    }
};

LinearOp make_linear(int M, double dt, const PhysParams& p) {
    if (!p.forcing.empty() && p.forcing.size() != M)
        throw std::invalid_argument("forcing grid mismatch");
    LinearOp op;
    op.M = M;
    op.E.assign(static_cast<size_t>(M), cplx{0.0, 0.0});
    op.duh.assign(static_cast<size_t>(M), cplx{0.0, 0.0});
    for (int k = -M / 2 + 1; k <= M / 2 - 1; ++k) {
        const size_t i = static_cast<size_t>(k + M / 2);
        const cplx lam = lambda_of(k, p.gamma);
        const cplx E = std::exp(lam * dt);
        op.E[i] = E;
        if (!p.forcing.empty()) op.duh[i] = p.forcing.at(k) * (E - 1.0) / lam;
    }
    return op;
}

// In-place cubic phase map on the odd (M-1)-point grid plus an optional
// spatially uniform extra phase angle.
void phase_map(SpectralField& u, double dt, int sign, double extra_phase) {
    const int M = u.size();
    if (dt == 0.0 && extra_phase == 0.0) return;
    const int P = M - 1;

    thread_local std::vector<cplx> bins, vals;
    bins.assign(static_cast<size_t>(P), cplx{0.0, 0.0});
    vals.resize(static_cast<size_t>(P));
    for (int k = -M / 2 + 1; k <= M / 2 - 1; ++k)
        bins[static_cast<size_t>(k >= 0 ? k : k + P)] = u.at(k);
    detail::dft(P, bins.data(), vals.data(), +1);

    const double sdt = sign * dt;
    for (cplx& z : vals) {
        const double angle = -(sdt * std::norm(z) + extra_phase);
        z *= cplx{std::cos(angle), std::sin(angle)};
    }

    detail::dft(P, vals.data(), bins.data(), -1);
    const double inv = 1.0 / P;
    for (int k = -M / 2 + 1; k <= M / 2 - 1; ++k)
        u.at(k) = bins[static_cast<size_t>(k >= 0 ? k : k + P)] * inv;
}

// dt phi1(z) and dt phi2(z) weights of the two-stage exponential scheme.
cplx phi1(cplx z) {
    if (std::abs(z) < 1e-2)
        return 1.0 + z * (0.5 + z * (1.0 / 6 + z * (1.0 / 24 + z / 120.0)));
    return (std::exp(z) - 1.0) / z;
}
cplx phi2(cplx z) {
    if (std::abs(z) < 1e-2)
        return 0.5 + z * (1.0 / 6 + z * (1.0 / 24 + z * (1.0 / 120 + z / 720.0)));
    return (std::exp(z) - 1.0 - z) / (z * z);
}

double plain_norm_sq(const SpectralField& u) {
    double s = 0.0;
    for (const cplx& z : u.coeffs()) s += std::norm(z);
    return two_pi * s;
}

double tail_norm(const SpectralField& u, int N) {
    CompensatedSum acc;
    for (int k = u.min_wavenumber(); k <= u.max_wavenumber(); ++k)
        if (std::abs(k) > N) acc.add(std::norm(u.at(k)));
    return std::sqrt(two_pi * acc.value());
}

DiagnosticRecord make_record(double t, const SpectralField& field,
                             const DiagnosticsSpec& diag) {
    DiagnosticRecord rec;
    rec.t = t;
    rec.l2_sq = l2_norm_sq(field);
    for (double s : diag.hs_list) rec.hs_norms.emplace_back(s, sobolev_norm(field, s));
    for (const auto& [id, probe] : diag.probes)
        rec.pairings.emplace_back(id, pairing(field, probe));
    for (int N : diag.tail_cutoffs) rec.tail.emplace_back(N, tail_norm(field, N));
    return rec;
}

struct RunFrame {
    const SchemeSpec& scheme;
    const IntegrateOptions& opt;
    double guard_threshold_sq = 0.0;
    Trajectory traj;

    bool sample_at(long long j, long long total) const {
        return j % scheme.store_every == 0 || j == total || j == opt.start_step;
    }
    void check_guard(const SpectralField& field, double t) const {
        if (!field.finite())
            throw BlowupError(t, std::numeric_limits<double>::infinity());
        const double n2 = plain_norm_sq(field);
        if (n2 > guard_threshold_sq) throw BlowupError(t, std::sqrt(n2));
    }
};

RunFrame make_frame(const SchemeSpec& scheme, const IntegrateOptions& opt,
                    const PhysParams& p, double u0_norm) {
    scheme.validate();
    p.validate();
    RunFrame frame{scheme, opt, 0.0, {}};
    const double f_norm = p.forcing.empty() ? 0.0 : std::sqrt(l2_norm_sq(p.forcing));
    const double m0 = 2.0 * f_norm / p.gamma;
    const double thr = opt.blowup_factor * std::max({u0_norm, m0, 1e-30});
    frame.guard_threshold_sq = thr * thr;
    const long long total = scheme.total_steps();
    if (opt.start_step < 0 || opt.start_step > total)
        throw std::invalid_argument("start_step outside [0, total_steps]");
    return frame;
}

PhysParams with_grid_forcing(const PhysParams& p, int M) {
    PhysParams q = p;
    if (q.forcing.empty()) q.forcing = SpectralField(M);
    if (q.forcing.size() != M) throw std::invalid_argument("forcing grid mismatch");
    return q;
}

}  // namespace

void SchemeSpec::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(horizon >= dt)) throw std::invalid_argument("horizon must be >= dt");
    if (store_every < 1) throw std::invalid_argument("store_every must be >= 1");
}

long long SchemeSpec::total_steps() const {
    return static_cast<long long>(std::ceil(horizon / dt - 1e-12));
}

double default_dt(int M) {
    return std::min(1e-3, 0.1 * two_pi / (static_cast<double>(M) * M));
}

SpectralField Trajectory::primary_field(size_t i) const {
    const StateVariant& s = states.at(i);
    if (std::holds_alternative<SpectralField>(s)) return std::get<SpectralField>(s);
    if (std::holds_alternative<ModifiedState>(s)) return std::get<ModifiedState>(s).v;
    const DecompState& d = std::get<DecompState>(s);
    return d.v + d.w;
}

BlowupError::BlowupError(double t_, double norm_)
    : std::runtime_error("blow-up guard tripped at t = " + std::to_string(t_) +
                         " (norm " + std::to_string(norm_) +
                         "); the true dynamics is bounded, this signals a numerical fault"),
      t(t_),
      norm(norm_) {}

SpectralField linear_step(const SpectralField& u, double dt, const PhysParams& p,
                          bool with_forcing) {
    p.validate();
    if (with_forcing && !p.forcing.empty() && p.forcing.size() != u.size())
        throw std::invalid_argument("forcing grid mismatch");
    SpectralField out = u;
    const LinearOp op = make_linear(u.size(), dt, p);
    op.apply(out, with_forcing && !p.forcing.empty());
    return out;
}

SpectralField nonlinear_step(const SpectralField& u, double dt, int sign) {
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("nonlin_sign must be +1 or -1");
    SpectralField out = u;
    phase_map(out, dt, sign, 0.0);
    return out;
}

double AValueTable::eval(double time) const {
    if (t.empty() || t.size() != a.size())
        throw std::invalid_argument("a-table must have matching, nonempty t/a columns");
    if (time <= t.front()) return a.front();
    if (time >= t.back()) return a.back();
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    const size_t hi = static_cast<size_t>(it - t.begin());
    const size_t lo = hi - 1;
    const double frac = (time - t[lo]) / (t[hi] - t[lo]);
    return a[lo] + frac * (a[hi] - a[lo]);
}

Trajectory integrate_full(const SpectralField& u0, const PhysParams& p_in,
                          const SchemeSpec& scheme, const IntegrateOptions& opt) {
    const int M = u0.size();
    const PhysParams p = with_grid_forcing(p_in, M);
    RunFrame frame = make_frame(scheme, opt, p, std::sqrt(l2_norm_sq(u0)));
    const long long total = scheme.total_steps();
    const double dt = scheme.dt;

    const LinearOp half = make_linear(M, dt / 2, p);
    const LinearOp full = make_linear(M, dt, p);

    // per-mode exponential weights for the two-stage scheme
    std::vector<cplx> w1(static_cast<size_t>(M)), w2(static_cast<size_t>(M));
    if (scheme.method == Method::etd_rk2) {
        for (int k = -M / 2 + 1; k <= M / 2 - 1; ++k) {
            const cplx z = lambda_of(k, p.gamma) * dt;
            w1[static_cast<size_t>(k + M / 2)] = dt * phi1(z);
            w2[static_cast<size_t>(k + M / 2)] = dt * phi2(z);
        }
    }
    if (scheme.method == Method::rk4_reference) {
        const double kmax = M / 2.0 - 1.0;
        if (dt * (kmax * kmax + p.gamma) > 2.7)
            throw std::invalid_argument("rk4_reference unstable for this dt and M");
    }

    SpectralField u = u0;
    const cplx nl_scale = -kI * static_cast<double>(p.nonlin_sign);

    for (long long j = opt.start_step;; ++j) {
        const double t = static_cast<double>(j) * dt;
        if (frame.sample_at(j, total)) {
            frame.traj.times.push_back(t);
            frame.traj.states.emplace_back(u);
            frame.traj.diagnostics.push_back(make_record(t, u, opt.diag));
        }
        if (j == total) break;

        switch (scheme.method) {
            case Method::strang_split: {
                half.apply(u, true);
                if (p.cubic_enabled) phase_map(u, dt, p.nonlin_sign, 0.0);
                half.apply(u, true);
                break;
            }
            case Method::etd_rk2: {
                SpectralField n0(M);
                if (p.cubic_enabled) n0 = nl_scale * cubic_self(u, opt.pad);
                SpectralField a = u;
                full.apply(a, true);
                for (int k = -M / 2 + 1; k <= M / 2 - 1; ++k)
                    a.at(k) += w1[static_cast<size_t>(k + M / 2)] * n0.at(k);
                if (p.cubic_enabled) {
                    const SpectralField n1 = nl_scale * cubic_self(a, opt.pad);
                    for (int k = -M / 2 + 1; k <= M / 2 - 1; ++k)
                        a.at(k) += w2[static_cast<size_t>(k + M / 2)] *
                                   (n1.at(k) - n0.at(k));
                }
                u = std::move(a);
                break;
            }
            case Method::rk4_reference: {
                const SpectralField k1 = rhs_full(u, p, opt.pad);
                const SpectralField k2 = rhs_full(u + (dt / 2) * k1, p, opt.pad);
                const SpectralField k3 = rhs_full(u + (dt / 2) * k2, p, opt.pad);
                const SpectralField k4 = rhs_full(u + dt * k3, p, opt.pad);
                u += (dt / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                break;
            }
        }
        frame.check_guard(u, t + dt);
    }
    return std::move(frame.traj);
}

Trajectory integrate_modified(const ModifiedState& s0, const PhysParams& p_in,
                              const SchemeSpec& scheme, const IntegrateOptions& opt) {
    if (scheme.method != Method::strang_split)
        throw std::invalid_argument("modified runs support strang_split only");
    if (s0.a < 0.0) throw std::invalid_argument("carried scalar a must be >= 0");
    const int M = s0.v.size();
    const PhysParams p = with_grid_forcing(p_in, M);
    RunFrame frame = make_frame(scheme, opt, p, std::sqrt(l2_norm_sq(s0.v)));
    const long long total = scheme.total_steps();
    const double dt = scheme.dt;

    const LinearOp half = make_linear(M, dt / 2, p);
    const double e_half = std::exp(-p.gamma * dt);  // e^{-2 gamma (dt/2)}

    SpectralField v = s0.v;
    double a = s0.a;

    for (long long j = opt.start_step;; ++j) {
        const double t = static_cast<double>(j) * dt;
        if (frame.sample_at(j, total)) {
            frame.traj.times.push_back(t);
            frame.traj.states.emplace_back(ModifiedState{v, a});
            frame.traj.diagnostics.push_back(make_record(t, v, opt.diag));
        }
        if (j == total) break;

        half.apply(v, true);
        if (opt.a_table != nullptr) {
            const double a_mid = opt.a_table->eval(t + dt / 2);
            const double extra = (a_mid - l2_norm_sq(v)) * dt / M_PI;
            if (p.cubic_enabled)
                phase_map(v, dt, p.nonlin_sign, extra);
            else
                v *= std::exp(-kI * extra);
            a = opt.a_table->eval(t + dt);
        } else {
            // half-advance a, apply the frozen phase, half-advance again with
            // the pairing taken at the midpoint state
            const double p0 = 2.0 * pairing(p.forcing, v).real();
            a = e_half * a + (1.0 - e_half) / (2.0 * p.gamma) * p0;
            const double extra = (a - l2_norm_sq(v)) * dt / M_PI;
            if (p.cubic_enabled)
                phase_map(v, dt, p.nonlin_sign, extra);
            else
                v *= std::exp(-kI * extra);
            const double p1 = 2.0 * pairing(p.forcing, v).real();
            a = e_half * a + (1.0 - e_half) / (2.0 * p.gamma) * p1;
        }
        half.apply(v, true);
        frame.check_guard(v, t + dt);
    }
    return std::move(frame.traj);
}

Trajectory integrate_decomposition(const DecompState& s0, const PhysParams& p_in,
                                   const SchemeSpec& scheme, const IntegrateOptions& opt) {
    if (scheme.method != Method::strang_split)
        throw std::invalid_argument("decomposition runs support strang_split only");
    const int M = s0.v.size();
    const int N = s0.cutoff;
    if (s0.w.size() != M) throw std::invalid_argument("grid mismatch");
    if (N < 0 || N >= M / 2)
        throw std::invalid_argument("cutoff exceeds resolved band (need N < M/2)");
    const PhysParams p = with_grid_forcing(p_in, M);
    RunFrame frame = make_frame(scheme, opt, p, std::sqrt(l2_norm_sq(s0.v + s0.w)));
    const long long total = scheme.total_steps();
    const double dt = scheme.dt;

    const LinearOp half = make_linear(M, dt / 2, p);
    const cplx nl_scale = -kI * static_cast<double>(p.nonlin_sign);

    SpectralField v = s0.v;
    SpectralField w = s0.w;
    SpectralField z = project(v, N, Band::high) - project(steady_state_g(p.forcing, p.gamma), N, Band::high);

    for (long long j = opt.start_step;; ++j) {
        const double t = static_cast<double>(j) * dt;
        if (frame.sample_at(j, total)) {
            frame.traj.times.push_back(t);
            frame.traj.states.emplace_back(DecompState{v, w, N});
            frame.traj.aux_z.push_back(z);
            frame.traj.diagnostics.push_back(make_record(t, v + w, opt.diag));
        }
        if (j == total) break;

        half.apply(v, true);
        half.apply(w, false);
        half.apply(z, false);

        if (p.cubic_enabled) {
            const SpectralField u0 = v + w;
            SpectralField u_half = u0;
            phase_map(u_half, dt / 2, p.nonlin_sign, 0.0);
            SpectralField u_full = u0;
            phase_map(u_full, dt, p.nonlin_sign, 0.0);

            // stage 1: high-band kick at the entry state
            const SpectralField s0k = nl_scale * project(cubic_self(u0, opt.pad) -
                                                             cubic_self(v, opt.pad),
                                                         N, Band::high);
            const SpectralField w_half = w + (dt / 2) * s0k;
            const SpectralField v_half = u_half - w_half;

            // stage 2: midpoint kick; the |v|^2 v part also drives z
            const SpectralField qv_half = project(cubic_self(v_half, opt.pad), N, Band::high);
            const SpectralField s1k = nl_scale * (project(cubic_self(u_half, opt.pad), N, Band::high) - qv_half);
            w += dt * s1k;
            v = u_full - w;
            z += (dt * nl_scale) * qv_half;
        }

        half.apply(v, true);
        half.apply(w, false);
        half.apply(z, false);
        frame.check_guard(v + w, t + dt);
    }
    return std::move(frame.traj);
}

Trajectory integrate_z_const_v(const SpectralField& z0, const SpectralField& v, int N,
                               const PhysParams& p_in, const SchemeSpec& scheme,
                               const IntegrateOptions& opt) {
    if (scheme.method != Method::strang_split)
        throw std::invalid_argument("z runs support strang_split only");
    const int M = z0.size();
    const PhysParams p = with_grid_forcing(p_in, M);
    for (int k = -N; k <= N; ++k)
        if (z0.at(k) != cplx{0.0, 0.0})
            throw std::invalid_argument("z must have no content at |k| <= N");
    RunFrame frame = make_frame(scheme, opt, p, std::sqrt(l2_norm_sq(z0)));
    const long long total = scheme.total_steps();
    const double dt = scheme.dt;

    const LinearOp half = make_linear(M, dt / 2, p);
    SpectralField source(M);
    if (p.cubic_enabled)
        source = (-kI * static_cast<double>(p.nonlin_sign)) *
                 project(cubic_self(v, opt.pad), N, Band::high);

    SpectralField z = z0;
    for (long long j = opt.start_step;; ++j) {
        const double t = static_cast<double>(j) * dt;
        if (frame.sample_at(j, total)) {
            frame.traj.times.push_back(t);
            frame.traj.states.emplace_back(z);
            frame.traj.diagnostics.push_back(make_record(t, z, opt.diag));
        }
        if (j == total) break;

        half.apply(z, false);
        z += dt * source;
        half.apply(z, false);
        frame.check_guard(z, t + dt);
    }
    return std::move(frame.traj);
}

}  // namespace dnls
