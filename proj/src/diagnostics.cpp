#include "dnls/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace dnls {

ResidualReport energy_residual(const Trajectory& traj, const PhysParams& p) {
    const size_t n = traj.samples();
    if (n < 2) throw std::invalid_argument("energy residual needs at least 2 samples");

    std::vector<double> norm_sq(n), work(n);
    for (size_t i = 0; i < n; ++i) {
        const SpectralField u = traj.primary_field(i);
        norm_sq[i] = l2_norm_sq(u);
        work[i] = p.forcing.empty() ? 0.0 : 2.0 * pairing(p.forcing, u).real();
    }

    // Integrated form of the balance: the damping factor is folded exactly,
    // the forcing pairing gets trapezoid quadrature. Exact dissipation and
    // steady segments then sit at roundoff instead of at the h^3 quadrature
    // error of the differential form.
    ResidualReport rep;
    rep.per_interval.resize(n - 1);
    CompensatedSum mean_acc;
    double total_time = 0.0;
    for (size_t i = 0; i + 1 < n; ++i) {
        const double h = traj.times[i + 1] - traj.times[i];
        const double decay = std::exp(-2.0 * p.gamma * h);
        const double weight = (1.0 - decay) / (2.0 * p.gamma);
        const double input = 0.5 * (work[i] + work[i + 1]) * weight;
        const double res = norm_sq[i + 1] - decay * norm_sq[i] - input;
        rep.per_interval[i] = res;
        rep.max_per_unit_time = std::max(rep.max_per_unit_time, std::abs(res) / h);
        mean_acc.add(std::abs(res));
        total_time += h;
    }
    rep.mean_per_unit_time = mean_acc.value() / total_time;
    return rep;
}

void fill_energy_residuals(Trajectory& traj, const PhysParams& p) {
    const ResidualReport rep = energy_residual(traj, p);
    for (size_t i = 0; i + 1 < traj.samples(); ++i)
        traj.diagnostics[i + 1].energy_residual = rep.per_interval[i];
}

AbsorbingReport absorbing_check(const Trajectory& traj, const SpectralField& u0,
                                const PhysParams& p) {
    AbsorbingReport rep;
    const double f_sq = p.forcing.empty() ? 0.0 : l2_norm_sq(p.forcing);
    rep.M0 = 2.0 * std::sqrt(f_sq) / p.gamma;
    const double u0_sq = l2_norm_sq(u0);
    const double tol = 1e-6 * (1.0 + u0_sq);

    bool entered = false;
    rep.persistent = true;
    for (size_t i = 0; i < traj.samples(); ++i) {
        const double t = traj.times[i];
        const double n_sq = traj.diagnostics[i].l2_sq;
        const double envelope =
            std::exp(-p.gamma * t) * u0_sq +
            (1.0 - std::exp(-p.gamma * t)) / (p.gamma * p.gamma) * f_sq;
        if (n_sq > envelope + tol) {
            ++rep.violations;
            rep.max_excess = std::max(rep.max_excess, n_sq - envelope);
        }
        const double n = std::sqrt(n_sq);
        if (!entered && n <= rep.M0) {
            entered = true;
            rep.entry_time = t;
        } else if (entered && n > rep.M0 * (1.0 + 1e-6)) {
            rep.persistent = false;
        }
    }
    if (!entered) rep.persistent = false;
    return rep;
}

EquicontinuityReport equicontinuity_modulus(const Trajectory& traj, const PhysParams& p) {
    EquicontinuityReport rep;
    const size_t n = traj.samples();
    double sup_sq = 0.0;
    for (size_t i = 0; i < n; ++i) sup_sq = std::max(sup_sq, traj.diagnostics[i].l2_sq);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            const double dt = traj.times[j] - traj.times[i];
            if (dt <= 0.0) continue;
            const double q =
                std::abs(traj.diagnostics[j].l2_sq - traj.diagnostics[i].l2_sq) / dt;
            rep.modulus = std::max(rep.modulus, q);
        }
    const double f_sq = p.forcing.empty() ? 0.0 : l2_norm_sq(p.forcing);
    rep.bracket = 3.0 * p.gamma * sup_sq + f_sq / p.gamma;
    return rep;
}

std::vector<std::pair<int, double>> tail_profile(const SpectralField& field,
                                                 std::span<const int> cutoffs) {
    std::vector<std::pair<int, double>> out;
    for (int N : cutoffs) {
        if (N < 0 || N >= field.size() / 2)
            throw std::invalid_argument("cutoff exceeds resolved band (need N < M/2)");
        CompensatedSum acc;
        for (int k = field.min_wavenumber(); k <= field.max_wavenumber(); ++k)
            if (std::abs(k) > N) acc.add(std::norm(field.at(k)));
        out.emplace_back(N, std::sqrt(two_pi * acc.value()));
    }
    return out;
}

cplx weak_pairing(const SpectralField& u, const SpectralField& probe) {
    return pairing(u, probe);
}

DecayFit decay_fit(std::span<const double> times, std::span<const double> values) {
    if (times.size() != values.size())
        throw std::invalid_argument("decay_fit: size mismatch");
    constexpr double floor = 1e-12;

    // least squares on (t, log v) with censoring below the resolution floor
    CompensatedSum st, sy, stt, sty;
    int used = 0;
    for (size_t i = 0; i < times.size(); ++i) {
        if (!(values[i] > floor)) continue;
        const double y = std::log(values[i]);
        st.add(times[i]);
        sy.add(y);
        stt.add(times[i] * times[i]);
        sty.add(times[i] * y);
        ++used;
    }
    if (used < 2) throw std::invalid_argument("decay_fit: series entirely at the floor");
    const double n = used;
    const double denom = n * stt.value() - st.value() * st.value();
    if (denom == 0.0) throw std::invalid_argument("decay_fit: degenerate time column");
    DecayFit fit;
    fit.rate = (n * sty.value() - st.value() * sy.value()) / denom;
    fit.log_prefactor = (sy.value() - fit.rate * st.value()) / n;
    fit.points_used = used;
    return fit;
}

}  // namespace dnls
