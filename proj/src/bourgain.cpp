#include "dnls/bourgain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dnls/util.hpp"

namespace dnls {

namespace {

// time-DFT per spatial column with 1/L scaling; hat[j_idx * M + k_idx],
// j centered: tau_j = (2 pi / T) j, j in [-L/2, L/2)
std::vector<cplx> time_hat(const SpaceTimeField& F) {
    const int L = F.L, M = F.M;
    std::vector<cplx> hat(static_cast<size_t>(L) * M);
    std::vector<cplx> col(static_cast<size_t>(L)), out(static_cast<size_t>(L));
    for (int i = 0; i < M; ++i) {
        for (int m = 0; m < L; ++m) col[static_cast<size_t>(m)] = F.vals[static_cast<size_t>(m) * M + i];
        detail::dft(L, col.data(), out.data(), -1);
        for (int b = 0; b < L; ++b) {
            const int j = (b < L / 2) ? b : b - L;          // centered bin
            const int row = j + L / 2;
            hat[static_cast<size_t>(row) * M + i] = out[static_cast<size_t>(b)] / static_cast<double>(L);
        }
    }
    return hat;
}

double weighted_hat_norm(const std::vector<cplx>& hat, int L, int M, double T,
                         double b, double s) {
    CompensatedSum acc;
    for (int row = 0; row < L; ++row) {
        const double tau = two_pi * (row - L / 2) / T;
        for (int i = 0; i < M; ++i) {
            const double k = i - M / 2;
            const double sigma = tau + k * k;
            const double wb = std::pow(1.0 + sigma * sigma, b);    // <sigma>^{2b}
            const double ws = std::pow(1.0 + k * k, s);            // <k>^{2s}
            acc.add(wb * ws * std::norm(hat[static_cast<size_t>(row) * M + i]));
        }
    }
    return std::sqrt(two_pi * T * acc.value());
}

}  // namespace

SpaceTimeField::SpaceTimeField(int L_, int M_, double T_) : L(L_), M(M_), T(T_) {
    if (L <= 0 || L % 2 != 0 || M <= 0 || M % 2 != 0 || !(T > 0.0))
        throw std::invalid_argument("space-time lattice needs even L, even M, T > 0");
    vals.assign(static_cast<size_t>(L) * M, cplx{0.0, 0.0});
}

double resonance_factor(long long k1, long long k2, long long k3,
                        const std::array<double, 4>& tau) {
    const long long k = k1 + k2 + k3;
    const double sigma = tau[0] + static_cast<double>(k * k);
    const double sigma1 = tau[1] + static_cast<double>(k1 * k1);
    const double sigma2 = tau[2] + static_cast<double>(k2 * k2);
    const double sigma3t = tau[3] - static_cast<double>(k3 * k3);
    return sigma - sigma1 - sigma2 - sigma3t;
}

long long modulus_bound(long long k1, long long k2, long long k3) {
    return 2 * (k3 + k1) * (k3 + k2);
}

double xbs_norm(const SpaceTimeField& F, double b, double s) {
    return weighted_hat_norm(time_hat(F), F.L, F.M, F.T, b, s);
}

double l4_norm(const SpaceTimeField& F, int pad) {
    const int P = pad * F.M;
    std::vector<cplx> bins(static_cast<size_t>(P)), phys(static_cast<size_t>(P));
    CompensatedSum acc;
    for (int m = 0; m < F.L; ++m) {
        std::fill(bins.begin(), bins.end(), cplx{0.0, 0.0});
        for (int k = -F.M / 2 + 1; k <= F.M / 2 - 1; ++k)
            bins[static_cast<size_t>(k >= 0 ? k : k + P)] = F.at(m, k);
        detail::dft(P, bins.data(), phys.data(), +1);
        for (const cplx& z : phys) {
            const double a2 = std::norm(z);
            acc.add(a2 * a2);
        }
    }
    return std::pow(acc.value() * (two_pi / P) * (F.T / F.L), 0.25);
}

double l4_ratio(const SpaceTimeField& F) {
    const double denom = xbs_norm(F, 3.0 / 8.0, 0.0);
    if (denom == 0.0) throw std::invalid_argument("l4_ratio: zero field");
    return l4_norm(F) / denom;
}

void apply_cosine_taper(SpaceTimeField& F, double width_fraction) {
    if (!(width_fraction >= 0.0) || width_fraction > 0.5)
        throw std::invalid_argument("taper width fraction must lie in [0, 0.5]");
    for (int m = 0; m < F.L; ++m) {
        const double theta = static_cast<double>(m) / F.L;
        double w = 1.0;
        if (theta < width_fraction)
            w = 0.5 * (1.0 - std::cos(M_PI * theta / width_fraction));
        else if (theta > 1.0 - width_fraction)
            w = 0.5 * (1.0 - std::cos(M_PI * (1.0 - theta) / width_fraction));
        for (int i = 0; i < F.M; ++i) F.vals[static_cast<size_t>(m) * F.M + i] *= w;
    }
}

SpaceTimeField free_evolution(const SpectralField& phi, int L, double T) {
    SpaceTimeField F(L, phi.size(), T);
    for (int m = 0; m < L; ++m) {
        const double t = F.time(m);
        for (int k = phi.min_wavenumber() + 1; k <= phi.max_wavenumber(); ++k) {
            const double angle = -static_cast<double>(k) * k * t;
            F.at(m, k) = phi.at(k) * cplx{std::cos(angle), std::sin(angle)};
        }
    }
    return F;
}

SpaceTimeField st_project(const SpaceTimeField& F, int N, Band part) {
    if (N < 0 || N >= F.M / 2)
        throw std::invalid_argument("cutoff exceeds resolved band (need N < M/2)");
    SpaceTimeField out(F.L, F.M, F.T);
    for (int m = 0; m < F.L; ++m)
        for (int k = -F.M / 2; k <= F.M / 2 - 1; ++k) {
            const bool low = std::abs(k) <= N;
            if ((part == Band::low) == low) out.at(m, k) = F.at(m, k);
        }
    return out;
}

SpaceTimeField st_triple_product(const SpaceTimeField& A, const SpaceTimeField& B,
                                 const SpaceTimeField& C) {
    const int L = A.L, M = A.M;
    const double T = A.T;
    if (B.L != L || C.L != L || B.M != M || C.M != M)
        throw std::invalid_argument("lattice mismatch");
    const int L2 = 2 * L, M2 = 2 * M;

    // upsample one factor to the doubled lattice: pad tau bins, then per
    // upsampled time sample synthesize on the doubled spatial grid
    auto upsample_phys = [&](const SpaceTimeField& F, bool conj) {
        std::vector<cplx> hat = time_hat(F);
        std::vector<cplx> tcol(static_cast<size_t>(L2)), tout(static_cast<size_t>(L2));
        std::vector<cplx> spec(static_cast<size_t>(L2) * M);
        for (int i = 0; i < M; ++i) {
            std::fill(tcol.begin(), tcol.end(), cplx{0.0, 0.0});
            for (int row = 0; row < L; ++row) {
                const int j = row - L / 2;
                tcol[static_cast<size_t>(j >= 0 ? j : j + L2)] =
                    hat[static_cast<size_t>(row) * M + i];
            }
            detail::dft(L2, tcol.data(), tout.data(), +1);
            for (int m = 0; m < L2; ++m)
                spec[static_cast<size_t>(m) * M + i] = tout[static_cast<size_t>(m)];
        }
        std::vector<cplx> phys(static_cast<size_t>(L2) * M2);
        std::vector<cplx> bins(static_cast<size_t>(M2)), out(static_cast<size_t>(M2));
        for (int m = 0; m < L2; ++m) {
            std::fill(bins.begin(), bins.end(), cplx{0.0, 0.0});
            for (int k = -M / 2 + 1; k <= M / 2 - 1; ++k)
                bins[static_cast<size_t>(k >= 0 ? k : k + M2)] =
                    spec[static_cast<size_t>(m) * M + (k + M / 2)];
            detail::dft(M2, bins.data(), out.data(), +1);
            for (int x = 0; x < M2; ++x) {
                const cplx v = out[static_cast<size_t>(x)];
                phys[static_cast<size_t>(m) * M2 + x] = conj ? std::conj(v) : v;
            }
        }
        return phys;
    };

    const std::vector<cplx> pa = upsample_phys(A, false);
    const std::vector<cplx> pb = upsample_phys(B, false);
    const std::vector<cplx> pc = upsample_phys(C, true);

    std::vector<cplx> prod(static_cast<size_t>(L2) * M2);
    for (size_t i = 0; i < prod.size(); ++i) prod[i] = pa[i] * pb[i] * pc[i];

    // restrict: spatial forward per sample, keep the original M bins
    std::vector<cplx> spec(static_cast<size_t>(L2) * M);
    {
        std::vector<cplx> out(static_cast<size_t>(M2));
        for (int m = 0; m < L2; ++m) {
            detail::dft(M2, prod.data() + static_cast<size_t>(m) * M2, out.data(), -1);
            for (int k = -M / 2 + 1; k <= M / 2 - 1; ++k) {
                const int bin = (k >= 0) ? k : k + M2;
                spec[static_cast<size_t>(m) * M + (k + M / 2)] =
                    out[static_cast<size_t>(bin)] / static_cast<double>(M2);
            }
        }
    }

    // restrict in time: forward over the 2L samples, keep the original L bins
    SpaceTimeField R(L, M, T);
    {
        std::vector<cplx> tcol(static_cast<size_t>(L2)), tout(static_cast<size_t>(L2));
        std::vector<cplx> synth_in(static_cast<size_t>(L)), synth_out(static_cast<size_t>(L));
        for (int i = 0; i < M; ++i) {
            for (int m = 0; m < L2; ++m)
                tcol[static_cast<size_t>(m)] = spec[static_cast<size_t>(m) * M + i];
            detail::dft(L2, tcol.data(), tout.data(), -1);
            // back to L time samples via the retained centered bins
            std::fill(synth_in.begin(), synth_in.end(), cplx{0.0, 0.0});
            for (int j = -L / 2; j <= L / 2 - 1; ++j) {
                const int src = (j >= 0) ? j : j + L2;
                const int dst = (j >= 0) ? j : j + L;
                synth_in[static_cast<size_t>(dst)] =
                    tout[static_cast<size_t>(src)] / static_cast<double>(L2);
            }
            detail::dft(L, synth_in.data(), synth_out.data(), +1);
            for (int m = 0; m < L; ++m)
                R.vals[static_cast<size_t>(m) * M + i] = synth_out[static_cast<size_t>(m)];
        }
    }
    return R;
}

SpaceTimeField random_unit_xhalf(int L, int M, double T, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<cplx> hat(static_cast<size_t>(L) * M);
    for (int row = 0; row < L; ++row) {
        const double tau = two_pi * (row - L / 2) / T;
        for (int i = 0; i < M; ++i) {
            const int k = i - M / 2;
            if (k == -M / 2) continue;  // spatial Nyquist pinned
            const double sigma = tau + static_cast<double>(k) * k;
            const double w = std::pow(1.0 + sigma * sigma, -0.25);  // <sigma>^{-1/2}
            hat[static_cast<size_t>(row) * M + i] = w * rng.cgauss();
        }
    }
    SpaceTimeField F(L, M, T);
    std::vector<cplx> tcol(static_cast<size_t>(L)), tout(static_cast<size_t>(L));
    for (int i = 0; i < M; ++i) {
        std::fill(tcol.begin(), tcol.end(), cplx{0.0, 0.0});
        for (int row = 0; row < L; ++row) {
            const int j = row - L / 2;
            tcol[static_cast<size_t>(j >= 0 ? j : j + L)] = hat[static_cast<size_t>(row) * M + i];
        }
        detail::dft(L, tcol.data(), tout.data(), +1);
        for (int m = 0; m < L; ++m)
            F.vals[static_cast<size_t>(m) * M + i] = tout[static_cast<size_t>(m)];
    }
    const double n = xbs_norm(F, 0.5, 0.0);
    for (cplx& z : F.vals) z /= n;
    return F;
}

DampingReport damping_scaling(std::span<const int> N_list, int trials,
                              std::uint64_t seed, int M, int L, double T, double eps) {
    if (N_list.size() < 3)
        throw std::invalid_argument("damping scaling needs at least 3 cutoffs to fit");
    for (int N : N_list)
        if (N <= 0 || N >= M / 2)
            throw std::invalid_argument("cutoff exceeds resolved band (need N < M/2)");
    if (trials < 1) throw std::invalid_argument("need at least one trial");

    DampingReport rep;
    rep.eps = eps;
    rep.trials = trials;

    std::vector<std::vector<double>> ratios(N_list.size());
    for (int t = 0; t < trials; ++t) {
        const SpaceTimeField u1 = random_unit_xhalf(L, M, T, derive_seed(seed, 3 * t));
        const SpaceTimeField u2 = random_unit_xhalf(L, M, T, derive_seed(seed, 3 * t + 1));
        const SpaceTimeField u3 = random_unit_xhalf(L, M, T, derive_seed(seed, 3 * t + 2));
        for (size_t n = 0; n < N_list.size(); ++n) {
            const int N = N_list[n];
            const SpaceTimeField a = st_project(u1, N / 2, Band::low);
            const SpaceTimeField b = st_project(u2, N / 2, Band::low);
            const SpaceTimeField c = st_project(u3, N, Band::high);
            const SpaceTimeField G = st_triple_product(a, b, c);
            ratios[n].push_back(xbs_norm(G, -0.5 + eps, 0.0));
        }
    }

    CompensatedSum sx, sy, sxx, sxy;
    for (size_t n = 0; n < N_list.size(); ++n) {
        std::vector<double>& r = ratios[n];
        std::sort(r.begin(), r.end());
        DampingPoint pt;
        pt.N = N_list[n];
        pt.median_ratio = (r.size() % 2 == 1)
                              ? r[r.size() / 2]
                              : 0.5 * (r[r.size() / 2 - 1] + r[r.size() / 2]);
        pt.max_ratio = r.back();
        rep.points.push_back(pt);
        const double x = std::log(static_cast<double>(pt.N));
        const double y = std::log(pt.median_ratio);
        sx.add(x);
        sy.add(y);
        sxx.add(x * x);
        sxy.add(x * y);
    }
    const double n = static_cast<double>(N_list.size());
    rep.slope = (n * sxy.value() - sx.value() * sy.value()) /
                (n * sxx.value() - sx.value() * sx.value());
    return rep;
}

}  // namespace dnls
