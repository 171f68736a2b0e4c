#include "dnls/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace dnls {

void GridSpec::validate() const {
    if (M <= 0 || M % 2 != 0)
        throw std::invalid_argument("grid size M must be a positive even integer");
    if (N < 0 || N >= M / 2)
        throw std::invalid_argument("cutoff exceeds resolved band (need N < M/2)");
    if (pad < 2)
        throw std::invalid_argument("dealias pad factor must be >= 2");
    if (static_cast<long long>(pad) * M > (1 << 24))
        throw std::invalid_argument("pad*M too large");
}

SpectralField SpectralField::from_mode(int M, int k, cplx amp) {
    SpectralField f(M);
    if (k < f.min_wavenumber() || k > f.max_wavenumber())
        throw std::invalid_argument("mode outside resolved band");
    f.at(k) = amp;
    return f;
}

bool SpectralField::finite() const {
    for (const cplx& z : c_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    if (o.M_ != M_) throw std::invalid_argument("grid mismatch");
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    if (o.M_ != M_) throw std::invalid_argument("grid mismatch");
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(cplx s) {
    for (cplx& z : c_) z *= s;
    return *this;
}

namespace detail {

// FFTW plan cache. Plans are created once per (n, sign) with the UNALIGNED
// flag so the new-array execute interface stays valid for arbitrary buffers;
// execution itself is thread-safe.
void dft(int n, const cplx* in, cplx* out, int sign) {
    static std::mutex mtx;
    static std::map<std::pair<int, int>, fftw_plan> plans;

    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto key = std::make_pair(n, sign);
        auto it = plans.find(key);
        if (it == plans.end()) {
            std::vector<cplx> scratch(static_cast<size_t>(n));
            auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
            plan = fftw_plan_dft_1d(n, p, p, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
            plans.emplace(key, plan);
        } else {
            plan = it->second;
        }
    }
    fftw_execute_dft(plan,
                     reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace detail

SpectralField transform_forward(std::span<const cplx> samples) {
    const int M = static_cast<int>(samples.size());
    if (M <= 0 || M % 2 != 0)
        throw std::invalid_argument("transform_forward: need an even number of samples");
    for (const cplx& z : samples)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw std::invalid_argument("transform_forward: non-finite sample");

    std::vector<cplx> hat(static_cast<size_t>(M));
    detail::dft(M, samples.data(), hat.data(), -1);

    SpectralField f(M);
    const double inv = 1.0 / M;
    // FFTW bin m holds wavenumber m for m < M/2 and m - M for m >= M/2.
    for (int m = 0; m < M; ++m) {
        const int k = (m < M / 2) ? m : m - M;
        if (k == -M / 2) continue;  // Nyquist pinned to zero
        f.at(k) = hat[static_cast<size_t>(m)] * inv;
    }
    return f;
}

std::vector<cplx> transform_inverse(const SpectralField& f) {
    return synthesize(f, f.size());
}

std::vector<cplx> synthesize(const SpectralField& f, int n) {
    const int M = f.size();
    if (M == 0) throw std::invalid_argument("synthesize: empty field");
    // n = M-1 still resolves the Nyquist-free mode set exactly
    if (n < M - 1) throw std::invalid_argument("synthesize: target grid coarser than field");
    std::vector<cplx> hat(static_cast<size_t>(n), cplx{0.0, 0.0});
    for (int k = f.min_wavenumber() + 1; k <= f.max_wavenumber(); ++k) {
        const int m = (k >= 0) ? k : k + n;
        hat[static_cast<size_t>(m)] = f.at(k);
    }
    std::vector<cplx> out(static_cast<size_t>(n));
    detail::dft(n, hat.data(), out.data(), +1);
    return out;
}

SpectralField project(const SpectralField& f, int N, Band part) {
    const int M = f.size();
    if (N < 0 || N >= M / 2)
        throw std::invalid_argument("cutoff exceeds resolved band (need N < M/2)");
    SpectralField out(M);
    for (int k = f.min_wavenumber(); k <= f.max_wavenumber(); ++k) {
        const bool low = std::abs(k) <= N;
        if ((part == Band::low) == low) out.at(k) = f.at(k);
    }
    return out;
}

double sobolev_norm(const SpectralField& f, double s) {
    CompensatedSum acc;
    for (int k = f.min_wavenumber(); k <= f.max_wavenumber(); ++k) {
        const double kk = 1.0 + static_cast<double>(k) * k;
        acc.add(std::pow(kk, s) * std::norm(f.at(k)));
    }
    return std::sqrt(two_pi * acc.value());
}

double l2_norm_sq(const SpectralField& f) {
    CompensatedSum acc;
    for (const cplx& z : f.coeffs()) acc.add(std::norm(z));
    return two_pi * acc.value();
}

cplx pairing(const SpectralField& u, const SpectralField& phi) {
    if (u.size() != phi.size()) throw std::invalid_argument("grid mismatch");
    CompensatedSum re, im;
    for (int k = u.min_wavenumber(); k <= u.max_wavenumber(); ++k) {
        const cplx t = u.at(k) * std::conj(phi.at(k));
        re.add(t.real());
        im.add(t.imag());
    }
    return two_pi * cplx{re.value(), im.value()};
}

SpectralField cubic_product(const SpectralField& a, const SpectralField& b,
                            const SpectralField& c, ConjMask mask, int pad) {
    const int M = a.size();
    if (b.size() != M || c.size() != M) throw std::invalid_argument("grid mismatch");
    if (pad < 2) throw std::invalid_argument("cubic products need pad >= 2");
    const int P = pad * M;

    std::vector<cplx> pa = synthesize(a, P);
    std::vector<cplx> pb = synthesize(b, P);
    std::vector<cplx> pc = synthesize(c, P);
    std::vector<cplx> prod(static_cast<size_t>(P));
    for (int j = 0; j < P; ++j) {
        const size_t i = static_cast<size_t>(j);
        const cplx fa = mask.a ? std::conj(pa[i]) : pa[i];
        const cplx fb = mask.b ? std::conj(pb[i]) : pb[i];
        const cplx fc = mask.c ? std::conj(pc[i]) : pc[i];
        prod[i] = fa * fb * fc;
    }
    std::vector<cplx> hat(static_cast<size_t>(P));
    detail::dft(P, prod.data(), hat.data(), -1);

    SpectralField out(M);
    const double inv = 1.0 / P;
    for (int k = -M / 2 + 1; k <= M / 2 - 1; ++k) {
        const int m = (k >= 0) ? k : k + P;
        out.at(k) = hat[static_cast<size_t>(m)] * inv;
    }
    return out;
}

SpectralField cubic_self(const SpectralField& u, int pad) {
    const int M = u.size();
    if (pad < 2) throw std::invalid_argument("cubic products need pad >= 2");
    const int P = pad * M;

    std::vector<cplx> vals = synthesize(u, P);
    for (cplx& z : vals) z *= std::norm(z);
    std::vector<cplx> hat(static_cast<size_t>(P));
    detail::dft(P, vals.data(), hat.data(), -1);

    SpectralField out(M);
    const double inv = 1.0 / P;
    for (int k = -M / 2 + 1; k <= M / 2 - 1; ++k) {
        const int m = (k >= 0) ? k : k + P;
        out.at(k) = hat[static_cast<size_t>(m)] * inv;
    }
    return out;
}

}  // namespace dnls
