#include "polbell/fock_oracle.hpp"

#include "polbell/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace polbell {

namespace {

using cd = std::complex<double>;
using cld = std::complex<long double>;

std::size_t flat_index(const std::array<int, 4>& dims, int n0, int n1, int n2,
                       int n3) {
    return ((static_cast<std::size_t>(n0) * dims[1] + n1) * dims[2] + n2) *
               dims[3] +
           n3;
}

std::size_t total_size(const std::array<int, 4>& dims) {
    return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2] * dims[3];
}

// Sector matrices of the two-mode passive transform: t[s] is the
// (s+1)x(s+1) unitary acting on the s-photon sector, t[s](ma, na) =
// <ma, s-ma| U |na, s-na>.  Creation operators map as
// a† -> u00 a† + u10 b†,  b† -> u01 a† + u11 b†; expand binomially.
std::vector<std::vector<cd>> sector_matrices(const Mat2c& u, int s_max) {
    std::vector<long double> sqrt_fact(s_max + 1);
    sqrt_fact[0] = 1.0L;
    for (int n = 1; n <= s_max; ++n)
        sqrt_fact[n] = sqrt_fact[n - 1] * std::sqrt(static_cast<long double>(n));

    std::vector<std::vector<long double>> binom(s_max + 1);
    for (int n = 0; n <= s_max; ++n) {
        binom[n].assign(n + 1, 1.0L);
        for (int k = 1; k < n; ++k)
            binom[n][k] = binom[n - 1][k - 1] + binom[n - 1][k];
    }

    std::array<std::vector<cld>, 4> upow;
    const cld uelem[4] = {u(0, 0), u(1, 0), u(0, 1), u(1, 1)};
    for (int e = 0; e < 4; ++e) {
        upow[e].assign(s_max + 1, 1.0L);
        for (int n = 1; n <= s_max; ++n)
            upow[e][n] = upow[e][n - 1] * uelem[e];
    }

    std::vector<std::vector<cd>> t(s_max + 1);
    for (int s = 0; s <= s_max; ++s) {
        t[s].assign(static_cast<std::size_t>(s + 1) * (s + 1), cd(0.0, 0.0));
        for (int na = 0; na <= s; ++na) {
            const int nb = s - na;
            for (int ma = 0; ma <= s; ++ma) {
                const int mb = s - ma;
                cld sum = 0.0L;
                const int k_lo = std::max(0, ma - nb);
                const int k_hi = std::min(na, ma);
                for (int k = k_lo; k <= k_hi; ++k) {
                    sum += binom[na][k] * binom[nb][ma - k] * upow[0][k] *
                           upow[1][na - k] * upow[2][ma - k] *
                           upow[3][nb - ma + k];
                }
                sum *= sqrt_fact[ma] * sqrt_fact[mb] /
                       (sqrt_fact[na] * sqrt_fact[nb]);
                t[s][static_cast<std::size_t>(ma) * (s + 1) + na] =
                    static_cast<cd>(sum);
            }
        }
    }
    return t;
}

// Applies the sector transform to the (a, b) index pair of one band; the
// other band's indices are spectators.
FockState mix_band(const FockState& state, const Mat2c& u, int band) {
    const int ia = (band == 0) ? 0 : 2;  // mode indices of (a, b) in the band
    const int ib = ia + 1;
    const int s_max = state.dims[ia] - 1 + state.dims[ib] - 1;
    const auto t = sector_matrices(u, s_max);

    FockState out;
    out.dims = state.dims;
    out.dims[ia] = out.dims[ib] = s_max + 1;
    out.amp.assign(total_size(out.dims), cd(0.0, 0.0));
    out.truncation_deficit = state.truncation_deficit;

    const int spec0 = (band == 0) ? 2 : 0;  // spectator modes
    const int spec1 = spec0 + 1;
    const int n_spec =
        state.dims[spec0] * state.dims[spec1];

#pragma omp parallel for schedule(static)
    for (int sp = 0; sp < n_spec; ++sp) {
        const int j0 = sp / state.dims[spec1];
        const int j1 = sp % state.dims[spec1];
        int idx[4];
        idx[spec0] = j0;
        idx[spec1] = j1;
        for (int s = 0; s <= s_max; ++s) {
            const auto& ts = t[s];
            for (int ma = std::max(0, s - out.dims[ib] + 1);
                 ma <= std::min(s, out.dims[ia] - 1); ++ma) {
                cld acc = 0.0L;
                const int na_lo = std::max(0, s - state.dims[ib] + 1);
                const int na_hi = std::min(s, state.dims[ia] - 1);
                for (int na = na_lo; na <= na_hi; ++na) {
                    idx[ia] = na;
                    idx[ib] = s - na;
                    acc += cld(ts[static_cast<std::size_t>(ma) * (s + 1) + na]) *
                           cld(state.amp[flat_index(state.dims, idx[0], idx[1],
                                                    idx[2], idx[3])]);
                }
                idx[ia] = ma;
                idx[ib] = s - ma;
                out.amp[flat_index(out.dims, idx[0], idx[1], idx[2], idx[3])] =
                    static_cast<cd>(acc);
            }
        }
    }
    return out;
}

// S_k |psi> with one extra photon of index headroom on every mode.
FockState apply_stokes_op(const FockState& state, int k) {
    FockState out;
    out.dims = {state.dims[0] + 1, state.dims[1] + 1, state.dims[2] + 1,
                state.dims[3] + 1};
    out.amp.assign(total_size(out.dims), cd(0.0, 0.0));
    out.truncation_deficit = state.truncation_deficit;

    const cd i_unit(0.0, 1.0);
    for (int n0 = 0; n0 < state.dims[0]; ++n0)
        for (int n1 = 0; n1 < state.dims[1]; ++n1)
            for (int n2 = 0; n2 < state.dims[2]; ++n2)
                for (int n3 = 0; n3 < state.dims[3]; ++n3) {
                    const cd a =
                        state.amp[flat_index(state.dims, n0, n1, n2, n3)];
                    if (a == cd(0.0, 0.0)) continue;
                    const int n[4] = {n0, n1, n2, n3};
                    if (k == 0 || k == 1) {
                        const double w =
                            (k == 0) ? double(n0 + n1 + n2 + n3)
                                     : double(n0 - n1 + n2 - n3);
                        out.amp[flat_index(out.dims, n0, n1, n2, n3)] += w * a;
                        continue;
                    }
                    // a†b and b†a within each band
                    for (int band = 0; band < 2; ++band) {
                        const int na = n[2 * band], nb = n[2 * band + 1];
                        int m[4] = {n0, n1, n2, n3};
                        if (nb > 0) {  // a†b
                            m[2 * band] = na + 1;
                            m[2 * band + 1] = nb - 1;
                            const double w = std::sqrt(double(na + 1) * nb);
                            const cd coef = (k == 2) ? cd(w, 0.0) : -i_unit * w;
                            out.amp[flat_index(out.dims, m[0], m[1], m[2],
                                               m[3])] += coef * a;
                        }
                        if (na > 0) {  // b†a
                            m[2 * band] = na - 1;
                            m[2 * band + 1] = nb + 1;
                            const double w = std::sqrt(double(na) * (nb + 1));
                            const cd coef = (k == 2) ? cd(w, 0.0) : i_unit * w;
                            out.amp[flat_index(out.dims, m[0], m[1], m[2],
                                               m[3])] += coef * a;
                        }
                    }
                }
    return out;
}

}  // namespace

std::complex<double>& FockState::at(int n0, int n1, int n2, int n3) {
    return amp[flat_index(dims, n0, n1, n2, n3)];
}

const std::complex<double>& FockState::at(int n0, int n1, int n2,
                                          int n3) const {
    return amp[flat_index(dims, n0, n1, n2, n3)];
}

double FockState::norm() const {
    long double acc = 0.0L;
    for (const cd& a : amp) acc += std::norm(cld(a));
    return static_cast<double>(std::sqrt(acc));
}

double truncation_tail(double gamma, int cutoff) {
    if (gamma < 0.0 || cutoff < 0)
        throw std::invalid_argument("truncation_tail: bad arguments");
    const double t2 = std::tanh(gamma) * std::tanh(gamma);
    const double per_pair = std::pow(t2, cutoff + 1);
    return 1.0 - (1.0 - per_pair) * (1.0 - per_pair);
}

FockState build_fock_state(BellKind kind, double gamma, int cutoff) {
    if (gamma < 0.0)
        throw std::invalid_argument("build_fock_state: negative gamma");
    if (gamma > 1.5)
        throw std::invalid_argument(
            "build_fock_state: gamma > 1.5 is outside the oracle regime");
    if (cutoff < 0 || cutoff > 60)
        throw std::invalid_argument("build_fock_state: cutoff out of range");
    const double tail = truncation_tail(gamma, cutoff);
    if (tail > 1e-6)
        throw TruncationError(
            "build_fock_state: truncated mass " + std::to_string(tail) +
            " exceeds 1e-6; raise the cutoff or lower gamma");

    const int d = cutoff + 1;
    FockState state;
    state.dims = {d, d, d, d};
    state.amp.assign(total_size(state.dims), cd(0.0, 0.0));
    state.truncation_deficit = tail;

    const double th = std::tanh(gamma);
    const double ch = std::cosh(gamma);
    const bool minus =
        (kind == BellKind::PsiMinus || kind == BellKind::PhiMinus);
    const double second = minus ? -th : th;  // pump phase 0 or pi

    // First pair carries n photons, second pair m photons.
    for (int n = 0; n < d; ++n) {
        for (int m = 0; m < d; ++m) {
            const cd a(std::pow(th, n) * std::pow(second, m) / (ch * ch), 0.0);
            if (kind == BellKind::PsiMinus || kind == BellKind::PsiPlus)
                state.at(n, m, m, n) = a;  // pairs (a1, b2) and (b1, a2)
            else
                state.at(n, m, n, m) = a;  // pairs (a1, a2) and (b1, b2)
        }
    }

    const double nrm = state.norm();
    for (cd& a : state.amp) a /= nrm;
    return state;
}

FockState apply_polarization_unitary_fock(const FockState& state,
                                          const Mat2c& u, Band band) {
    if ((u.adjoint() * u - Mat2c::Identity()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument(
            "apply_polarization_unitary_fock: transform is not unitary");
    FockState out = state;
    if (band == Band::W1 || band == Band::Both) out = mix_band(out, u, 0);
    if (band == Band::W2 || band == Band::Both) out = mix_band(out, u, 1);
    return out;
}

std::complex<double> inner_product(const FockState& bra, const FockState& ket) {
    cld acc = 0.0L;
    const int d0 = std::min(bra.dims[0], ket.dims[0]);
    const int d1 = std::min(bra.dims[1], ket.dims[1]);
    const int d2 = std::min(bra.dims[2], ket.dims[2]);
    const int d3 = std::min(bra.dims[3], ket.dims[3]);
    for (int n0 = 0; n0 < d0; ++n0)
        for (int n1 = 0; n1 < d1; ++n1)
            for (int n2 = 0; n2 < d2; ++n2)
                for (int n3 = 0; n3 < d3; ++n3)
                    acc += std::conj(cld(bra.at(n0, n1, n2, n3))) *
                           cld(ket.at(n0, n1, n2, n3));
    return static_cast<cd>(acc);
}

double stokes_moment_fock(const FockState& state, int k, int order) {
    if (k < 0 || k > 3)
        throw std::invalid_argument("stokes_moment_fock: index must be in 0..3");
    if (order < 1 || order > 4)
        throw std::invalid_argument(
            "stokes_moment_fock: order must be in 1..4");
    FockState cur = state;
    for (int t = 0; t < order; ++t) cur = apply_stokes_op(cur, k);
    return inner_product(state, cur).real();
}

double stokes_residual_norm(const FockState& state, int k) {
    if (k < 0 || k > 3)
        throw std::invalid_argument(
            "stokes_residual_norm: index must be in 0..3");
    return apply_stokes_op(state, k).norm();
}

std::complex<double> mode_moment(const FockState& state, int i, int j) {
    cld acc = 0.0L;
    const auto& d = state.dims;
    for (int n0 = 0; n0 < d[0]; ++n0)
        for (int n1 = 0; n1 < d[1]; ++n1)
            for (int n2 = 0; n2 < d[2]; ++n2)
                for (int n3 = 0; n3 < d[3]; ++n3) {
                    int n[4] = {n0, n1, n2, n3};
                    if (n[j] == 0) continue;
                    int m[4] = {n0, n1, n2, n3};
                    m[j] -= 1;
                    m[i] += 1;
                    if (m[i] >= d[i]) continue;
                    acc += std::conj(cld(state.at(m[0], m[1], m[2], m[3]))) *
                           cld(state.at(n0, n1, n2, n3)) *
                           std::sqrt(static_cast<long double>(n[j]) * m[i]);
                }
    return static_cast<cd>(acc);
}

std::complex<double> pair_moment(const FockState& state, int i, int j) {
    cld acc = 0.0L;
    const auto& d = state.dims;
    for (int n0 = 0; n0 < d[0]; ++n0)
        for (int n1 = 0; n1 < d[1]; ++n1)
            for (int n2 = 0; n2 < d[2]; ++n2)
                for (int n3 = 0; n3 < d[3]; ++n3) {
                    int n[4] = {n0, n1, n2, n3};
                    if (n[j] == 0) continue;
                    int m[4] = {n0, n1, n2, n3};
                    m[j] -= 1;
                    if (m[i] == 0) continue;
                    const double w =
                        std::sqrt(static_cast<double>(n[j]) * m[i]);
                    m[i] -= 1;
                    acc += std::conj(cld(state.at(m[0], m[1], m[2], m[3]))) *
                           cld(state.at(n0, n1, n2, n3)) * (long double)w;
                }
    return static_cast<cd>(acc);
}

std::complex<double> mode_mean(const FockState& state, int i) {
    cld acc = 0.0L;
    const auto& d = state.dims;
    for (int n0 = 0; n0 < d[0]; ++n0)
        for (int n1 = 0; n1 < d[1]; ++n1)
            for (int n2 = 0; n2 < d[2]; ++n2)
                for (int n3 = 0; n3 < d[3]; ++n3) {
                    int n[4] = {n0, n1, n2, n3};
                    if (n[i] == 0) continue;
                    int m[4] = {n0, n1, n2, n3};
                    m[i] -= 1;
                    acc += std::conj(cld(state.at(m[0], m[1], m[2], m[3]))) *
                           cld(state.at(n0, n1, n2, n3)) *
                           std::sqrt(static_cast<long double>(n[i]));
                }
    return static_cast<cd>(acc);
}

std::pair<Vec8, Mat8> covariance_from_fock(const FockState& state) {
    Mat4c g, p;
    Vec4c dvec;
    for (int i = 0; i < 4; ++i) {
        dvec(i) = mode_mean(state, i);
        for (int j = 0; j < 4; ++j) {
            g(i, j) = mode_moment(state, i, j);
            p(i, j) = pair_moment(state, i, j);
        }
    }
    Vec8 mean;
    Mat8 cov;
    const double rt2 = std::sqrt(2.0);
    for (int i = 0; i < 4; ++i) {
        mean(2 * i) = rt2 * dvec(i).real();
        mean(2 * i + 1) = rt2 * dvec(i).imag();
    }
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const double delta = (i == j) ? 0.5 : 0.0;
            cov(2 * i, 2 * j) = p(i, j).real() + g(i, j).real() + delta -
                                mean(2 * i) * mean(2 * j);
            cov(2 * i + 1, 2 * j + 1) = -p(i, j).real() + g(i, j).real() +
                                        delta -
                                        mean(2 * i + 1) * mean(2 * j + 1);
            cov(2 * i, 2 * j + 1) = p(i, j).imag() + g(i, j).imag() -
                                    mean(2 * i) * mean(2 * j + 1);
            cov(2 * i + 1, 2 * j) = p(i, j).imag() - g(i, j).imag() -
                                    mean(2 * i + 1) * mean(2 * j);
        }
    }
    return {mean, cov};
}

FockSampler::FockSampler(const FockState& state) : dims_(state.dims) {
    cdf_.resize(state.amp.size());
    long double acc = 0.0L;
    for (std::size_t idx = 0; idx < state.amp.size(); ++idx) {
        acc += std::norm(cld(state.amp[idx]));
        cdf_[idx] = static_cast<double>(acc);
    }
}

PhotonTuple FockSampler::sample(const std::array<double, 4>& eta,
                                std::uint64_t seed) const {
    for (double e : eta)
        if (!(e >= 0.0 && e <= 1.0))
            throw std::invalid_argument(
                "FockSampler::sample: efficiency outside [0, 1]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, cdf_.back());
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), uni(rng));
    std::size_t idx = static_cast<std::size_t>(it - cdf_.begin());
    if (idx >= cdf_.size()) idx = cdf_.size() - 1;

    PhotonTuple tuple;
    tuple.n[3] = static_cast<int>(idx % dims_[3]);
    idx /= dims_[3];
    tuple.n[2] = static_cast<int>(idx % dims_[2]);
    idx /= dims_[2];
    tuple.n[1] = static_cast<int>(idx % dims_[1]);
    tuple.n[0] = static_cast<int>(idx / dims_[1]);

    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int m = 0; m < 4; ++m) {
        int kept = 0;
        for (int q = 0; q < tuple.n[m]; ++q)
            if (coin(rng) < eta[m]) ++kept;
        tuple.n[m] = kept;
    }
    return tuple;
}

std::vector<PhotonTuple> FockSampler::sample_batch(
    const std::array<double, 4>& eta, std::uint64_t seed, int count) const {
    std::vector<PhotonTuple> out(count);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < count; ++i) out[i] = sample(eta, mix_seed(seed, i));
    return out;
}

PhotonTuple sample_photon_tuple(const FockState& state,
                                const std::array<double, 4>& eta,
                                std::uint64_t seed) {
    return FockSampler(state).sample(eta, seed);
}

}  // namespace polbell
