#include "polbell/gaussian_state.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace polbell {

namespace {

void check_mode(int m, const char* who) {
    if (m < 0 || m >= kNumModes)
        throw std::invalid_argument(std::string(who) + ": mode index out of range");
}

// Symplectic image of the passive transform c -> U c for a 4x4 unitary U.
// With U = X + iY:  x' = X x - Y p,  p' = Y x + X p.
Mat8 passive_symplectic(const Mat4c& u) {
    Mat8 s = Mat8::Zero();
    for (int k = 0; k < kNumModes; ++k) {
        for (int l = 0; l < kNumModes; ++l) {
            const Real re = u(k, l).real();
            const Real im = u(k, l).imag();
            s(2 * k, 2 * l) = re;
            s(2 * k, 2 * l + 1) = -im;
            s(2 * k + 1, 2 * l) = im;
            s(2 * k + 1, 2 * l + 1) = re;
        }
    }
    return s;
}

GaussianState transformed(const GaussianState& state, const Mat8& s) {
    GaussianState out;
    out.mean = s * state.mean;
    out.cov = s * state.cov * s.transpose();
    return out;
}

// Quadruple-precision complex accumulator for the Wick sums: products of
// 80-bit values are near-exact at 113 mantissa bits, so the n^2-scale
// cancellations resolve down to the storage precision of the state.
#if defined(__SIZEOF_FLOAT128__)
using AccReal = __float128;
#else
using AccReal = long double;
#endif

struct AccComplex {
    AccReal re = 0;
    AccReal im = 0;
};

inline AccComplex acc(const Complex& z) {
    return {static_cast<AccReal>(z.real()), static_cast<AccReal>(z.imag())};
}

inline AccComplex operator+(AccComplex a, AccComplex b) {
    return {a.re + b.re, a.im + b.im};
}

inline AccComplex& operator+=(AccComplex& a, AccComplex b) {
    a.re += b.re;
    a.im += b.im;
    return a;
}

inline AccComplex operator*(AccComplex a, AccComplex b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

inline AccComplex conj(AccComplex a) { return {a.re, -a.im}; }

}  // namespace

GaussianState vacuum_state() { return GaussianState{}; }

GaussianState apply_two_mode_squeeze(const GaussianState& state, int mode_i,
                                     int mode_j, double gain, double phase) {
    check_mode(mode_i, "apply_two_mode_squeeze");
    check_mode(mode_j, "apply_two_mode_squeeze");
    if (mode_i == mode_j)
        throw std::invalid_argument("apply_two_mode_squeeze: mode pair must be distinct");

    const Real ch = std::cosh(static_cast<Real>(gain));
    const Real sh = std::sinh(static_cast<Real>(gain));
    const Real cp = std::cos(static_cast<Real>(phase));
    const Real sp = std::sin(static_cast<Real>(phase));

    // x_i' = ch x_i + sh (cp x_j + sp p_j),  p_i' = ch p_i + sh (sp x_j - cp p_j)
    Mat8 s = Mat8::Identity();
    const int xi = 2 * mode_i, pi = 2 * mode_i + 1;
    const int xj = 2 * mode_j, pj = 2 * mode_j + 1;
    s(xi, xi) = ch;
    s(pi, pi) = ch;
    s(xj, xj) = ch;
    s(pj, pj) = ch;
    s(xi, xj) = sh * cp;
    s(xi, pj) = sh * sp;
    s(pi, xj) = sh * sp;
    s(pi, pj) = -sh * cp;
    s(xj, xi) = sh * cp;
    s(xj, pi) = sh * sp;
    s(pj, xi) = sh * sp;
    s(pj, pi) = -sh * cp;
    return transformed(state, s);
}

GaussianState apply_passive_polarization_unitary(const GaussianState& state,
                                                 const Mat2c& u, Band band) {
    if ((u.adjoint() * u - Mat2c::Identity()).cwiseAbs().maxCoeff() > 1e-10L)
        throw std::invalid_argument(
            "apply_passive_polarization_unitary: transform is not unitary");

    Mat4c u4 = Mat4c::Identity();
    if (band == Band::W1 || band == Band::Both) u4.block<2, 2>(0, 0) = u;
    if (band == Band::W2 || band == Band::Both) u4.block<2, 2>(2, 2) = u;
    return transformed(state, passive_symplectic(u4));
}

GaussianState apply_loss(const GaussianState& state,
                         const std::array<double, 4>& eta) {
    Mat8 t = Mat8::Identity();
    for (int m = 0; m < kNumModes; ++m) {
        if (!(eta[m] >= 0.0 && eta[m] <= 1.0))
            throw std::invalid_argument("apply_loss: efficiency outside [0, 1]");
        const Real r = std::sqrt(static_cast<Real>(eta[m]));
        t(2 * m, 2 * m) = r;
        t(2 * m + 1, 2 * m + 1) = r;
    }
    GaussianState out;
    out.mean = t * state.mean;
    out.cov = t * state.cov * t + 0.5L * (Mat8::Identity() - t * t);
    return out;
}

GaussianState apply_displacement(const GaussianState& state,
                                 const Vec4c& alpha) {
    GaussianState out = state;
    const Real rt2 = std::sqrt(2.0L);
    for (int m = 0; m < kNumModes; ++m) {
        out.mean(2 * m) += rt2 * alpha(m).real();
        out.mean(2 * m + 1) += rt2 * alpha(m).imag();
    }
    return out;
}

ComplexCorrelations correlations(const GaussianState& state) {
    ComplexCorrelations corr;
    const Mat8& c = state.cov;
    for (int i = 0; i < kNumModes; ++i) {
        for (int j = 0; j < kNumModes; ++j) {
            const Real xx = c(2 * i, 2 * j);
            const Real pp = c(2 * i + 1, 2 * j + 1);
            const Real xp = c(2 * i, 2 * j + 1);
            const Real px = c(2 * i + 1, 2 * j);
            const Real delta = (i == j) ? 1.0L : 0.0L;
            corr.number(i, j) = {0.5L * (xx + pp - delta), 0.5L * (xp - px)};
            corr.pair(i, j) = {0.5L * (xx - pp), 0.5L * (xp + px)};
        }
        corr.displacement(i) =
            Complex(state.mean(2 * i), state.mean(2 * i + 1)) / std::sqrt(2.0L);
    }
    return corr;
}

GaussianState from_correlations(const ComplexCorrelations& corr) {
    GaussianState state;
    for (int i = 0; i < kNumModes; ++i) {
        for (int j = 0; j < kNumModes; ++j) {
            const Complex n = corr.number(i, j);
            const Complex a = corr.pair(i, j);
            const Real delta = (i == j) ? 1.0L : 0.0L;
            state.cov(2 * i, 2 * j) = a.real() + n.real() + 0.5L * delta;
            state.cov(2 * i + 1, 2 * j + 1) = -a.real() + n.real() + 0.5L * delta;
            state.cov(2 * i, 2 * j + 1) = a.imag() + n.imag();
            state.cov(2 * i + 1, 2 * j) = a.imag() - n.imag();
        }
        state.mean(2 * i) = std::sqrt(2.0L) * corr.displacement(i).real();
        state.mean(2 * i + 1) = std::sqrt(2.0L) * corr.displacement(i).imag();
    }
    return state;
}

double photon_mean(const GaussianState& state, int mode) {
    check_mode(mode, "photon_mean");
    const Real xx = state.cov(2 * mode, 2 * mode);
    const Real pp = state.cov(2 * mode + 1, 2 * mode + 1);
    const Real mx = state.mean(2 * mode);
    const Real mp = state.mean(2 * mode + 1);
    return static_cast<double>(0.5L * (xx + pp - 1.0L) +
                               0.5L * (mx * mx + mp * mp));
}

double purity(const GaussianState& state) {
    return static_cast<double>(
        1.0L / std::sqrt((2.0L * state.cov).determinant()));
}

Mat8 symplectic_form() {
    Mat8 omega = Mat8::Zero();
    for (int m = 0; m < kNumModes; ++m) {
        omega(2 * m, 2 * m + 1) = 1.0L;
        omega(2 * m + 1, 2 * m) = -1.0L;
    }
    return omega;
}

double min_physicality_eigenvalue(const GaussianState& state) {
    using Mat8c = Eigen::Matrix<Complex, 8, 8>;
    Mat8c h = state.cov.cast<Complex>();
    h += Complex(0.0L, 0.5L) * symplectic_form().cast<Complex>();
    Eigen::SelfAdjointEigenSolver<Mat8c> solver(h, Eigen::EigenvaluesOnly);
    return static_cast<double>(solver.eigenvalues().minCoeff());
}

double quadratic_mean(const GaussianState& state, const Mat4c& form) {
    const ComplexCorrelations corr = correlations(state);
    AccComplex total;
    for (int i = 0; i < kNumModes; ++i)
        for (int j = 0; j < kNumModes; ++j)
            total += acc(form(i, j)) *
                     (acc(corr.number(i, j)) +
                      conj(acc(corr.displacement(i))) * acc(corr.displacement(j)));
    return static_cast<double>(total.re);
}

// Wick factorization of Var(O) for O = sum form_ij c_i† c_j.  With w = M d,
// N and A the centered correlations:
//   Var = 2 Re(conj(w)ᵀ A conj(w)) + 2 Re(wᵀ N conj(w)) + |w|²          (coherent part)
//       + sum_ik (M A Mᵀ)_ik conj(A)_ik                                  (pair part)
//       + sum_il (M Nᵀ M)_il N_il + sum_il (M M)_il N_il.                (number part)
double quadratic_variance(const GaussianState& state, const Mat4c& form) {
    const ComplexCorrelations corr = correlations(state);
    AccComplex m[4][4], n[4][4], a[4][4], d[4];
    for (int i = 0; i < 4; ++i) {
        d[i] = acc(corr.displacement(i));
        for (int j = 0; j < 4; ++j) {
            m[i][j] = acc(form(i, j));
            n[i][j] = acc(corr.number(i, j));
            a[i][j] = acc(corr.pair(i, j));
        }
    }

    AccComplex w[4] = {};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) w[i] += m[i][j] * d[j];

    AccComplex lin;
    for (int j = 0; j < 4; ++j)
        for (int l = 0; l < 4; ++l)
            lin += conj(w[j]) * a[j][l] * conj(w[l]) + w[j] * n[j][l] * conj(w[l]);

    AccComplex quad;
    for (int i = 0; i < 4; ++i) {
        quad += conj(w[i]) * w[i];
        for (int k = 0; k < 4; ++k) {
            AccComplex mam, mnm, mm;
            for (int j = 0; j < 4; ++j) {
                mm += m[i][j] * m[j][k];
                for (int l = 0; l < 4; ++l) {
                    mam += m[i][j] * a[j][l] * m[k][l];
                    mnm += m[i][j] * conj(n[j][l]) * m[l][k];
                }
            }
            quad += mam * conj(a[i][k]) + (mnm + mm) * n[i][k];
        }
    }
    return static_cast<double>(2 * lin.re + quad.re);
}

}  // namespace polbell
