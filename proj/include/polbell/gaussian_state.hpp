#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>

// Gaussian (covariance-matrix) representation of the four-mode two-color
// polarization field.
//
// Mode ordering is fixed everywhere in this library:
//   0 = (w1, H) = a1    1 = (w1, V) = b1    2 = (w2, H) = a2    3 = (w2, V) = b2
//
// Quadratures: x = (c + c†)/sqrt(2), p = (c - c†)/(i sqrt(2)), so the vacuum
// variance is 1/2 per quadrature.  The 8-vector of quadratures is interleaved
// (x0, p0, x1, p1, x2, p2, x3, p3) and the covariance matrix is the
// symmetrized second moment  cov_ab = <{dR_a, dR_b}>/2.

namespace polbell {

inline constexpr int kNumModes = 4;

// The analytic pipeline carries 80-bit extended precision end to end: the
// anti-correlated states cancel photon-number terms of order n^2 ~ 1e11 in
// the variance sums, and the residual scales with the precision of the
// stored covariance.  Monte Carlo sampling downcasts to double at the
// sampling boundary, where statistical error dominates.
using Real = long double;
using Complex = std::complex<Real>;
using Vec8 = Eigen::Matrix<Real, 8, 1>;
using Mat8 = Eigen::Matrix<Real, 8, 8>;
using Mat2c = Eigen::Matrix<Complex, 2, 2>;
using Mat4c = Eigen::Matrix<Complex, 4, 4>;
using Vec4c = Eigen::Matrix<Complex, 4, 1>;

// Which frequency band a polarization element acts on.
enum class Band { W1, W2, Both };

struct GaussianState {
    Vec8 mean = Vec8::Zero();
    Mat8 cov = 0.5 * Mat8::Identity();
};

// Normally-ordered mode correlations of the same state:
//   number(i,j) = <dc_i† dc_j>   (Hermitian),
//   pair(i,j)   = <dc_i dc_j>    (symmetric),
//   displacement(i) = <c_i>,
// where dc = c - <c>.
struct ComplexCorrelations {
    Mat4c number = Mat4c::Zero();
    Mat4c pair = Mat4c::Zero();
    Vec4c displacement = Vec4c::Zero();
};

GaussianState vacuum_state();

// Two-mode squeezer c_i -> c_i cosh(g) + e^{i phase} c_j† sinh(g) (and i<->j).
// Throws std::invalid_argument on an invalid mode pair.
GaussianState apply_two_mode_squeeze(const GaussianState& state, int mode_i,
                                     int mode_j, double gain,
                                     double phase = 0.0);

// Applies a 2x2 unitary u to the (H, V) mode pair of one or both bands.
// Throws std::invalid_argument if u is not unitary (tolerance 1e-10).
GaussianState apply_passive_polarization_unitary(const GaussianState& state,
                                                 const Mat2c& u, Band band);

// Beam-splitter loss channel with per-mode transmission eta in [0, 1].
GaussianState apply_loss(const GaussianState& state,
                         const std::array<double, 4>& eta);

// Phase-space displacement by alpha (one complex amplitude per mode).
GaussianState apply_displacement(const GaussianState& state,
                                 const Vec4c& alpha);

ComplexCorrelations correlations(const GaussianState& state);
GaussianState from_correlations(const ComplexCorrelations& corr);

// <c_m† c_m> including the coherent part.
double photon_mean(const GaussianState& state, int mode);

// 1 for pure states, < 1 for mixed (1/sqrt(det 2*cov)).
double purity(const GaussianState& state);

// Smallest eigenvalue of cov + (i/2)*Omega; >= 0 (up to rounding) for any
// physical state.
double min_physicality_eigenvalue(const GaussianState& state);

Mat8 symplectic_form();

// Mean and variance of the quadratic observable O = sum_ij form_ij c_i† c_j
// for a Hermitian coefficient matrix `form`.  Both are exact (Wick
// factorization of the Gaussian moments), no sampling involved.
double quadratic_mean(const GaussianState& state, const Mat4c& form);
double quadratic_variance(const GaussianState& state, const Mat4c& form);

}  // namespace polbell
