#pragma once

#include "polbell/gaussian_state.hpp"
#include "polbell/optics_chain.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

// Truncated Fock-basis oracle for the four-mode states.  Everything here is
// brute force on the amplitude tensor and deliberately shares no machinery
// with the covariance-matrix implementation: it exists to validate it.

namespace polbell {

struct TruncationError : std::runtime_error {
    explicit TruncationError(const std::string& what)
        : std::runtime_error(what) {}
};

// Dense amplitude tensor over occupation numbers (n0, n1, n2, n3), mode m
// ranging over 0..dims[m]-1.
struct FockState {
    std::array<int, 4> dims{1, 1, 1, 1};
    std::vector<std::complex<double>> amp;
    // Probability mass discarded when the pair expansion was truncated;
    // amplitudes are renormalized to unit norm after truncation.
    double truncation_deficit = 0.0;

    std::complex<double>& at(int n0, int n1, int n2, int n3);
    const std::complex<double>& at(int n0, int n1, int n2, int n3) const;
    double norm() const;
};

// Probability mass above the per-mode cutoff for a two-pair product state:
// each pair carries a geometric distribution in tanh^2(gamma).
double truncation_tail(double gamma, int cutoff);

// Pair expansion sum_n (e^{i phase} tanh g)^n / cosh g on each squeezed pair,
// truncated at `cutoff` photons per mode and renormalized.  Throws
// TruncationError when the discarded mass exceeds 1e-6 and
// std::invalid_argument outside the oracle regime (gamma > 1.5).
FockState build_fock_state(BellKind kind, double gamma, int cutoff);

// Exact passive mixing of the (H, V) modes of one or both bands.  The
// per-band photon total is conserved, so the transform is block-diagonal in
// sectors and loses nothing; output dims grow to hold every sector.
FockState apply_polarization_unitary_fock(const FockState& state,
                                          const Mat2c& u, Band band);

// <S_k^order> for order in 1..4, by repeated operator application with
// enlarged index headroom (one extra photon of room per application).
double stokes_moment_fock(const FockState& state, int k, int order);

// || S_k |psi> ||; identically zero for the singlet up to truncation.
double stokes_residual_norm(const FockState& state, int k);

// Brute-force ladder moments: <c_i† c_j>, <c_i c_j>, <c_i>.
std::complex<double> mode_moment(const FockState& state, int i, int j);
std::complex<double> pair_moment(const FockState& state, int i, int j);
std::complex<double> mode_mean(const FockState& state, int i);

std::complex<double> inner_product(const FockState& bra, const FockState& ket);

// Quadrature mean vector and symmetrized covariance reconstructed from the
// ladder moments above -- an independent route to the Gaussian description.
std::pair<Vec8, Mat8> covariance_from_fock(const FockState& state);

struct PhotonTuple {
    std::array<int, 4> n{0, 0, 0, 0};
};

// Samples photon-number tuples from |amp|^2 followed by per-mode binomial
// thinning with efficiency eta.  Deterministic in (seed, sample index).
class FockSampler {
  public:
    explicit FockSampler(const FockState& state);

    PhotonTuple sample(const std::array<double, 4>& eta,
                       std::uint64_t seed) const;
    std::vector<PhotonTuple> sample_batch(const std::array<double, 4>& eta,
                                          std::uint64_t seed, int count) const;

  private:
    std::array<int, 4> dims_;
    std::vector<double> cdf_;
};

PhotonTuple sample_photon_tuple(const FockState& state,
                                const std::array<double, 4>& eta,
                                std::uint64_t seed);

}  // namespace polbell
