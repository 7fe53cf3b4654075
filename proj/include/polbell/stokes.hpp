#pragma once

#include "polbell/gaussian_state.hpp"

#include <array>
#include <string>

// Stokes observables summed over the two frequency bands, and the analyzer
// geometry (waveplate + polarizing prism) that selects which of them the
// detector pair measures.

namespace polbell {

enum class Plate { HWP, QWP };

// Hermitian coefficient matrix of a band-summed quadratic observable.
struct StokesForm {
    Mat4c m = Mat4c::Zero();
    std::string label;
};

// k in 0..3.  S0 = total photon number; S1, S2, S3 carry one Pauli-type
// 2x2 block per frequency band.  S3 convention: a right-circular coherent
// state (H + iV)/sqrt(2) has <S3> = +<S0>.
StokesForm stokes_form(int k);

// Jones matrix of a waveplate with its fast axis at angle theta (radians):
// rotation-conjugated diag(1, -1) for a half-wave plate and diag(1, i) for a
// quarter-wave plate.
Mat2c waveplate_jones(Plate plate, double theta);

// Counterclockwise rotation of the polarization basis by theta.
Mat2c rotation_jones(double theta);

// Observable measured by the detector difference when `base` is measured
// behind a waveplate at angle theta: m -> J† m J applied per band.
StokesForm rotated_form(const StokesForm& base, Plate plate, double theta);

struct StokesReport {
    std::array<double, 4> means{};
    std::array<double, 4> variances{};
    // nrf[k-1] = Var(S_k)/<S0> for k = 1..3; meaningful only if nrf_defined.
    std::array<double, 3> nrf{};
    bool nrf_defined = false;
};

StokesReport stokes_report(const GaussianState& state);

// Heisenberg relations Delta S_i Delta S_j >= |<S_k>| for the three cyclic
// index triples.  margins[k-1] = Delta S_i Delta S_j - |<S_k>|.
struct UncertaintyReport {
    std::array<double, 3> margins{};
    std::array<bool, 3> satisfied{};
};

UncertaintyReport uncertainty_check(const GaussianState& state,
                                    double tolerance = 1e-9);

// Attainable NRF range for a twin-beam state of per-mode photon number n
// detected with uniform efficiency eta: squeezed settings reach 1 - eta,
// anti-squeezed settings reach 1 + eta + eta * (4n)/2.
struct NrfBounds {
    double min = 0.0;
    double max = 0.0;
};

NrfBounds nrf_bounds(double mean_photons_per_mode, double eta);

}  // namespace polbell
