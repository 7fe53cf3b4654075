#pragma once

#include "polbell/gaussian_state.hpp"

#include <array>

// Source and preparation optics for the four macroscopic polarization Bell
// states of two-color squeezed vacuum.

namespace polbell {

enum class BellKind { PsiMinus, PsiPlus, PhiMinus, PhiPlus };

// Two-crystal interferometric source: one squeezer pumps the H pair
// (a1, a2), the other the V pair (b1, b2) with a relative pump phase.
// Unequal gains model pump imbalance between the crystals.
struct SourceConfig {
    double gain_h = 0.0;
    double gain_v = 0.0;
    double pump_phase = 0.0;
    std::array<double, 4> eta{1.0, 1.0, 1.0, 1.0};
};

// Two-band retarder plate: Jones matrix
// R(axis) diag(1, e^{i delta_band}) R(-axis) applied per band.  The canonical
// parametrization (axis 0, pi retardance on band w1 only) turns PsiPlus into
// PsiMinus and is its own inverse.
struct DichroicPlate {
    double axis_angle = 0.0;
    double retardance_w1 = 3.14159265358979323846;
    double retardance_w2 = 0.0;
};

// Squeezer pairing per Bell state (phase pi on the second squeezer for the
// minus states):
//   PsiMinus/PsiPlus: (a1, b2) and (b1, a2);  PhiMinus/PhiPlus: (a1, a2)
//   and (b1, b2).
GaussianState make_bell_state(BellKind kind, double gain);

GaussianState mzi_source(const SourceConfig& cfg);

GaussianState apply_dichroic_plate(const GaussianState& state,
                                   const DichroicPlate& plate);

// mzi_source(pump_phase = pi) -> 45 degree basis rotation -> canonical
// dichroic plate -> loss.  Produces the PsiMinus covariance exactly.
GaussianState preparation_chain(double gain, const std::array<double, 4>& eta);

// Squeezer gain that yields <S0> = target_s0 before loss.
double gain_for_target_s0(double target_s0);

// Coherent probe polarized at +45 degrees in both bands (equal split on an
// H/V analyzer), with <S0> = total_photons.
GaussianState coherent_source(double total_photons);

}  // namespace polbell
