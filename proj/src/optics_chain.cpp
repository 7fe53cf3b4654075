#include "polbell/optics_chain.hpp"

#include "polbell/stokes.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace polbell {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

GaussianState make_bell_state(BellKind kind, double gain) {
    if (gain < 0.0)
        throw std::invalid_argument("make_bell_state: negative gain");

    int first_i, first_j, second_i, second_j;
    if (kind == BellKind::PsiMinus || kind == BellKind::PsiPlus) {
        first_i = 0; first_j = 3;   // (a1, b2)
        second_i = 1; second_j = 2; // (b1, a2)
    } else {
        first_i = 0; first_j = 2;   // (a1, a2)
        second_i = 1; second_j = 3; // (b1, b2)
    }
    const bool minus = (kind == BellKind::PsiMinus || kind == BellKind::PhiMinus);

    GaussianState state = vacuum_state();
    state = apply_two_mode_squeeze(state, first_i, first_j, gain, 0.0);
    state = apply_two_mode_squeeze(state, second_i, second_j, gain,
                                   minus ? kPi : 0.0);
    return state;
}

GaussianState mzi_source(const SourceConfig& cfg) {
    if (cfg.gain_h < 0.0 || cfg.gain_v < 0.0)
        throw std::invalid_argument("mzi_source: negative gain");
    GaussianState state = vacuum_state();
    state = apply_two_mode_squeeze(state, 0, 2, cfg.gain_h, 0.0);
    state = apply_two_mode_squeeze(state, 1, 3, cfg.gain_v, cfg.pump_phase);
    return apply_loss(state, cfg.eta);
}

GaussianState apply_dichroic_plate(const GaussianState& state,
                                   const DichroicPlate& plate) {
    GaussianState out = state;
    const double retardance[2] = {plate.retardance_w1, plate.retardance_w2};
    const Band bands[2] = {Band::W1, Band::W2};
    for (int b = 0; b < 2; ++b) {
        Mat2c retarder = Mat2c::Identity();
        retarder(1, 1) =
            std::exp(Complex(0.0L, static_cast<Real>(retardance[b])));
        const Mat2c j = rotation_jones(plate.axis_angle) * retarder *
                        rotation_jones(-plate.axis_angle);
        out = apply_passive_polarization_unitary(out, j, bands[b]);
    }
    return out;
}

GaussianState preparation_chain(double gain,
                                const std::array<double, 4>& eta) {
    SourceConfig src;
    src.gain_h = src.gain_v = gain;
    src.pump_phase = kPi;
    GaussianState state = mzi_source(src);  // lossless: src.eta defaults to 1
    state = apply_passive_polarization_unitary(state, rotation_jones(kPi / 4.0),
                                               Band::Both);
    state = apply_dichroic_plate(state, DichroicPlate{});
    return apply_loss(state, eta);
}

double gain_for_target_s0(double target_s0) {
    if (target_s0 < 0.0)
        throw std::invalid_argument("gain_for_target_s0: negative target");
    return std::asinh(std::sqrt(target_s0 / 4.0));
}

GaussianState coherent_source(double total_photons) {
    if (total_photons < 0.0)
        throw std::invalid_argument("coherent_source: negative photon number");
    const double amp = std::sqrt(total_photons / 4.0);
    Vec4c alpha;
    alpha << amp, amp, amp, amp;
    return apply_displacement(vacuum_state(), alpha);
}

}  // namespace polbell
