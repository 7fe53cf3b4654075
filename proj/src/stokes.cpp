#include "polbell/stokes.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace polbell {

namespace {

constexpr Complex kI{0.0L, 1.0L};

Mat2c band_block(int k) {
    Mat2c b;
    switch (k) {
        case 0: b << 1, 0, 0, 1; break;
        case 1: b << 1, 0, 0, -1; break;
        case 2: b << 0, 1, 1, 0; break;
        case 3: b << 0, -kI, kI, 0; break;
        default:
            throw std::invalid_argument("stokes_form: index must be in 0..3");
    }
    return b;
}

}  // namespace

StokesForm stokes_form(int k) {
    StokesForm f;
    const Mat2c b = band_block(k);
    f.m.block<2, 2>(0, 0) = b;
    f.m.block<2, 2>(2, 2) = b;
    f.label = "S" + std::to_string(k);
    return f;
}

Mat2c rotation_jones(double theta) {
    const Real c = std::cos(static_cast<Real>(theta));
    const Real s = std::sin(static_cast<Real>(theta));
    Mat2c r;
    r << c, -s, s, c;
    return r;
}

Mat2c waveplate_jones(Plate plate, double theta) {
    Mat2c retarder = Mat2c::Identity();
    retarder(1, 1) = (plate == Plate::HWP) ? Complex(-1.0L) : kI;
    return rotation_jones(theta) * retarder * rotation_jones(-theta);
}

StokesForm rotated_form(const StokesForm& base, Plate plate, double theta) {
    const Mat2c j = waveplate_jones(plate, theta);
    Mat4c j4 = Mat4c::Zero();
    j4.block<2, 2>(0, 0) = j;
    j4.block<2, 2>(2, 2) = j;
    StokesForm f;
    f.m = j4.adjoint() * base.m * j4;
    f.label = base.label + (plate == Plate::HWP ? "@hwp" : "@qwp");
    return f;
}

StokesReport stokes_report(const GaussianState& state) {
    StokesReport rep;
    for (int k = 0; k < 4; ++k) {
        const StokesForm f = stokes_form(k);
        rep.means[k] = quadratic_mean(state, f.m);
        rep.variances[k] = quadratic_variance(state, f.m);
    }
    rep.nrf_defined = rep.means[0] > 1e-12;
    if (rep.nrf_defined)
        for (int k = 1; k < 4; ++k)
            rep.nrf[k - 1] = rep.variances[k] / rep.means[0];
    return rep;
}

UncertaintyReport uncertainty_check(const GaussianState& state,
                                    double tolerance) {
    const StokesReport rep = stokes_report(state);
    UncertaintyReport unc;
    for (int k = 1; k <= 3; ++k) {
        const int i = 1 + (k % 3);
        const int j = 1 + ((k + 1) % 3);
        const double lhs = std::sqrt(std::max(rep.variances[i], 0.0)) *
                           std::sqrt(std::max(rep.variances[j], 0.0));
        unc.margins[k - 1] = lhs - std::abs(rep.means[k]);
        unc.satisfied[k - 1] = unc.margins[k - 1] >= -tolerance;
    }
    return unc;
}

NrfBounds nrf_bounds(double mean_photons_per_mode, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0))
        throw std::invalid_argument("nrf_bounds: efficiency outside [0, 1]");
    if (mean_photons_per_mode < 0.0)
        throw std::invalid_argument("nrf_bounds: negative photon number");
    return {1.0 - eta, 1.0 + eta + eta * 2.0 * mean_photons_per_mode};
}

}  // namespace polbell
