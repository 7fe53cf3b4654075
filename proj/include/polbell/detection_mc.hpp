#pragma once

#include "polbell/gaussian_state.hpp"
#include "polbell/stokes.hpp"

#include <cstdint>
#include <vector>

// Pulse-resolved detection Monte Carlo.  Each pulse draws one quadrature
// vector from the Gaussian state rotated into the analyzer basis, converts
// it to detector photon numbers through the symmetric-ordering estimator
// n = (x^2 + p^2 - 1)/2 per mode, and adds electronic noise.
//
// Sampling is embarrassingly parallel: every pulse gets its own engine
// seeded from (seed, pulse index), so results are bit-identical for any
// thread count.  simulate_pulses_serial is the plain-loop reference the
// OpenMP kernel is tested against.

namespace polbell {

struct DetectorModel {
    // Electronic noise per detector per pulse, std dev in photon-number
    // equivalents (applied before gain).
    double electronic_noise_sigma = 180.0;
    double gain = 1.0;
};

struct AnalyzerSetting {
    Plate plate = Plate::HWP;
    double angle = 0.0;  // radians
};

struct PulseRecord {
    double q1 = 0.0;  // transmitted arm (H at both bands), charge units
    double q2 = 0.0;  // reflected arm (V at both bands)
    AnalyzerSetting setting;
};

std::vector<PulseRecord> simulate_pulses(const GaussianState& state,
                                         const AnalyzerSetting& setting,
                                         const DetectorModel& det,
                                         std::uint64_t seed, int count);

std::vector<PulseRecord> simulate_pulses_serial(const GaussianState& state,
                                                const AnalyzerSetting& setting,
                                                const DetectorModel& det,
                                                std::uint64_t seed, int count);

PulseRecord sample_pulse(const GaussianState& state,
                         const AnalyzerSetting& setting,
                         const DetectorModel& det, std::uint64_t seed);

struct NrfEstimate {
    double value = 0.0;      // Var(q1-q2)/<q1+q2>, noise-subtracted, /snl
    double std_error = 0.0;  // blocked bootstrap (100 blocks, 1000 resamples)
    long n_pulses = 0;
    double snl_reference = 1.0;
};

// Requires >= 100 records taken at one analyzer setting.  The electronic
// contribution 2 (gain * sigma_e)^2 is subtracted from the numerator; the
// mean sum is divided by gain; snl rescales to shot-noise units.
NrfEstimate estimate_nrf(const std::vector<PulseRecord>& records,
                         const DetectorModel& det, double snl = 1.0);

struct CalibrationReport {
    double snl = 1.0;  // gain-normalized, electronic noise subtracted
    double snl_std_error = 0.0;
    double electronic_fraction = 0.0;   // 2 sigma_e^2 / mean photon sum
    double electronic_variance = 0.0;   // 2 sigma_e^2, photon units
    long n_pulses = 0;
};

// Shot-noise unit from a coherent probe split equally between the two
// detectors; ideal value 1.0.
CalibrationReport shot_noise_calibration(double mean_photons, int n_pulses,
                                         const DetectorModel& det,
                                         std::uint64_t seed);

// Upper bound on the NRF bias of the symmetric-ordering sampler: the
// difference variance picks up at most 1/4 photon^2 per mode, i.e. at most
// 1 photon^2 total, so the NRF shifts by at most 1/<S0>.  For states below
// one photon the additive bound (1.0) is returned; NRF reporting is
// disabled there anyway.
double wigner_bias_bound(const GaussianState& state);

}  // namespace polbell
