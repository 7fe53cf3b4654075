#include "polbell/detection_mc.hpp"

#include "polbell/rng.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace polbell {

namespace {

using DVec8 = Eigen::Matrix<double, 8, 1>;
using DMat8 = Eigen::Matrix<double, 8, 8>;

// Rotated state folded into what the pulse loop needs: mean and a Cholesky
// factor of the covariance, downcast to double for the sampling hot path.
struct PulseKernel {
    DVec8 mean;
    DMat8 chol;
    double sigma_e;
    double gain;
};

PulseKernel make_kernel(const GaussianState& state,
                        const AnalyzerSetting& setting,
                        const DetectorModel& det) {
    if (det.gain <= 0.0)
        throw std::invalid_argument("detection: gain must be positive");
    if (det.electronic_noise_sigma < 0.0)
        throw std::invalid_argument("detection: negative noise sigma");
    const GaussianState rotated = apply_passive_polarization_unitary(
        state, waveplate_jones(setting.plate, setting.angle), Band::Both);
    const DMat8 cov = rotated.cov.cast<double>();
    Eigen::LLT<DMat8> llt(cov);
    PulseKernel kernel{rotated.mean.cast<double>(), DMat8::Zero(),
                       det.electronic_noise_sigma, det.gain};
    if (llt.info() == Eigen::Success) {
        kernel.chol = llt.matrixL();
    } else {
        // Covariances squeezed to the physical boundary can fail LLT by
        // rounding; fall back to an eigenvalue square root.
        Eigen::SelfAdjointEigenSolver<DMat8> es(cov);
        kernel.chol = es.eigenvectors() *
                      es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }
    return kernel;
}

PulseRecord run_pulse(const PulseKernel& kernel,
                      const AnalyzerSetting& setting, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    DVec8 z;
    for (int i = 0; i < 8; ++i) z(i) = gauss(rng);
    const DVec8 r = kernel.mean + kernel.chol * z;

    double photons[4];
    for (int m = 0; m < 4; ++m) {
        const double x = r(2 * m), p = r(2 * m + 1);
        photons[m] = 0.5 * (x * x + p * p - 1.0);
    }
    PulseRecord rec;
    rec.setting = setting;
    rec.q1 = kernel.gain *
             (photons[0] + photons[2] + kernel.sigma_e * gauss(rng));
    rec.q2 = kernel.gain *
             (photons[1] + photons[3] + kernel.sigma_e * gauss(rng));
    return rec;
}

bool same_setting(const AnalyzerSetting& a, const AnalyzerSetting& b) {
    return a.plate == b.plate && a.angle == b.angle;
}

}  // namespace

std::vector<PulseRecord> simulate_pulses_serial(const GaussianState& state,
                                                const AnalyzerSetting& setting,
                                                const DetectorModel& det,
                                                std::uint64_t seed, int count) {
    const PulseKernel kernel = make_kernel(state, setting, det);
    std::vector<PulseRecord> records(count);
    for (int i = 0; i < count; ++i)
        records[i] = run_pulse(kernel, setting, mix_seed(seed, i));
    return records;
}

std::vector<PulseRecord> simulate_pulses(const GaussianState& state,
                                         const AnalyzerSetting& setting,
                                         const DetectorModel& det,
                                         std::uint64_t seed, int count) {
    const PulseKernel kernel = make_kernel(state, setting, det);
    std::vector<PulseRecord> records(count);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < count; ++i)
        records[i] = run_pulse(kernel, setting, mix_seed(seed, i));
    return records;
}

PulseRecord sample_pulse(const GaussianState& state,
                         const AnalyzerSetting& setting,
                         const DetectorModel& det, std::uint64_t seed) {
    return run_pulse(make_kernel(state, setting, det), setting, seed);
}

NrfEstimate estimate_nrf(const std::vector<PulseRecord>& records,
                         const DetectorModel& det, double snl) {
    const long n = static_cast<long>(records.size());
    if (n < 100)
        throw std::invalid_argument("estimate_nrf: need at least 100 records");
    if (snl <= 0.0)
        throw std::invalid_argument("estimate_nrf: snl must be positive");
    for (const PulseRecord& r : records)
        if (!same_setting(r.setting, records.front().setting))
            throw std::invalid_argument(
                "estimate_nrf: records mix analyzer settings");

    const double noise_var = 2.0 * det.gain * det.gain *
                             det.electronic_noise_sigma *
                             det.electronic_noise_sigma;

    // Per-block sufficient statistics for a blocked bootstrap.
    constexpr int kBlocks = 100;
    constexpr int kResamples = 1000;
    struct BlockStat {
        double count = 0, sum_d = 0, sum_d2 = 0, sum_q = 0;
    };
    std::vector<BlockStat> blocks(kBlocks);
    for (long i = 0; i < n; ++i) {
        const long b = std::min<long>(i * kBlocks / n, kBlocks - 1);
        const double d = records[i].q1 - records[i].q2;
        blocks[b].count += 1.0;
        blocks[b].sum_d += d;
        blocks[b].sum_d2 += d * d;
        blocks[b].sum_q += records[i].q1 + records[i].q2;
    }

    const auto ratio = [&](const BlockStat& total) {
        const double mean_d = total.sum_d / total.count;
        const double var =
            (total.sum_d2 - total.count * mean_d * mean_d) / (total.count - 1.0);
        const double mean_sum = total.sum_q / total.count;
        if (std::abs(mean_sum) < 1e-300)
            throw std::invalid_argument("estimate_nrf: zero mean photon sum");
        return (var - noise_var) / (det.gain * mean_sum) / snl;
    };

    BlockStat all;
    for (const BlockStat& b : blocks) {
        all.count += b.count;
        all.sum_d += b.sum_d;
        all.sum_d2 += b.sum_d2;
        all.sum_q += b.sum_q;
    }

    NrfEstimate est;
    est.value = ratio(all);
    est.n_pulses = n;
    est.snl_reference = snl;

    std::mt19937_64 rng(mix_seed(0xB0075742ULL, n));
    std::uniform_int_distribution<int> pick(0, kBlocks - 1);
    double acc = 0.0, acc2 = 0.0;
    for (int r = 0; r < kResamples; ++r) {
        BlockStat total;
        for (int b = 0; b < kBlocks; ++b) {
            const BlockStat& s = blocks[pick(rng)];
            total.count += s.count;
            total.sum_d += s.sum_d;
            total.sum_d2 += s.sum_d2;
            total.sum_q += s.sum_q;
        }
        const double v = ratio(total);
        acc += v;
        acc2 += v * v;
    }
    const double mean_b = acc / kResamples;
    est.std_error =
        std::sqrt(std::max(0.0, acc2 / kResamples - mean_b * mean_b));
    return est;
}

CalibrationReport shot_noise_calibration(double mean_photons, int n_pulses,
                                         const DetectorModel& det,
                                         std::uint64_t seed) {
    if (mean_photons <= 0.0)
        throw std::invalid_argument(
            "shot_noise_calibration: photon level must be positive");
    // Coherent probe at +45 degrees in both bands; the HWP-at-0 analyzer
    // splits it equally between the detectors.
    GaussianState probe = vacuum_state();
    const double amp = std::sqrt(mean_photons / 4.0);
    Vec4c alpha;
    alpha << amp, amp, amp, amp;
    probe = apply_displacement(probe, alpha);

    const AnalyzerSetting setting{Plate::HWP, 0.0};
    const std::vector<PulseRecord> records =
        simulate_pulses(probe, setting, det, seed, n_pulses);
    const NrfEstimate est = estimate_nrf(records, det, 1.0);

    CalibrationReport rep;
    rep.snl = est.value;
    rep.snl_std_error = est.std_error;
    rep.electronic_variance = 2.0 * det.electronic_noise_sigma *
                              det.electronic_noise_sigma;
    rep.electronic_fraction = rep.electronic_variance / mean_photons;
    rep.n_pulses = n_pulses;
    return rep;
}

double wigner_bias_bound(const GaussianState& state) {
    const double s0 = quadratic_mean(state, Mat4c::Identity());
    return 1.0 / std::max(s0, 1.0);
}

}  // namespace polbell
