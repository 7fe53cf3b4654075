#include "polbell/detection_mc.hpp"
#include "polbell/fock_oracle.hpp"
#include "polbell/gaussian_state.hpp"
#include "polbell/optics_chain.hpp"
#include "polbell/rng.hpp"
#include "polbell/scenario.hpp"
#include "polbell/stokes.hpp"

#include <omp.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

// Release gate: one line per acceptance criterion, every tolerance pinned
// here.  Exit status is the number of failed criteria.

using namespace polbell;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(const char* pattern, double a, double b = 0.0,
                double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

bool close_rel(double value, double expected, double rel) {
    return std::abs(value - expected) <= rel * std::abs(expected);
}

// Criterion 1: the four states' variance table at n = 0.5, 1, 10,
// relative tolerance 1e-9.
bool criterion_variance_table(std::string& detail) {
    const std::array<BellKind, 4> kinds{BellKind::PsiMinus, BellKind::PsiPlus,
                                        BellKind::PhiMinus, BellKind::PhiPlus};
    const double pattern[4][3] = {
        {0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
    for (int ki = 0; ki < 4; ++ki) {
        for (double n : {0.5, 1.0, 10.0}) {
            const GaussianState s =
                make_bell_state(kinds[ki], std::asinh(std::sqrt(n)));
            const StokesReport rep = stokes_report(s);
            const double big = 8 * n * (n + 1);
            if (!close_rel(rep.variances[0], big, 1e-9)) {
                detail = fmt("var(S0) = %.12g, expected %.12g",
                             rep.variances[0], big);
                return false;
            }
            for (int k = 1; k <= 3; ++k) {
                const double expected = pattern[ki][k - 1] * big;
                if (std::abs(rep.variances[k] - expected) > 1e-9 * big) {
                    detail = fmt("var(S%.0f) = %.12g, expected %.12g",
                                 static_cast<double>(k), rep.variances[k],
                                 expected);
                    return false;
                }
            }
        }
    }
    return true;
}

// Criterion 2: <S0> = 4 sinh^2(g) and vanishing polarization means,
// tolerance 1e-10, at g = 0.1, 1, 7.
bool criterion_means(std::string& detail) {
    for (double g : {0.1, 1.0, 7.0}) {
        const GaussianState s = make_bell_state(BellKind::PsiMinus, g);
        const double s0 = quadratic_mean(s, stokes_form(0).m);
        const double expected = 4 * std::sinh(g) * std::sinh(g);
        if (!close_rel(s0, expected, 1e-10)) {
            detail = fmt("gain %.1f: <S0> = %.15g, expected %.15g", g, s0,
                         expected);
            return false;
        }
        for (int k = 1; k <= 3; ++k) {
            const double mean = quadratic_mean(s, stokes_form(k).m);
            if (std::abs(mean) > 1e-10 * std::max(s0, 1.0)) {
                detail = fmt("gain %.1f: <S%.0f> = %.3g", g,
                             static_cast<double>(k), mean);
                return false;
            }
        }
    }
    return true;
}

// Criterion 3: squeezed and anti-squeezed settings of the lossy states reach
// the analytic noise-ratio bounds, relative tolerance 1e-9, <S0> = 1e6.
bool criterion_bounds(std::string& detail) {
    const double gain = gain_for_target_s0(1e6);
    const double n = std::sinh(gain) * std::sinh(gain);
    for (double eta : {0.3, 0.65, 0.9}) {
        const NrfBounds bounds = nrf_bounds(n, eta);
        const std::array<double, 4> loss{eta, eta, eta, eta};

        const GaussianState minus =
            apply_loss(make_bell_state(BellKind::PsiMinus, gain), loss);
        const double s0 = quadratic_mean(minus, stokes_form(0).m);
        const double squeezed =
            quadratic_variance(minus, stokes_form(1).m) / s0;
        if (!close_rel(squeezed, bounds.min, 1e-9)) {
            detail = fmt("eta %.2f: squeezed ratio %.12g vs bound %.12g", eta,
                         squeezed, bounds.min);
            return false;
        }

        const GaussianState plus =
            apply_loss(make_bell_state(BellKind::PsiPlus, gain), loss);
        const double anti = quadratic_variance(plus, stokes_form(2).m) /
                            quadratic_mean(plus, stokes_form(0).m);
        if (!close_rel(anti, bounds.max, 1e-9)) {
            detail = fmt("eta %.2f: anti ratio %.12g vs bound %.12g", eta,
                         anti, bounds.max);
            return false;
        }
    }
    return true;
}

// Criterion 4: the interferometric preparation chain lands exactly on the
// anti-correlated state, covariance tolerance 1e-9, at g = 0.1, 1, 7.
bool criterion_chain(std::string& detail) {
    for (double g : {0.1, 1.0, 7.0}) {
        const GaussianState chain = preparation_chain(g, {1, 1, 1, 1});
        const GaussianState direct = make_bell_state(BellKind::PsiMinus, g);
        const double dev = static_cast<double>(
            (chain.cov - direct.cov).cwiseAbs().maxCoeff());
        if (dev > 1e-9) {
            detail = fmt("gain %.1f: max covariance deviation %.3g", g, dev);
            return false;
        }
    }
    return true;
}

// Criterion 5: covariance pipeline against the amplitude oracle, all four
// states, gamma up to 0.4 at cutoff 14, deviations below 1e-8.
bool criterion_oracle(std::string& detail) {
    const ValidationReport report = run_validate(0.4, 14);
    if (!report.pass) {
        for (const ValidationCheck& check : report.checks)
            if (!check.pass) {
                detail = check.name +
                         fmt(": value %.3g, bound %.3g", check.value,
                             check.bound);
                break;
            }
        return false;
    }
    if (report.max_mean_deviation >= 1e-8 ||
        report.max_variance_deviation >= 1e-8) {
        detail = fmt("max deviations %.3g / %.3g vs 1e-8",
                     report.max_mean_deviation,
                     report.max_variance_deviation);
        return false;
    }
    return true;
}

// Criterion 6: singlet moments <S_k^m> for m = 1..4 and the annihilation
// residual ||S_k |psi>||, all below 1e-8 at gamma = 0.3 (cutoff 18).
bool criterion_singlet_moments(std::string& detail) {
    const FockState f = build_fock_state(BellKind::PsiMinus, 0.3, 18);
    for (int k = 1; k <= 3; ++k) {
        for (int order = 1; order <= 4; ++order) {
            const double moment = std::abs(stokes_moment_fock(f, k, order));
            if (moment > 1e-8) {
                detail = fmt("<S%.0f^%.0f> = %.3g", static_cast<double>(k),
                             static_cast<double>(order), moment);
                return false;
            }
        }
        const double residual = stokes_residual_norm(f, k);
        if (residual > 1e-8) {
            detail = fmt("residual ||S%.0f psi|| = %.3g",
                         static_cast<double>(k), residual);
            return false;
        }
    }
    return true;
}

// Criterion 7: the singlet noise ratio is flat in the analyzer angle
// (analytic 1e-10 on a 1-degree grid; sampled within 3 sigma at 1e5 pulses),
// while psi-plus is modulated with extrema at the variance-table values.
bool criterion_flatness(std::string& detail) {
    const double eta = 0.65;
    const GaussianState state = apply_loss(
        make_bell_state(BellKind::PsiMinus, gain_for_target_s0(1e6)),
        {eta, eta, eta, eta});
    const double s0 = quadratic_mean(state, stokes_form(0).m);
    const double flat = 1.0 - eta;

    for (int deg = 0; deg <= 90; ++deg) {
        for (Plate plate : {Plate::HWP, Plate::QWP}) {
            const double nrf =
                quadratic_variance(
                    state,
                    rotated_form(stokes_form(1), plate, deg * kPi / 180.0).m) /
                s0;
            if (std::abs(nrf - flat) > 1e-10) {
                detail = fmt("analytic ratio at %.0f deg: %.15g",
                             static_cast<double>(deg), nrf);
                return false;
            }
        }
    }

    const DetectorModel det{};
    int index = 0;
    for (Plate plate : {Plate::HWP, Plate::QWP}) {
        for (int deg = 0; deg <= 90; deg += 5) {
            const auto records = simulate_pulses(
                state, {plate, deg * kPi / 180.0}, det,
                mix_seed(20260814, 7000 + index++), 100000);
            const NrfEstimate est = estimate_nrf(records, det);
            if (std::abs(est.value - flat) > 3 * est.std_error + 1e-4) {
                detail = fmt("sampled ratio %.4f +- %.4f at %.0f deg",
                             est.value, est.std_error,
                             static_cast<double>(deg));
                return false;
            }
        }
    }

    const double gain = gain_for_target_s0(1e6);
    const double n = std::sinh(gain) * std::sinh(gain);
    const GaussianState plus = make_bell_state(BellKind::PsiPlus, gain);
    const double plus_s0 = quadratic_mean(plus, stokes_form(0).m);
    const double table_max = 2.0 * (n + 1.0);
    struct Extremum {
        Plate plate;
        std::vector<double> max_at;
    };
    const Extremum cases[] = {{Plate::HWP, {22.5, 67.5}},
                              {Plate::QWP, {45.0}}};
    for (const Extremum& c : cases) {
        double best = -1.0, best_deg = -1.0, worst = 1e300;
        for (double deg = 0.0; deg <= 90.0; deg += 2.5) {
            const double nrf =
                quadratic_variance(
                    plus,
                    rotated_form(stokes_form(1), c.plate, deg * kPi / 180.0)
                        .m) /
                plus_s0;
            if (nrf > best) {
                best = nrf;
                best_deg = deg;
            }
            worst = std::min(worst, nrf);
        }
        if (!close_rel(best, table_max, 1e-9)) {
            detail = fmt("modulation max %.12g vs table %.12g", best,
                         table_max);
            return false;
        }
        bool at_expected = false;
        for (double deg : c.max_at)
            if (best_deg == deg) at_expected = true;
        if (!at_expected || worst > 1e-9 * table_max) {
            detail = fmt("modulation extrema misplaced: max at %g, min %.3g",
                         best_deg, worst);
            return false;
        }
    }
    return true;
}

// Criterion 8: sampled noise ratios of the lossy singlet at eta = 0.28 match
// 0.72 / 0.72 / 0.73 within 0.01 plus statistics, 1e5 pulses.
bool criterion_lossy_mc(std::string& detail) {
    const ScenarioConfig cfg = parse_config(R"({
        "source": {"kind": "bell", "bell": "psi_minus", "target_s0": 1e6},
        "loss": {"eta": 0.28},
        "mc": {"pulses": 100000, "seed": 20260814}
    })");
    const McResult result = run_mc(cfg);
    const double targets[3] = {0.72, 0.72, 0.73};
    for (int k = 0; k < 3; ++k) {
        const McResult::Row& row = result.rows[k];
        const double combined = std::sqrt(
            row.std_error * row.std_error +
            std::pow(row.nrf * result.snl_std_error / result.snl, 2));
        if (std::abs(row.nrf - targets[k]) > 0.01 + 3 * combined) {
            detail = fmt("S%.0f: %.4f vs target", static_cast<double>(k + 1),
                         row.nrf) +
                     fmt(" %.2f", targets[k]) + fmt(" (err %.4f)", combined);
            return false;
        }
    }
    return true;
}

// Criterion 9: coherent calibration gives snl = 1.000 +- 0.005 and an
// electronic-to-shot variance ratio of 0.065 at sigma_e = 180, 1e6 photons.
bool criterion_calibration(std::string& detail) {
    const ScenarioConfig cfg = parse_config(R"({
        "source": {"kind": "coherent", "target_s0": 1e6},
        "detector": {"electronic_noise_sigma": 180},
        "mc": {"pulses": 100000, "seed": 20260814}
    })");
    const CalibrationSummary summary = run_calibrate(cfg);
    if (std::abs(summary.report.snl - 1.0) > 0.005) {
        detail = fmt("snl = %.5f +- %.5f", summary.report.snl,
                     summary.report.snl_std_error);
        return false;
    }
    if (std::abs(summary.report.electronic_fraction - 0.0648) > 1e-9 ||
        std::abs(summary.report.electronic_fraction - 0.065) > 0.001) {
        detail =
            fmt("electronic fraction %.6f", summary.report.electronic_fraction);
        return false;
    }
    if (!close_rel(summary.photons_for_10x, 648000.0, 1e-12)) {
        detail = fmt("photons for 10x = %.6g", summary.photons_for_10x);
        return false;
    }
    return true;
}

// Criterion 10: uncertainty margins stay >= -1e-9 over 50 random states;
// polarized coherent states saturate their relation to 1e-6 relative.
bool criterion_uncertainty(std::string& detail) {
    std::mt19937_64 rng(2468);
    std::uniform_real_distribution<double> gain_dist(0.0, 1.2);
    std::uniform_real_distribution<double> phase_dist(0.0, 2 * kPi);
    std::uniform_real_distribution<double> eta_dist(0.5, 1.0);
    std::normal_distribution<double> amp_dist(0.0, 1.5);
    const int pairs[3][4] = {{0, 3, 1, 2}, {0, 2, 1, 3}, {0, 1, 2, 3}};

    for (int trial = 0; trial < 50; ++trial) {
        GaussianState s = vacuum_state();
        const int* p = pairs[trial % 3];
        s = apply_two_mode_squeeze(s, p[0], p[1], gain_dist(rng),
                                   phase_dist(rng));
        s = apply_two_mode_squeeze(s, p[2], p[3], gain_dist(rng),
                                   phase_dist(rng));
        Mat2c u;
        {
            Complex a{amp_dist(rng), amp_dist(rng)};
            Complex b{amp_dist(rng), amp_dist(rng)};
            const Real h = std::sqrt(std::norm(a) + std::norm(b));
            a /= h;
            b /= h;
            u << a, b, -std::conj(b), std::conj(a);
        }
        s = apply_passive_polarization_unitary(s, u, Band::Both);
        s = apply_loss(s, {eta_dist(rng), eta_dist(rng), eta_dist(rng),
                           eta_dist(rng)});
        Vec4c alpha;
        for (int m = 0; m < 4; ++m)
            alpha(m) = Complex{amp_dist(rng), amp_dist(rng)};
        s = apply_displacement(s, alpha);

        const UncertaintyReport rep = uncertainty_check(s);
        for (int k = 0; k < 3; ++k)
            if (rep.margins[k] < -1e-9) {
                detail = fmt("trial %.0f margin %.0f = %.3g",
                             static_cast<double>(trial),
                             static_cast<double>(k + 1), rep.margins[k]);
                return false;
            }
    }

    const double big = 1e6;
    const double r2 = std::sqrt(big / 2.0), r4 = std::sqrt(big / 4.0);
    Vec4c h_pol, diag_pol, circ_pol;
    h_pol << r2, 0.0, r2, 0.0;
    diag_pol << r4, r4, r4, r4;
    circ_pol << Complex{r4, 0.0}, Complex{0.0, r4}, Complex{r4, 0.0},
        Complex{0.0, r4};
    const std::array<std::pair<Vec4c, int>, 3> probes{
        {{h_pol, 0}, {diag_pol, 1}, {circ_pol, 2}}};
    for (const auto& [alpha, index] : probes) {
        const GaussianState s = apply_displacement(vacuum_state(), alpha);
        const UncertaintyReport rep = uncertainty_check(s);
        if (std::abs(rep.margins[index]) > 1e-6 * big) {
            detail = fmt("coherent margin %.0f = %.3g",
                         static_cast<double>(index + 1), rep.margins[index]);
            return false;
        }
    }
    return true;
}

// Criterion 11: identical config and seed give byte-identical output for any
// thread count.
bool criterion_determinism(std::string& detail) {
    const ScenarioConfig cfg = parse_config(R"({
        "source": {"kind": "bell", "bell": "psi_minus", "target_s0": 1e6},
        "loss": {"eta": 0.65},
        "sweep": {"plate": "hwp", "start_deg": 0, "stop_deg": 10,
                  "step_deg": 5},
        "mc": {"pulses": 5000, "seed": 20260814}
    })");
    const int original = omp_get_max_threads();
    omp_set_num_threads(1);
    const std::string serial_csv = sweep_to_csv(run_sweep(cfg));
    const std::string serial_mc = mc_to_csv(run_mc(cfg));
    omp_set_num_threads(std::max(original, 2));
    const std::string parallel_csv = sweep_to_csv(run_sweep(cfg));
    const std::string parallel_mc = mc_to_csv(run_mc(cfg));
    const std::string repeat_csv = sweep_to_csv(run_sweep(cfg));
    omp_set_num_threads(original);
    if (serial_csv != parallel_csv || parallel_csv != repeat_csv) {
        detail = "sweep output differs across runs or thread counts";
        return false;
    }
    if (serial_mc != parallel_mc) {
        detail = "mc output differs across thread counts";
        return false;
    }
    return true;
}

struct Criterion {
    int id;
    const char* what;
    std::function<bool(std::string&)> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "variance table of the four states at n = 0.5, 1, 10 (rel 1e-9)",
         criterion_variance_table},
        {2, "photon mean 4 sinh^2(g), zero polarization means (1e-10)",
         criterion_means},
        {3, "noise-ratio bounds reached at eta = 0.3, 0.65, 0.9 (rel 1e-9)",
         criterion_bounds},
        {4, "preparation chain reproduces the anti-correlated state (1e-9)",
         criterion_chain},
        {5, "covariance pipeline matches the amplitude oracle (1e-8)",
         criterion_oracle},
        {6, "singlet moments and residuals vanish at gamma 0.3 (1e-8)",
         criterion_singlet_moments},
        {7, "noise ratio flat for the singlet, table extrema for psi-plus",
         criterion_flatness},
        {8, "sampled lossy ratios 0.72/0.72/0.73 at eta 0.28 (+-0.01)",
         criterion_lossy_mc},
        {9, "calibration snl 1.000 +- 0.005, electronic fraction 0.065",
         criterion_calibration},
        {10, "uncertainty margins >= -1e-9; coherent saturation (rel 1e-6)",
         criterion_uncertainty},
        {11, "byte-identical output across repeats and thread counts",
         criterion_determinism},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          t0)
                .count();
        std::printf("[%s] criterion %2d: %s (%.1f s)\n", ok ? "PASS" : "FAIL",
                    c.id, c.what, dt);
        if (!ok) {
            if (!detail.empty()) std::printf("        %s\n", detail.c_str());
            ++failures;
        }
    }
    if (failures == 0)
        std::printf("all %d criteria passed\n",
                    static_cast<int>(criteria.size()));
    else
        std::printf("%d of %d criteria FAILED\n", failures,
                    static_cast<int>(criteria.size()));
    return failures;
}
