#pragma once

#include "polbell/detection_mc.hpp"
#include "polbell/fock_oracle.hpp"
#include "polbell/gaussian_state.hpp"
#include "polbell/optics_chain.hpp"
#include "polbell/stokes.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Config-driven experiment runs.  Config files are JSON; angles are degrees
// there and radians everywhere else.  Unknown keys are rejected.

namespace polbell {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class SourceKind { Bell, Mzi, Chain, Coherent };
enum class OutputFormat { Csv, Json };

struct ScenarioConfig {
    SourceKind source_kind = SourceKind::Bell;
    BellKind bell_kind = BellKind::PsiMinus;
    double gain = 0.0;            // squeezer gain (resolved from target_s0)
    double gain_imbalance = 0.0;  // gain_v = gain * (1 + imbalance), mzi only
    double source_s0 = 0.0;       // <S0> before loss
    double pump_phase = 3.14159265358979323846;
    bool dichroic = false;
    DichroicPlate plate{};
    double extra_rotation = 0.0;
    std::array<double, 4> eta{1.0, 1.0, 1.0, 1.0};
    DetectorModel detector{};
    bool dark_run = false;  // estimate electronic noise from a dark batch
    Plate sweep_plate = Plate::HWP;
    double sweep_start_deg = 0.0;
    double sweep_stop_deg = 90.0;
    double sweep_step_deg = 2.0;
    long mc_pulses = 0;  // 0 disables the Monte Carlo columns
    std::uint64_t mc_seed = 20260814;
    std::string out_path;  // empty writes to stdout
    OutputFormat out_format = OutputFormat::Csv;
};

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config_file(const std::string& path);

// Source, preparation optics and loss folded together (analyzer not
// included; that is the sweep's variable).
GaussianState build_scenario_state(const ScenarioConfig& cfg);

struct AnalyticReport {
    StokesReport stokes;
    UncertaintyReport uncertainty;
    bool has_bounds = false;  // twin-beam sources only
    NrfBounds bounds{};
    double wigner_bias = 0.0;
};

AnalyticReport run_analytic(const ScenarioConfig& cfg);

struct SweepRow {
    double angle_deg = 0.0;
    double nrf_analytic = 0.0;
    double nrf_mc = 0.0;      // NaN when MC is disabled
    double nrf_mc_err = 0.0;  // NaN when MC is disabled
    double mean_det1 = 0.0;   // normalized: <q1>/<q1+q2>
    double mean_det2 = 0.0;
};

std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg);

struct McResult {
    struct Row {
        std::string observable;
        Plate plate = Plate::HWP;
        double angle_deg = 0.0;
        double nrf = 0.0;
        double std_error = 0.0;
        double nrf_analytic = 0.0;
    };
    std::array<Row, 3> rows{};
    double snl = 1.0;
    double snl_std_error = 0.0;
    long n_pulses = 0;
};

// NRF estimates at the three canonical settings (HWP 0, HWP 22.5, QWP 45),
// normalized by a coherent-probe calibration at the configured photon level.
McResult run_mc(const ScenarioConfig& cfg);

struct CalibrationSummary {
    CalibrationReport report{};
    double photons_for_10x = 0.0;  // level where shot noise = 10x electronic
};

CalibrationSummary run_calibrate(const ScenarioConfig& cfg);

struct ValidationCheck {
    std::string name;
    bool pass = false;
    double value = 0.0;  // measured deviation
    double bound = 0.0;
};

struct ValidationReport {
    bool pass = false;
    double max_mean_deviation = 0.0;
    double max_variance_deviation = 0.0;
    std::vector<ValidationCheck> checks;
};

// Cross-checks the covariance implementation against the Fock oracle over
// all four states and a gamma grid, plus the analyzer rotation identities
// and the singlet higher moments.  max_gamma is capped at the oracle
// regime (1.5).
ValidationReport run_validate(double max_gamma, int cutoff);

// Same, with replaceable Stokes forms so the harness itself can be tested
// against a deliberately broken convention.
ValidationReport run_validate(double max_gamma, int cutoff,
                              const std::array<StokesForm, 4>& forms);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> sweep_from_csv(const std::string& text);
std::string sweep_to_json(const std::vector<SweepRow>& rows);
std::string analytic_to_json(const AnalyticReport& report);
std::string analytic_to_csv(const AnalyticReport& report);
std::string mc_to_json(const McResult& result);
std::string mc_to_csv(const McResult& result);
std::string calibration_to_json(const CalibrationSummary& summary);
std::string calibration_to_csv(const CalibrationSummary& summary);
std::string validation_to_json(const ValidationReport& report);
std::string validation_to_text(const ValidationReport& report);

}  // namespace polbell
