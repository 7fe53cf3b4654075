#include "polbell/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitValidation = 3;
constexpr int kExitRuntime = 4;

int write_output(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return kExitOk;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write " << path << "\n";
        return kExitRuntime;
    }
    out << text;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Polarization Bell-state simulator: analytic Stokes reports, "
        "analyzer-angle sweeps, detection Monte Carlo, oracle validation "
        "and shot-noise calibration"};
    app.require_subcommand(1);

    std::string config_path, out_path, format;
    long long seed = -1;
    long pulses = -1;
    double max_gamma = 0.4;
    int cutoff = 14;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "scenario config file (JSON)")
            ->required();
        sub->add_option("--seed", seed, "override mc.seed");
        sub->add_option("--pulses", pulses, "override mc.pulses");
        sub->add_option(
            "--out", out_path,
            "output path ('-' forces stdout; default: config output.path)");
        sub->add_option("--format", format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    CLI::App* analytic = app.add_subcommand(
        "analytic", "Stokes means, variances, NRF and uncertainty margins");
    add_common(analytic);
    CLI::App* sweep = app.add_subcommand(
        "sweep", "NRF versus analyzer plate angle, analytic and Monte Carlo");
    add_common(sweep);
    CLI::App* mc = app.add_subcommand(
        "mc", "Calibrated NRF estimates at the three canonical settings");
    add_common(mc);
    CLI::App* calibrate =
        app.add_subcommand("calibrate", "Coherent-probe shot-noise calibration");
    add_common(calibrate);

    CLI::App* validate = app.add_subcommand(
        "validate", "Cross-check the covariance core against the Fock oracle");
    validate->add_option("--max-gamma", max_gamma,
                         "largest squeezer gain on the grid (<= 1.5)");
    validate->add_option("--cutoff", cutoff, "Fock cutoff per mode");
    validate->add_option("--out", out_path, "output path (default stdout)");
    validate->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            const polbell::ValidationReport report =
                polbell::run_validate(max_gamma, cutoff);
            const std::string text = (format == "json")
                                         ? polbell::validation_to_json(report)
                                         : polbell::validation_to_text(report);
            const int rc = write_output(text, out_path);
            if (rc != kExitOk) return rc;
            return report.pass ? kExitOk : kExitValidation;
        }

        polbell::ScenarioConfig cfg = polbell::load_config_file(config_path);
        if (seed >= 0) cfg.mc_seed = static_cast<std::uint64_t>(seed);
        if (pulses >= 0) {
            if (pulses < 100)
                throw polbell::ConfigError("--pulses: must be >= 100");
            cfg.mc_pulses = pulses;
        }
        if (!out_path.empty()) cfg.out_path = out_path;
        if (!format.empty())
            cfg.out_format = (format == "json") ? polbell::OutputFormat::Json
                                                : polbell::OutputFormat::Csv;
        const bool json = cfg.out_format == polbell::OutputFormat::Json;

        std::string text;
        if (analytic->parsed()) {
            const polbell::AnalyticReport report = polbell::run_analytic(cfg);
            text = json ? polbell::analytic_to_json(report)
                        : polbell::analytic_to_csv(report);
        } else if (sweep->parsed()) {
            const std::vector<polbell::SweepRow> rows = polbell::run_sweep(cfg);
            text = json ? polbell::sweep_to_json(rows)
                        : polbell::sweep_to_csv(rows);
        } else if (mc->parsed()) {
            const polbell::McResult result = polbell::run_mc(cfg);
            text = json ? polbell::mc_to_json(result)
                        : polbell::mc_to_csv(result);
        } else {
            const polbell::CalibrationSummary summary =
                polbell::run_calibrate(cfg);
            text = json ? polbell::calibration_to_json(summary)
                        : polbell::calibration_to_csv(summary);
        }
        return write_output(text, cfg.out_path);
    } catch (const polbell::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
