#include "polbell/scenario.hpp"

#include "polbell/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

namespace polbell {

namespace {

constexpr double kPi = 3.14159265358979323846;

using nlohmann::json;

double deg2rad(double deg) { return deg * kPi / 180.0; }

std::string fmt9(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string join_path(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed,
                std::vector<std::string>& errors) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known)
            errors.push_back("config: " + join_path(path, it.key()) +
                             ": unknown key");
    }
}

double get_number(const json& obj, const std::string& path,
                  const std::string& key, double fallback,
                  std::vector<std::string>& errors) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) {
        errors.push_back("config: " + join_path(path, key) +
                         ": expected a number");
        return fallback;
    }
    return v.get<double>();
}

bool get_bool(const json& obj, const std::string& path, const std::string& key,
              bool fallback, std::vector<std::string>& errors) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) {
        errors.push_back("config: " + join_path(path, key) +
                         ": expected a boolean");
        return fallback;
    }
    return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& path,
                       const std::string& key, const std::string& fallback,
                       std::vector<std::string>& errors) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) {
        errors.push_back("config: " + join_path(path, key) +
                         ": expected a string");
        return fallback;
    }
    return v.get<std::string>();
}

const json* get_object(const json& obj, const std::string& key,
                       std::vector<std::string>& errors) {
    if (!obj.contains(key)) return nullptr;
    const json& v = obj.at(key);
    if (!v.is_object()) {
        errors.push_back("config: " + key + ": expected an object");
        return nullptr;
    }
    return &v;
}

std::string plate_name(Plate plate) {
    return plate == Plate::HWP ? "hwp" : "qwp";
}

// Electronic-noise model used for variance subtraction.  With dark_run the
// sigma is re-estimated from a light-blocked batch instead of trusting the
// configured value.
DetectorModel subtraction_model(const ScenarioConfig& cfg) {
    if (!cfg.dark_run || cfg.mc_pulses <= 0) return cfg.detector;
    const DetectorModel& det = cfg.detector;
    long double acc = 0.0L, acc2 = 0.0L;
    for (long i = 0; i < cfg.mc_pulses; ++i) {
        std::mt19937_64 rng(
            mix_seed(cfg.mc_seed, 0xDA44000000ULL + static_cast<std::uint64_t>(i)));
        std::normal_distribution<double> gauss(0.0, 1.0);
        double d = det.gain * det.electronic_noise_sigma * gauss(rng) -
                   det.gain * det.electronic_noise_sigma * gauss(rng);
        acc += d;
        acc2 += static_cast<long double>(d) * d;
    }
    double mean = static_cast<double>(acc / cfg.mc_pulses);
    double var = static_cast<double>(acc2 / cfg.mc_pulses) - mean * mean;
    DetectorModel eff = det;
    eff.electronic_noise_sigma =
        std::sqrt(std::max(var, 0.0) / 2.0) / det.gain;
    return eff;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!root.is_object())
        throw ConfigError("config: top level must be an object");

    std::vector<std::string> errors;
    ScenarioConfig cfg;
    check_keys(root, "",
               {"source", "optics", "loss", "detector", "sweep", "mc",
                "output"},
               errors);

    bool has_gain = false, has_target = false;
    if (const json* src = get_object(root, "source", errors)) {
        check_keys(*src, "source",
                   {"kind", "bell", "gain", "target_s0", "pump_phase_deg",
                    "gain_imbalance"},
                   errors);
        std::string kind = get_string(*src, "source", "kind", "", errors);
        if (kind == "bell") {
            cfg.source_kind = SourceKind::Bell;
        } else if (kind == "mzi") {
            cfg.source_kind = SourceKind::Mzi;
        } else if (kind == "chain") {
            cfg.source_kind = SourceKind::Chain;
        } else if (kind == "coherent") {
            cfg.source_kind = SourceKind::Coherent;
        } else {
            errors.push_back(
                "config: source.kind: must be one of bell, mzi, chain, "
                "coherent");
        }

        if (src->contains("bell")) {
            std::string bell = get_string(*src, "source", "bell", "", errors);
            if (bell == "psi_minus")
                cfg.bell_kind = BellKind::PsiMinus;
            else if (bell == "psi_plus")
                cfg.bell_kind = BellKind::PsiPlus;
            else if (bell == "phi_minus")
                cfg.bell_kind = BellKind::PhiMinus;
            else if (bell == "phi_plus")
                cfg.bell_kind = BellKind::PhiPlus;
            else
                errors.push_back(
                    "config: source.bell: must be one of psi_minus, "
                    "psi_plus, phi_minus, phi_plus");
            if (kind != "bell")
                errors.push_back(
                    "config: source.bell: only valid for kind 'bell'");
        }

        has_gain = src->contains("gain");
        has_target = src->contains("target_s0");
        double gain = get_number(*src, "source", "gain", 0.0, errors);
        double target = get_number(*src, "source", "target_s0", 0.0, errors);
        if (cfg.source_kind == SourceKind::Coherent) {
            if (has_gain)
                errors.push_back(
                    "config: source.gain: not valid for a coherent source "
                    "(use target_s0)");
            if (!has_target)
                errors.push_back(
                    "config: source.target_s0: required for a coherent "
                    "source");
        } else if (has_gain == has_target) {
            errors.push_back(
                "config: source: exactly one of gain / target_s0 must be "
                "given");
        }
        if (has_gain && gain <= 0.0)
            errors.push_back("config: source.gain: must be > 0");
        if (has_target && target <= 0.0)
            errors.push_back("config: source.target_s0: must be > 0");
        if (has_gain && gain > 0.0) {
            cfg.gain = gain;
            cfg.source_s0 = 4.0 * std::sinh(gain) * std::sinh(gain);
        }
        if (has_target && target > 0.0) {
            cfg.source_s0 = target;
            if (cfg.source_kind != SourceKind::Coherent)
                cfg.gain = gain_for_target_s0(target);
        }

        if (src->contains("pump_phase_deg")) {
            if (cfg.source_kind != SourceKind::Mzi)
                errors.push_back(
                    "config: source.pump_phase_deg: only valid for kind "
                    "'mzi'");
            cfg.pump_phase = deg2rad(
                get_number(*src, "source", "pump_phase_deg", 180.0, errors));
        }
        if (src->contains("gain_imbalance")) {
            if (cfg.source_kind != SourceKind::Mzi)
                errors.push_back(
                    "config: source.gain_imbalance: only valid for kind "
                    "'mzi'");
            cfg.gain_imbalance =
                get_number(*src, "source", "gain_imbalance", 0.0, errors);
            if (cfg.gain_imbalance <= -1.0)
                errors.push_back(
                    "config: source.gain_imbalance: must be > -1");
        }
    } else if (!root.contains("source")) {
        errors.push_back("config: source: required");
    }

    if (const json* opt = get_object(root, "optics", errors)) {
        check_keys(*opt, "optics",
                   {"dichroic", "dichroic_axis_deg",
                    "dichroic_retardance_w1_deg", "dichroic_retardance_w2_deg",
                    "extra_rotation_deg"},
                   errors);
        cfg.dichroic = get_bool(*opt, "optics", "dichroic", false, errors);
        for (const char* key :
             {"dichroic_axis_deg", "dichroic_retardance_w1_deg",
              "dichroic_retardance_w2_deg"})
            if (opt->contains(key) && !cfg.dichroic)
                errors.push_back(std::string("config: optics.") + key +
                                 ": requires dichroic: true");
        cfg.plate.axis_angle = deg2rad(
            get_number(*opt, "optics", "dichroic_axis_deg", 0.0, errors));
        cfg.plate.retardance_w1 = deg2rad(get_number(
            *opt, "optics", "dichroic_retardance_w1_deg", 180.0, errors));
        cfg.plate.retardance_w2 = deg2rad(get_number(
            *opt, "optics", "dichroic_retardance_w2_deg", 0.0, errors));
        cfg.extra_rotation = deg2rad(
            get_number(*opt, "optics", "extra_rotation_deg", 0.0, errors));
    }

    if (const json* loss = get_object(root, "loss", errors)) {
        check_keys(*loss, "loss", {"eta"}, errors);
        if (loss->contains("eta")) {
            const json& eta = loss->at("eta");
            if (eta.is_number()) {
                cfg.eta.fill(eta.get<double>());
            } else if (eta.is_array() && eta.size() == 4) {
                bool ok = true;
                for (int m = 0; m < 4; ++m) {
                    if (!eta[m].is_number()) ok = false;
                }
                if (ok)
                    for (int m = 0; m < 4; ++m) cfg.eta[m] = eta[m].get<double>();
                else
                    errors.push_back(
                        "config: loss.eta: entries must be numbers");
            } else {
                errors.push_back(
                    "config: loss.eta: expected a number or a 4-element "
                    "array");
            }
            for (double e : cfg.eta)
                if (e < 0.0 || e > 1.0) {
                    errors.push_back(
                        "config: loss.eta: efficiencies must lie in [0, 1]");
                    break;
                }
        }
    }

    if (const json* det = get_object(root, "detector", errors)) {
        check_keys(*det, "detector",
                   {"electronic_noise_sigma", "gain", "dark_run"}, errors);
        cfg.detector.electronic_noise_sigma = get_number(
            *det, "detector", "electronic_noise_sigma", 180.0, errors);
        cfg.detector.gain = get_number(*det, "detector", "gain", 1.0, errors);
        cfg.dark_run = get_bool(*det, "detector", "dark_run", false, errors);
        if (cfg.detector.electronic_noise_sigma < 0.0)
            errors.push_back(
                "config: detector.electronic_noise_sigma: must be >= 0");
        if (cfg.detector.gain <= 0.0)
            errors.push_back("config: detector.gain: must be > 0");
    }

    if (const json* sweep = get_object(root, "sweep", errors)) {
        check_keys(*sweep, "sweep", {"plate", "start_deg", "stop_deg", "step_deg"},
                   errors);
        std::string plate =
            get_string(*sweep, "sweep", "plate", "hwp", errors);
        if (plate == "hwp")
            cfg.sweep_plate = Plate::HWP;
        else if (plate == "qwp")
            cfg.sweep_plate = Plate::QWP;
        else
            errors.push_back("config: sweep.plate: must be hwp or qwp");
        cfg.sweep_start_deg =
            get_number(*sweep, "sweep", "start_deg", 0.0, errors);
        cfg.sweep_stop_deg =
            get_number(*sweep, "sweep", "stop_deg", 90.0, errors);
        cfg.sweep_step_deg =
            get_number(*sweep, "sweep", "step_deg", 2.0, errors);
        if (cfg.sweep_step_deg <= 0.0)
            errors.push_back("config: sweep.step_deg: must be > 0");
        if (cfg.sweep_stop_deg < cfg.sweep_start_deg)
            errors.push_back(
                "config: sweep.stop_deg: must be >= sweep.start_deg");
    }

    if (const json* mc = get_object(root, "mc", errors)) {
        check_keys(*mc, "mc", {"pulses", "seed"}, errors);
        double pulses = get_number(*mc, "mc", "pulses", 0.0, errors);
        if (pulses != std::floor(pulses) || pulses < 100 || pulses > 2e9)
            errors.push_back(
                "config: mc.pulses: must be an integer >= 100");
        else
            cfg.mc_pulses = static_cast<long>(pulses);
        double seed = get_number(*mc, "mc", "seed",
                                 static_cast<double>(cfg.mc_seed), errors);
        if (seed != std::floor(seed) || seed < 0)
            errors.push_back("config: mc.seed: must be a non-negative integer");
        else
            cfg.mc_seed = static_cast<std::uint64_t>(seed);
    }

    if (const json* out = get_object(root, "output", errors)) {
        check_keys(*out, "output", {"path", "format"}, errors);
        cfg.out_path = get_string(*out, "output", "path", "", errors);
        std::string format =
            get_string(*out, "output", "format", "csv", errors);
        if (format == "csv")
            cfg.out_format = OutputFormat::Csv;
        else if (format == "json")
            cfg.out_format = OutputFormat::Json;
        else
            errors.push_back("config: output.format: must be csv or json");
    }

    if (!errors.empty()) {
        std::string msg;
        for (std::size_t i = 0; i < errors.size(); ++i) {
            if (i) msg += "\n";
            msg += errors[i];
        }
        throw ConfigError(msg);
    }
    return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot read file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

GaussianState build_scenario_state(const ScenarioConfig& cfg) {
    GaussianState state;
    const std::array<double, 4> lossless{1.0, 1.0, 1.0, 1.0};
    switch (cfg.source_kind) {
        case SourceKind::Bell:
            state = make_bell_state(cfg.bell_kind, cfg.gain);
            break;
        case SourceKind::Mzi: {
            SourceConfig src;
            src.gain_h = cfg.gain;
            src.gain_v = cfg.gain * (1.0 + cfg.gain_imbalance);
            src.pump_phase = cfg.pump_phase;
            src.eta = lossless;
            state = mzi_source(src);
            break;
        }
        case SourceKind::Chain:
            state = preparation_chain(cfg.gain, lossless);
            break;
        case SourceKind::Coherent:
            state = coherent_source(cfg.source_s0);
            break;
    }
    if (cfg.extra_rotation != 0.0)
        state = apply_passive_polarization_unitary(
            state, rotation_jones(cfg.extra_rotation), Band::Both);
    if (cfg.dichroic) state = apply_dichroic_plate(state, cfg.plate);
    return apply_loss(state, cfg.eta);
}

AnalyticReport run_analytic(const ScenarioConfig& cfg) {
    GaussianState state = build_scenario_state(cfg);
    AnalyticReport report;
    report.stokes = stokes_report(state);
    report.uncertainty = uncertainty_check(state);
    bool uniform = cfg.eta[0] == cfg.eta[1] && cfg.eta[0] == cfg.eta[2] &&
                   cfg.eta[0] == cfg.eta[3];
    if (cfg.source_kind != SourceKind::Coherent && uniform &&
        cfg.gain_imbalance == 0.0) {
        report.has_bounds = true;
        double n = std::sinh(cfg.gain) * std::sinh(cfg.gain);
        report.bounds = nrf_bounds(n, cfg.eta[0]);
    }
    report.wigner_bias = wigner_bias_bound(state);
    return report;
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg) {
    GaussianState state = build_scenario_state(cfg);
    const StokesForm s0 = stokes_form(0);
    const StokesForm s1 = stokes_form(1);
    const double s0_mean = quadratic_mean(state, s0.m);
    const DetectorModel sub = subtraction_model(cfg);

    long steps = static_cast<long>(
        std::floor((cfg.sweep_stop_deg - cfg.sweep_start_deg) /
                       cfg.sweep_step_deg +
                   1e-9));
    steps = std::max<long>(steps, 0);

    std::vector<SweepRow> rows;
    rows.reserve(steps + 1);
    for (long i = 0; i <= steps; ++i) {
        double angle_deg = cfg.sweep_start_deg + i * cfg.sweep_step_deg;
        if (angle_deg > cfg.sweep_stop_deg + 1e-9) break;
        double theta = deg2rad(angle_deg);
        StokesForm rotated = rotated_form(s1, cfg.sweep_plate, theta);

        SweepRow row;
        row.angle_deg = angle_deg;
        row.nrf_analytic = quadratic_variance(state, rotated.m) / s0_mean;
        if (cfg.mc_pulses > 0) {
            AnalyzerSetting setting{cfg.sweep_plate, theta};
            auto records =
                simulate_pulses(state, setting, cfg.detector,
                                mix_seed(cfg.mc_seed, static_cast<std::uint64_t>(i)),
                                static_cast<int>(cfg.mc_pulses));
            NrfEstimate est = estimate_nrf(records, sub, 1.0);
            row.nrf_mc = est.value;
            row.nrf_mc_err = est.std_error;
            long double q1 = 0.0L, q2 = 0.0L;
            for (const PulseRecord& r : records) {
                q1 += r.q1;
                q2 += r.q2;
            }
            double total = static_cast<double>(q1 + q2);
            row.mean_det1 = static_cast<double>(q1) / total;
            row.mean_det2 = static_cast<double>(q2) / total;
        } else {
            double rot_mean = quadratic_mean(state, rotated.m);
            row.nrf_mc = std::nan("");
            row.nrf_mc_err = std::nan("");
            row.mean_det1 = (s0_mean + rot_mean) / (2.0 * s0_mean);
            row.mean_det2 = (s0_mean - rot_mean) / (2.0 * s0_mean);
        }
        rows.push_back(row);
    }
    return rows;
}

McResult run_mc(const ScenarioConfig& cfg) {
    if (cfg.mc_pulses <= 0)
        throw ConfigError("config: mc.pulses: required for mc runs");
    GaussianState state = build_scenario_state(cfg);
    const StokesForm s0 = stokes_form(0);
    const StokesForm s1 = stokes_form(1);
    const double s0_mean = quadratic_mean(state, s0.m);

    CalibrationReport cal = shot_noise_calibration(
        s0_mean, static_cast<int>(cfg.mc_pulses), cfg.detector,
        mix_seed(cfg.mc_seed, 901));
    const DetectorModel sub = subtraction_model(cfg);

    const std::array<AnalyzerSetting, 3> settings{{
        {Plate::HWP, 0.0},
        {Plate::HWP, kPi / 8.0},
        {Plate::QWP, kPi / 4.0},
    }};
    const std::array<const char*, 3> labels{"S1", "S2", "S3"};

    McResult result;
    for (int k = 0; k < 3; ++k) {
        auto records = simulate_pulses(
            state, settings[k], cfg.detector,
            mix_seed(cfg.mc_seed, static_cast<std::uint64_t>(k + 1)),
            static_cast<int>(cfg.mc_pulses));
        NrfEstimate est = estimate_nrf(records, sub, cal.snl);
        StokesForm rotated =
            rotated_form(s1, settings[k].plate, settings[k].angle);
        McResult::Row& row = result.rows[k];
        row.observable = labels[k];
        row.plate = settings[k].plate;
        row.angle_deg = settings[k].angle * 180.0 / kPi;
        row.nrf = est.value;
        row.std_error = est.std_error;
        row.nrf_analytic = quadratic_variance(state, rotated.m) / s0_mean;
    }
    result.snl = cal.snl;
    result.snl_std_error = cal.snl_std_error;
    result.n_pulses = cfg.mc_pulses;
    return result;
}

CalibrationSummary run_calibrate(const ScenarioConfig& cfg) {
    if (cfg.source_kind != SourceKind::Coherent)
        throw ConfigError(
            "config: source.kind: calibrate requires a coherent source");
    if (cfg.mc_pulses <= 0)
        throw ConfigError("config: mc.pulses: required for calibration");
    GaussianState state = build_scenario_state(cfg);
    double level = quadratic_mean(state, stokes_form(0).m);
    CalibrationSummary summary;
    summary.report = shot_noise_calibration(
        level, static_cast<int>(cfg.mc_pulses), cfg.detector,
        mix_seed(cfg.mc_seed, 901));
    double sigma = cfg.detector.electronic_noise_sigma;
    summary.photons_for_10x = 20.0 * sigma * sigma;
    return summary;
}

namespace {

void add_check(ValidationReport& report, const std::string& name,
               double value, double bound) {
    ValidationCheck check;
    check.name = name;
    check.value = value;
    check.bound = bound;
    check.pass = value <= bound;
    report.checks.push_back(check);
}

double form_distance(const StokesForm& a, const Mat4c& b) {
    return (a.m - b).cwiseAbs().maxCoeff();
}

const char* kind_name(BellKind kind) {
    switch (kind) {
        case BellKind::PsiMinus: return "psi_minus";
        case BellKind::PsiPlus: return "psi_plus";
        case BellKind::PhiMinus: return "phi_minus";
        case BellKind::PhiPlus: return "phi_plus";
    }
    return "?";
}

}  // namespace

ValidationReport run_validate(double max_gamma, int cutoff) {
    return run_validate(max_gamma, cutoff,
                        {stokes_form(0), stokes_form(1), stokes_form(2),
                         stokes_form(3)});
}

ValidationReport run_validate(double max_gamma, int cutoff,
                              const std::array<StokesForm, 4>& forms) {
    if (!(max_gamma > 0.0) || max_gamma > 1.5)
        throw std::invalid_argument(
            "run_validate: max_gamma must lie in (0, 1.5]");
    if (cutoff < 4 || cutoff > 60)
        throw std::invalid_argument("run_validate: cutoff must lie in [4, 60]");

    ValidationReport report;
    const double id_tol = 1e-10;

    add_check(report, "rotation_hwp_22.5deg_s1_to_s2",
              form_distance(rotated_form(forms[1], Plate::HWP, kPi / 8.0),
                            forms[2].m),
              id_tol);
    add_check(report, "rotation_qwp_45deg_s1_to_s3",
              form_distance(rotated_form(forms[1], Plate::QWP, kPi / 4.0),
                            forms[3].m),
              id_tol);
    {
        double theta = deg2rad(10.0);
        Mat4c expected = Complex(std::cos(4.0 * theta)) * forms[1].m +
                         Complex(std::sin(4.0 * theta)) * forms[2].m;
        add_check(report, "rotation_hwp_10deg_cos4t_s1_plus_sin4t_s2",
                  form_distance(rotated_form(forms[1], Plate::HWP, theta),
                                expected),
                  id_tol);
    }

    const std::array<BellKind, 4> kinds{BellKind::PsiMinus, BellKind::PsiPlus,
                                        BellKind::PhiMinus, BellKind::PhiPlus};
    const double dim_scale = 4.0 * (cutoff + 1);

    for (BellKind kind : kinds) {
        for (int step = 1;; ++step) {
            double gamma = 0.1 * step;
            if (gamma > max_gamma + 1e-12) break;
            FockState fock = build_fock_state(kind, gamma, cutoff);
            GaussianState gauss = make_bell_state(kind, gamma);
            double tail = truncation_tail(gamma, cutoff);
            double mean_bound = std::max(1e-9, 4.0 * tail * dim_scale);
            double var_bound =
                std::max(1e-9, 4.0 * tail * dim_scale * dim_scale);
            for (int k = 0; k < 4; ++k) {
                double mean_f = stokes_moment_fock(fock, k, 1);
                double mean_g = quadratic_mean(gauss, forms[k].m);
                double var_f =
                    stokes_moment_fock(fock, k, 2) - mean_f * mean_f;
                double var_g = quadratic_variance(gauss, forms[k].m);
                char name[96];
                std::snprintf(name, sizeof name, "%s_gamma_%.1f_mean_s%d",
                              kind_name(kind), gamma, k);
                add_check(report, name, std::abs(mean_f - mean_g),
                          mean_bound);
                report.max_mean_deviation = std::max(
                    report.max_mean_deviation, std::abs(mean_f - mean_g));
                std::snprintf(name, sizeof name, "%s_gamma_%.1f_var_s%d",
                              kind_name(kind), gamma, k);
                add_check(report, name, std::abs(var_f - var_g), var_bound);
                report.max_variance_deviation = std::max(
                    report.max_variance_deviation, std::abs(var_f - var_g));
            }
        }
    }

    const double singlet_gamma = std::min(0.3, max_gamma);
    {
        FockState fock =
            build_fock_state(BellKind::PsiMinus, singlet_gamma, cutoff);
        GaussianState gauss = make_bell_state(BellKind::PsiMinus, singlet_gamma);
        auto [mean_f, cov_f] = covariance_from_fock(fock);
        double cov_dev = (cov_f - gauss.cov).cwiseAbs().maxCoeff();
        double mean_dev = (mean_f - gauss.mean).cwiseAbs().maxCoeff();
        double tail = truncation_tail(singlet_gamma, cutoff);
        double bound = std::max(1e-9, 4.0 * tail * dim_scale * dim_scale);
        add_check(report, "singlet_covariance_route_cov", cov_dev, bound);
        add_check(report, "singlet_covariance_route_mean", mean_dev,
                  std::max(1e-9, 4.0 * tail * dim_scale));

        double t = std::tanh(singlet_gamma);
        double residual_bound = std::max(
            1e-8, 5.66 * cutoff * std::pow(t, cutoff + 1) / (1.0 - t * t));
        for (int k = 1; k <= 3; ++k) {
            for (int order = 1; order <= 4; ++order) {
                char name[96];
                std::snprintf(name, sizeof name,
                              "singlet_gamma_%.1f_moment_s%d_order_%d",
                              singlet_gamma, k, order);
                add_check(report, name,
                          std::abs(stokes_moment_fock(fock, k, order)), 1e-8);
            }
            char name[96];
            std::snprintf(name, sizeof name,
                          "singlet_gamma_%.1f_residual_s%d", singlet_gamma,
                          k);
            add_check(report, name, stokes_residual_norm(fock, k),
                      residual_bound);
        }
    }

    report.pass = true;
    for (const ValidationCheck& check : report.checks)
        if (!check.pass) report.pass = false;
    return report;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string out =
        "angle_deg,nrf_analytic,nrf_mc,nrf_mc_err,mean_det1,mean_det2\n";
    for (const SweepRow& row : rows) {
        out += fmt9(row.angle_deg) + "," + fmt9(row.nrf_analytic) + "," +
               fmt9(row.nrf_mc) + "," + fmt9(row.nrf_mc_err) + "," +
               fmt9(row.mean_det1) + "," + fmt9(row.mean_det2) + "\n";
    }
    return out;
}

std::vector<SweepRow> sweep_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) ||
        line != "angle_deg,nrf_analytic,nrf_mc,nrf_mc_err,mean_det1,mean_det2")
        throw std::runtime_error("sweep csv: missing or unexpected header");
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<double, 6> fields{};
        std::size_t pos = 0;
        for (int f = 0; f < 6; ++f) {
            std::size_t next = line.find(',', pos);
            if ((f < 5) != (next != std::string::npos))
                throw std::runtime_error("sweep csv: malformed row: " + line);
            std::string cell = line.substr(
                pos, next == std::string::npos ? next : next - pos);
            char* end = nullptr;
            fields[f] = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str())
                throw std::runtime_error("sweep csv: bad number: " + cell);
            pos = next + 1;
        }
        SweepRow row;
        row.angle_deg = fields[0];
        row.nrf_analytic = fields[1];
        row.nrf_mc = fields[2];
        row.nrf_mc_err = fields[3];
        row.mean_det1 = fields[4];
        row.mean_det2 = fields[5];
        rows.push_back(row);
    }
    return rows;
}

namespace {

json number_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

}  // namespace

std::string sweep_to_json(const std::vector<SweepRow>& rows) {
    json out = json::array();
    for (const SweepRow& row : rows) {
        out.push_back({{"angle_deg", row.angle_deg},
                       {"nrf_analytic", row.nrf_analytic},
                       {"nrf_mc", number_or_null(row.nrf_mc)},
                       {"nrf_mc_err", number_or_null(row.nrf_mc_err)},
                       {"mean_det1", row.mean_det1},
                       {"mean_det2", row.mean_det2}});
    }
    return out.dump(2) + "\n";
}

std::string analytic_to_json(const AnalyticReport& report) {
    json stokes = {
        {"means", report.stokes.means},
        {"variances", report.stokes.variances},
        {"nrf_defined", report.stokes.nrf_defined},
    };
    stokes["nrf"] =
        report.stokes.nrf_defined ? json(report.stokes.nrf) : json(nullptr);
    json out = {
        {"stokes", stokes},
        {"uncertainty",
         {{"margins", report.uncertainty.margins},
          {"satisfied", report.uncertainty.satisfied}}},
        {"wigner_bias_bound", report.wigner_bias},
    };
    out["nrf_bounds"] =
        report.has_bounds
            ? json({{"min", report.bounds.min}, {"max", report.bounds.max}})
            : json(nullptr);
    return out.dump(2) + "\n";
}

std::string analytic_to_csv(const AnalyticReport& report) {
    std::string out = "quantity,value\n";
    for (int k = 0; k < 4; ++k)
        out += "mean_s" + std::to_string(k) + "," +
               fmt9(report.stokes.means[k]) + "\n";
    for (int k = 0; k < 4; ++k)
        out += "var_s" + std::to_string(k) + "," +
               fmt9(report.stokes.variances[k]) + "\n";
    for (int k = 1; k <= 3; ++k)
        out += "nrf_s" + std::to_string(k) + "," +
               fmt9(report.stokes.nrf_defined ? report.stokes.nrf[k - 1]
                                              : std::nan("")) +
               "\n";
    for (int k = 1; k <= 3; ++k)
        out += "uncertainty_margin_" + std::to_string(k) + "," +
               fmt9(report.uncertainty.margins[k - 1]) + "\n";
    out += std::string("nrf_bound_min,") +
           fmt9(report.has_bounds ? report.bounds.min : std::nan("")) + "\n";
    out += std::string("nrf_bound_max,") +
           fmt9(report.has_bounds ? report.bounds.max : std::nan("")) + "\n";
    out += std::string("wigner_bias_bound,") + fmt9(report.wigner_bias) + "\n";
    return out;
}

std::string mc_to_json(const McResult& result) {
    json rows = json::array();
    for (const McResult::Row& row : result.rows) {
        rows.push_back({{"observable", row.observable},
                        {"plate", plate_name(row.plate)},
                        {"angle_deg", row.angle_deg},
                        {"nrf", row.nrf},
                        {"std_error", row.std_error},
                        {"nrf_analytic", row.nrf_analytic}});
    }
    json out = {
        {"snl", result.snl},
        {"snl_std_error", result.snl_std_error},
        {"n_pulses", result.n_pulses},
        {"rows", rows},
    };
    return out.dump(2) + "\n";
}

std::string mc_to_csv(const McResult& result) {
    std::string out =
        "observable,plate,angle_deg,nrf,std_error,nrf_analytic\n";
    for (const McResult::Row& row : result.rows) {
        out += row.observable + "," + plate_name(row.plate) + "," +
               fmt9(row.angle_deg) + "," + fmt9(row.nrf) + "," +
               fmt9(row.std_error) + "," + fmt9(row.nrf_analytic) + "\n";
    }
    out += "# snl " + fmt9(result.snl) + " snl_std_error " +
           fmt9(result.snl_std_error) + " n_pulses " +
           std::to_string(result.n_pulses) + "\n";
    return out;
}

std::string calibration_to_json(const CalibrationSummary& summary) {
    json out = {
        {"snl", summary.report.snl},
        {"snl_std_error", summary.report.snl_std_error},
        {"electronic_fraction", summary.report.electronic_fraction},
        {"electronic_variance", summary.report.electronic_variance},
        {"photons_for_10x_shot_noise", summary.photons_for_10x},
        {"n_pulses", summary.report.n_pulses},
    };
    return out.dump(2) + "\n";
}

std::string calibration_to_csv(const CalibrationSummary& summary) {
    std::string out = "quantity,value\n";
    out += "snl," + fmt9(summary.report.snl) + "\n";
    out += "snl_std_error," + fmt9(summary.report.snl_std_error) + "\n";
    out += "electronic_fraction," + fmt9(summary.report.electronic_fraction) +
           "\n";
    out += "electronic_variance," + fmt9(summary.report.electronic_variance) +
           "\n";
    out += "photons_for_10x_shot_noise," + fmt9(summary.photons_for_10x) +
           "\n";
    out += "n_pulses," + std::to_string(summary.report.n_pulses) + "\n";
    return out;
}

std::string validation_to_json(const ValidationReport& report) {
    json checks = json::array();
    for (const ValidationCheck& check : report.checks) {
        checks.push_back({{"name", check.name},
                          {"pass", check.pass},
                          {"value", check.value},
                          {"bound", check.bound}});
    }
    json out = {
        {"pass", report.pass},
        {"max_mean_deviation", report.max_mean_deviation},
        {"max_variance_deviation", report.max_variance_deviation},
        {"checks", checks},
    };
    return out.dump(2) + "\n";
}

std::string validation_to_text(const ValidationReport& report) {
    std::string out;
    for (const ValidationCheck& check : report.checks) {
        out += check.pass ? "PASS  " : "FAIL  ";
        out += check.name + "  value " + fmt9(check.value) + "  bound " +
               fmt9(check.bound) + "\n";
    }
    out += std::string(report.pass ? "PASS" : "FAIL") +
           "  max mean deviation " + fmt9(report.max_mean_deviation) +
           ", max variance deviation " + fmt9(report.max_variance_deviation) +
           "\n";
    return out;
}

}  // namespace polbell
