#include "polbell/detection_mc.hpp"
#include "polbell/optics_chain.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <vector>

// Throughput comparison of the OpenMP pulse sampler against the serial
// reference, plus a bit-identity check between the two record streams.

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

int main(int argc, char** argv) {
    int pulses = 2'000'000;
    for (int i = 1; i + 1 < argc; i += 2)
        if (std::strcmp(argv[i], "--pulses") == 0) pulses = std::atoi(argv[i + 1]);
    if (pulses < 1000) pulses = 1000;

    const polbell::GaussianState state = polbell::preparation_chain(
        polbell::gain_for_target_s0(1e6), {0.65, 0.65, 0.65, 0.65});
    const polbell::AnalyzerSetting setting{polbell::Plate::HWP, 0.0};
    const polbell::DetectorModel det{};
    const std::uint64_t seed = 7;

    simulate_pulses_serial(state, setting, det, seed, 1000);  // warm up

    auto t0 = std::chrono::steady_clock::now();
    const std::vector<polbell::PulseRecord> serial =
        simulate_pulses_serial(state, setting, det, seed, pulses);
    const double t_serial = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const std::vector<polbell::PulseRecord> parallel =
        simulate_pulses(state, setting, det, seed, pulses);
    const double t_parallel = seconds_since(t0);

    bool identical = serial.size() == parallel.size();
    for (std::size_t i = 0; identical && i < serial.size(); ++i)
        identical = serial[i].q1 == parallel[i].q1 &&
                    serial[i].q2 == parallel[i].q2;

    std::printf("pulses            %d\n", pulses);
    std::printf("threads           %d\n", omp_get_max_threads());
    std::printf("serial            %.3f s   %.3g pulses/s\n", t_serial,
                pulses / t_serial);
    std::printf("openmp            %.3f s   %.3g pulses/s\n", t_parallel,
                pulses / t_parallel);
    std::printf("speedup           %.2fx\n", t_serial / t_parallel);
    std::printf("records identical %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
