#include "doctest.h"

#include "polbell/fock_oracle.hpp"
#include "polbell/gaussian_state.hpp"
#include "polbell/optics_chain.hpp"
#include "polbell/rng.hpp"
#include "polbell/stokes.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <random>

using namespace polbell;

namespace {

Mat2c random_su2(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Complex a{n(rng), n(rng)};
    Complex b{n(rng), n(rng)};
    const Real h = std::sqrt(std::norm(a) + std::norm(b));
    a /= h;
    b /= h;
    Mat2c u;
    u << a, b, -std::conj(b), std::conj(a);
    return u;
}

// Distribution of the per-band photon total, which passive mixing conserves.
std::map<int, double> band_total_distribution(const FockState& s, Band band) {
    const int m0 = band == Band::W2 ? 2 : 0;
    const int m1 = m0 + 1;
    std::map<int, double> out;
    for (int n0 = 0; n0 < s.dims[0]; ++n0)
        for (int n1 = 0; n1 < s.dims[1]; ++n1)
            for (int n2 = 0; n2 < s.dims[2]; ++n2)
                for (int n3 = 0; n3 < s.dims[3]; ++n3) {
                    const int n[4] = {n0, n1, n2, n3};
                    out[n[m0] + n[m1]] += std::norm(s.at(n0, n1, n2, n3));
                }
    return out;
}

}  // namespace

TEST_CASE("truncation bookkeeping") {
    CHECK(truncation_tail(0.0, 10) == 0.0);
    CHECK(truncation_tail(0.3, 10) < 1e-10);
    CHECK(truncation_tail(0.3, 14) < truncation_tail(0.3, 10));
    CHECK(truncation_tail(1.2, 8) > 1e-6);

    const FockState s = build_fock_state(BellKind::PsiMinus, 0.3, 12);
    CHECK(s.truncation_deficit ==
          doctest::Approx(truncation_tail(0.3, 12)).epsilon(1e-9));
    CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(build_fock_state(BellKind::PsiMinus, 1.6, 20),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_fock_state(BellKind::PsiMinus, -0.1, 20),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_fock_state(BellKind::PsiMinus, 0.3, 61),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_fock_state(BellKind::PsiMinus, 1.2, 8),
                    TruncationError);
}

TEST_CASE("pair expansion amplitudes") {
    const double g = 0.4;
    const double t = std::tanh(g);

    const FockState minus = build_fock_state(BellKind::PsiMinus, g, 12);
    const std::complex<double> a00 = minus.at(0, 0, 0, 0);
    CHECK(std::abs(minus.at(1, 0, 0, 1) / a00 - t) < 1e-12);
    CHECK(std::abs(minus.at(0, 1, 1, 0) / a00 + t) < 1e-12);
    CHECK(std::abs(minus.at(2, 1, 1, 2) / a00 + t * t * t) < 1e-12);
    CHECK(std::abs(minus.at(1, 0, 0, 0)) == 0.0);

    const FockState plus = build_fock_state(BellKind::PhiPlus, g, 12);
    CHECK(std::abs(plus.at(0, 1, 0, 1) / plus.at(0, 0, 0, 0) - t) < 1e-12);
    CHECK(std::abs(plus.at(1, 0, 1, 0) / plus.at(0, 0, 0, 0) - t) < 1e-12);
}

TEST_CASE("passive mixing conserves band sectors") {
    const FockState s = build_fock_state(BellKind::PhiMinus, 0.35, 10);
    std::mt19937_64 rng(11);
    const Mat2c u = random_su2(rng);
    const FockState mixed = apply_polarization_unitary_fock(s, u, Band::Both);

    CHECK(mixed.norm() == doctest::Approx(1.0).epsilon(1e-12));
    for (Band band : {Band::W1, Band::W2}) {
        const auto before = band_total_distribution(s, band);
        const auto after = band_total_distribution(mixed, band);
        for (const auto& [total, mass] : before) {
            const auto it = after.find(total);
            const double other = it == after.end() ? 0.0 : it->second;
            CHECK(std::abs(mass - other) < 1e-12);
        }
    }
}

TEST_CASE("anti-correlated state is invariant under joint mixing") {
    const FockState s = build_fock_state(BellKind::PsiMinus, 0.3, 14);
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 4; ++trial) {
        const Mat2c u = random_su2(rng);
        const FockState mixed =
            apply_polarization_unitary_fock(s, u, Band::Both);
        CHECK(std::abs(inner_product(s, mixed)) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("polarization moments match the covariance pipeline") {
    const double g = 0.3;
    const FockState f = build_fock_state(BellKind::PhiPlus, g, 14);
    const GaussianState s = make_bell_state(BellKind::PhiPlus, g);
    for (int k = 0; k <= 3; ++k) {
        const Mat4c form = stokes_form(k).m;
        const double mean_f = stokes_moment_fock(f, k, 1);
        const double mean_g = quadratic_mean(s, form);
        CHECK(std::abs(mean_f - mean_g) < 1e-9);
        const double var_f =
            stokes_moment_fock(f, k, 2) - mean_f * mean_f;
        CHECK(std::abs(var_f - quadratic_variance(s, form)) < 1e-8);
    }
}

TEST_CASE("singlet moments vanish to truncation accuracy") {
    const FockState s = build_fock_state(BellKind::PsiMinus, 0.3, 14);
    for (int k = 1; k <= 3; ++k)
        for (int order = 1; order <= 4; ++order)
            CHECK(std::abs(stokes_moment_fock(s, k, order)) < 1e-8);

    // The annihilation residual is the sharper probe of the truncation edge.
    const double r14 = stokes_residual_norm(s, 2);
    CHECK(r14 < 2e-7);
    const double r18 =
        stokes_residual_norm(build_fock_state(BellKind::PsiMinus, 0.3, 18), 2);
    CHECK(r18 < r14 / 50);

    // A non-singlet state has order-one S2 fluctuations at the same gain.
    const FockState plus = build_fock_state(BellKind::PsiPlus, 0.3, 14);
    CHECK(stokes_moment_fock(plus, 2, 2) > 0.1);
}

TEST_CASE("covariance reconstructed from amplitudes") {
    const double g = 0.3;
    const FockState f = build_fock_state(BellKind::PsiMinus, g, 14);
    const auto [mean, cov] = covariance_from_fock(f);
    const GaussianState s = make_bell_state(BellKind::PsiMinus, g);
    CHECK(static_cast<double>(mean.cwiseAbs().maxCoeff()) < 1e-9);
    CHECK(static_cast<double>((cov - s.cov).cwiseAbs().maxCoeff()) < 1e-8);
}

TEST_CASE("sampling preserves the pairwise photon identity") {
    const FockState s = build_fock_state(BellKind::PsiMinus, 0.3, 12);
    const FockSampler sampler(s);
    const auto tuples = sampler.sample_batch({1, 1, 1, 1}, 99, 200);
    REQUIRE(tuples.size() == 200);
    for (const PhotonTuple& t : tuples) {
        CHECK(t.n[0] + t.n[2] == t.n[1] + t.n[3]);
        CHECK(t.n[0] == t.n[3]);
        CHECK(t.n[1] == t.n[2]);
    }
    // Deterministic in (seed, index): each batch element is the single-draw
    // primitive at the per-index mixed seed.
    const auto again = sampler.sample_batch({1, 1, 1, 1}, 99, 200);
    for (int i = 0; i < 200; ++i) CHECK(tuples[i].n == again[i].n);
    CHECK(sampler.sample({1, 1, 1, 1}, mix_seed(99, 0)).n == tuples[0].n);
    CHECK(sample_photon_tuple(s, {1, 1, 1, 1}, 42).n ==
          sampler.sample({1, 1, 1, 1}, 42).n);
}

TEST_CASE("binomial thinning hits the expected mean") {
    const double g = 0.4;
    const double n = std::sinh(g) * std::sinh(g);
    const FockState s = build_fock_state(BellKind::PsiMinus, g, 14);
    const FockSampler sampler(s);
    const int count = 20000;
    const auto tuples = sampler.sample_batch({0.5, 1.0, 1.0, 1.0}, 7, count);
    double sum0 = 0.0;
    for (const PhotonTuple& t : tuples) sum0 += t.n[0];
    const double mean0 = sum0 / count;
    // Var of the thinned count = eta^2 n(n+1) + eta(1-eta) n.
    const double var0 = 0.25 * n * (n + 1) + 0.25 * n;
    CHECK(std::abs(mean0 - 0.5 * n) < 3 * std::sqrt(var0 / count));
}

TEST_CASE("sampled noise reduction at half transmission") {
    const double g = 0.3;
    const FockState s = build_fock_state(BellKind::PsiMinus, g, 12);
    const FockSampler sampler(s);
    const int count = 1000000;
    const auto tuples =
        sampler.sample_batch({0.5, 0.5, 0.5, 0.5}, 2024, count);

    const int blocks = 100;
    const int per_block = count / blocks;
    double nrf_sum = 0.0, nrf_sq = 0.0;
    for (int b = 0; b < blocks; ++b) {
        double sd = 0.0, sdd = 0.0, ssum = 0.0;
        for (int i = b * per_block; i < (b + 1) * per_block; ++i) {
            const auto& t = tuples[i];
            const double d = (t.n[0] + t.n[2]) - (t.n[1] + t.n[3]);
            sd += d;
            sdd += d * d;
            ssum += t.n[0] + t.n[1] + t.n[2] + t.n[3];
        }
        const double var = sdd / per_block - (sd / per_block) * (sd / per_block);
        const double nrf = var / (ssum / per_block);
        nrf_sum += nrf;
        nrf_sq += nrf * nrf;
    }
    const double nrf = nrf_sum / blocks;
    const double se =
        std::sqrt((nrf_sq / blocks - nrf * nrf) / (blocks - 1));
    CHECK(std::abs(nrf - 0.5) < 3 * se + 1e-3);
}
