#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>

#include "qns/random_field.hpp"

using namespace qns;

TEST_CASE("sampling is deterministic in (seed, n)") {
    const GaussianSeed seed{0xfeedface};
    CHECK(sample_gaussian(seed, {3, -2}) == sample_gaussian(seed, {3, -2}));
    CHECK(sample_gaussian(seed, {3, -2}) != sample_gaussian(seed, {-2, 3}));
    CHECK(sample_gaussian(seed, {3, -2}) != sample_gaussian(GaussianSeed{1}, {3, -2}));
}

TEST_CASE("single-mode Gaussian moments over 1e5 seeds") {
    const Freq n{5, -1};
    const int samples = 100000;
    std::complex<double> mean{};
    double mean_sq = 0.0;
    for (int s = 0; s < samples; ++s) {
        const auto g = sample_gaussian(GaussianSeed{static_cast<std::uint64_t>(s)}, n);
        mean += g;
        mean_sq += std::norm(g);
    }
    mean /= samples;
    mean_sq /= samples;
    const double se_comp = std::sqrt(0.5 / samples);  // each component is N(0, 1/2)
    CHECK(std::abs(mean.real()) <= 3 * se_comp);
    CHECK(std::abs(mean.imag()) <= 3 * se_comp);
    const double se_sq = std::sqrt(1.0 / samples);  // Var |g|^2 = 1 for E|g|^2 = 1
    CHECK(std::abs(mean_sq - 1.0) <= 3 * se_sq);
}

TEST_CASE("distinct modes decorrelated (independence proxy)") {
    const Freq a{1, 0}, b{0, 1};
    const int samples = 10000;
    std::complex<double> cross{};
    for (int s = 0; s < samples; ++s) {
        const GaussianSeed seed{static_cast<std::uint64_t>(s) + 777};
        cross += sample_gaussian(seed, a) * std::conj(sample_gaussian(seed, b));
    }
    cross /= samples;
    const double se = std::sqrt(1.0 / samples);
    CHECK(std::abs(cross.real()) <= 3 * se);
    CHECK(std::abs(cross.imag()) <= 3 * se);
}

TEST_CASE("sample_data weights and truncation stability") {
    const GaussianSeed seed{42};
    const auto f1 = sample_data(seed, 1.0, 6);
    for (Freq n : f1.modes())
        CHECK(std::abs(f1[n]) == doctest::Approx(std::abs(sample_gaussian(seed, n))).epsilon(1e-15));

    for (double alpha : {0.0, 0.5, 0.75})
        CHECK(sample_data(seed, alpha, 6)[{0, 0}] == sample_gaussian(seed, {0, 0}));

    // restriction of the N = 12 sample equals the N = 6 sample bit for bit
    const auto big = sample_data(seed, 0.5, 12);
    const auto small = sample_data(seed, 0.5, 6);
    for (Freq n : small.modes()) CHECK(big[n] == small[n]);
}

TEST_CASE("per-mode data variance matches <n>^{2 alpha - 2}") {
    const double alpha = 0.5;
    for (Freq n : {Freq{2, 1}, Freq{0, 3}}) {
        const int samples = 10000;
        double acc = 0.0;
        for (int s = 0; s < samples; ++s) {
            const auto g = sample_gaussian(GaussianSeed{static_cast<std::uint64_t>(s)}, n) *
                           bracket_pow(n, alpha - 1.0);
            acc += std::norm(g);
        }
        acc /= samples;
        const double expect = bracket_pow(n, 2 * alpha - 2.0);
        const double se = expect / std::sqrt(static_cast<double>(samples));
        CHECK(std::abs(acc - expect) <= 3 * se);
    }
}

TEST_CASE("linear flow is the identity at t = 0 and unimodular") {
    const auto f = sample_data(GaussianSeed{7}, 0.25, 5);
    const auto f0 = linear_flow(f, 0.0);
    for (Freq n : f.modes()) {
        CHECK(f0[n] == f[n]);
        CHECK(std::abs(linear_flow(f, 0.37)[n]) ==
              doctest::Approx(std::abs(f[n])).epsilon(1e-14));
    }
}

TEST_CASE("linear flow group property and norm preservation") {
    const auto f = sample_data(GaussianSeed{11}, 0.5, 8);
    const auto a = linear_flow(linear_flow(f, 0.3), 0.45);
    const auto b = linear_flow(f, 0.75);
    for (Freq n : f.modes()) CHECK(std::abs(a[n] - b[n]) <= 1e-13 * (1.0 + std::abs(b[n])));
    for (double s : {-0.7, 0.0, 0.3, 2.0}) {
        const double before = sobolev_norm(f, s);
        const double after = sobolev_norm(linear_flow(f, 1.234), s);
        CHECK(std::abs(after - before) <= 1e-12 * before);
    }
}

TEST_CASE("sobolev norm of single modes") {
    SpectralField f(2);
    f.set({0, 0}, 1.0);
    CHECK(sobolev_norm(f, -1.3) == 1.0);
    CHECK(sobolev_norm(f, 2.0) == 1.0);
    SpectralField g(2);
    g.set({1, 0}, 1.0);
    CHECK(sobolev_norm(g, 1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("mean squared H^{-alpha-eps} norm matches the direct sum") {
    const double alpha = 0.5, eps = 0.25;
    const int trunc = 4, samples = 10000;
    double acc = 0.0;
    for (int s = 0; s < samples; ++s) {
        const auto f = sample_data(GaussianSeed{static_cast<std::uint64_t>(s)}, alpha, trunc);
        const double norm = sobolev_norm(f, -alpha - eps);
        acc += norm * norm;
    }
    acc /= samples;
    double expect = 0.0;
    for (Freq n : truncation_set(trunc, TruncationMode::Euclidean))
        expect += bracket_pow(n, -2 * eps - 2.0);
    // each mode contributes an independent Exp-like term of mean w_n and
    // variance w_n^2
    double var = 0.0;
    for (Freq n : truncation_set(trunc, TruncationMode::Euclidean)) {
        const double w = bracket_pow(n, -2 * eps - 2.0);
        var += w * w;
    }
    const double se = std::sqrt(var / samples);
    CHECK(std::abs(acc - expect) <= 3 * se);
}

TEST_CASE("sampled fields are genuinely complex (no conjugate symmetry)") {
    const auto f = sample_data(GaussianSeed{123}, 0.5, 4);
    // real-valued u would force u-hat(-n) = conj(u-hat(n)) for all n
    bool symmetric = true;
    for (Freq n : f.modes())
        if (std::abs(f[n] - std::conj(f[-n])) > 1e-12) symmetric = false;
    CHECK_FALSE(symmetric);
}

TEST_CASE("field CSV round trip") {
    const auto f = sample_data(GaussianSeed{99}, 0.3, 5);
    std::stringstream buf;
    write_field_csv(buf, f);
    const auto g = read_field_csv(buf);
    REQUIRE(g.truncation() == f.truncation());
    for (Freq n : f.modes()) CHECK(f[n] == g[n]);
}

TEST_CASE("checked access rejects out-of-domain frequencies") {
    SpectralField f(2);
    CHECK_THROWS_AS(f.at({2, 2}), std::out_of_range);
    CHECK_THROWS_AS(f.set({3, 0}, 1.0), std::out_of_range);
    CHECK(f.contains({1, 1}));
}
