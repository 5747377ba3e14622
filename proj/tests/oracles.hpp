#pragma once
//
// Test-side oracles, deliberately independent of the implementation paths
// they check: dense SVD for the power-iteration norms, a quadratic-cost
// direct convolution for the dealiased product, and plain trapezoid
// quadrature of the Duhamel integral for the closed-form second iterate.
//

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <complex>
#include <map>
#include <vector>

#include "qns/lattice.hpp"
#include "qns/random_field.hpp"
#include "qns/tensors.hpp"

namespace qns::test {

// Largest singular value of the unfolding via Eigen's dense SVD.
inline double dense_svd_norm(const SparseTensor3& t, Partition p) {
    std::map<std::vector<std::int64_t>, int> rows, cols;
    const auto key = [](const Triple& tr, unsigned axes) {
        std::vector<std::int64_t> k;
        const auto push = [&k](Freq f) { k.push_back((std::int64_t{f.x} << 32) ^ (std::uint32_t)f.y); };
        if (axes & kAxisN) push(tr.n);
        if (axes & kAxisN1) push(tr.n1);
        if (axes & kAxisN2) push(tr.n2);
        return k;
    };
    for (std::size_t i = 0; i < t.size(); ++i) {
        rows.try_emplace(key(t.triple(i), p.output_axes), 0);
        cols.try_emplace(key(t.triple(i), p.input_axes), 0);
    }
    int r = 0;
    for (auto& [k, idx] : rows) idx = r++;
    int c = 0;
    for (auto& [k, idx] : cols) idx = c++;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<int>(rows.size()),
                                                static_cast<int>(cols.size()));
    for (std::size_t i = 0; i < t.size(); ++i)
        m(rows[key(t.triple(i), p.output_axes)], cols[key(t.triple(i), p.input_axes)]) +=
            t.value(i);
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(0);
}

// F(|u|^2)(n) with the zero mode removed, by the direct O(N^4) sum
// F(n) = sum_{n1 - n2 = n} u-hat(n1) conj(u-hat(n2)).
inline SpectralField direct_convolution(const SpectralField& u) {
    const int trunc = u.truncation();
    SpectralField out(trunc);
    const auto modes = u.modes();
    for (Freq n : out.modes()) {
        if (is_zero(n)) continue;
        std::complex<double> acc{};
        for (Freq n1 : modes) {
            const Freq n2 = n1 - n;
            if (!u.contains(n2)) continue;
            acc += u[n1] * std::conj(u[n2]);
        }
        out[n] = acc;
    }
    return out;
}

// int_0^t e^{-i(t-t')|n|^2} F_x(|z_N|^2)(t', n) dt' by composite trapezoid
// with `intervals` panels; z_N is the free evolution of the seeded data.
inline std::complex<double> trapezoid_second_iterate(double alpha, int trunc, double t, Freq n,
                                                     GaussianSeed seed, int intervals) {
    struct Term {
        std::complex<double> amp;
        double freq;  // F(|z|^2)(t', n) = sum amp_k e^{i t' freq_k}
    };
    std::vector<Term> terms;
    const std::int64_t nn = std::int64_t{trunc} * trunc;
    for (std::int32_t x = -trunc; x <= trunc; ++x) {
        for (std::int32_t y = -trunc; y <= trunc; ++y) {
            const Freq k{x, y};
            const Freq a = n + k;
            if (norm_sq(k) > nn || norm_sq(a) > nn) continue;
            const auto amp = sample_gaussian(seed, a) * std::conj(sample_gaussian(seed, k)) *
                             bracket_pow(a, alpha - 1.0) * bracket_pow(k, alpha - 1.0);
            terms.push_back({amp, -static_cast<double>(norm_sq(a) - norm_sq(k))});
        }
    }
    const double h = t / intervals;
    std::complex<double> acc{};
    for (int j = 0; j <= intervals; ++j) {
        const double tp = j * h;
        std::complex<double> f{};
        for (const Term& term : terms) {
            const double th = tp * term.freq;
            f += term.amp * std::complex<double>{std::cos(th), std::sin(th)};
        }
        const double phase = -(t - tp) * static_cast<double>(norm_sq(n));
        const auto w = (j == 0 || j == intervals) ? 0.5 : 1.0;
        acc += w * f * std::complex<double>{std::cos(phase), std::sin(phase)};
    }
    return acc * h;
}

}  // namespace qns::test
