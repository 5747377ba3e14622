#include "qns/picard.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "qns/csv.hpp"

namespace qns {

namespace {

// Compensated (Kahan) accumulator; keeps dyadic-increment diagnostics free
// of rounding drift at trunc = 1024.
struct Kahan {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

void require_nonzero_mode(Freq n, const char* who) {
    if (is_zero(n))
        throw std::invalid_argument(std::string(who) +
                                    ": zero mode excluded by renormalization");
}

}  // namespace

std::complex<double> duhamel_kernel(double t, std::int64_t p) {
    if (p == 0) return {t, 0.0};
    const double theta = 2.0 * t * static_cast<double>(p);
    const double inv = 1.0 / (2.0 * static_cast<double>(p));
    // (1 - e^{-i theta}) / (2ip) = (sin theta - i (1 - cos theta)) / (2p)
    return {std::sin(theta) * inv, -(1.0 - std::cos(theta)) * inv};
}

double resonance_weight(double t, std::int64_t p) {
    if (p == 0) return t * t;
    const double s = std::sin(t * static_cast<double>(p)) / static_cast<double>(p);
    return s * s;
}

std::vector<Freq> admissible_shifts(int trunc, Freq n) {
    if (trunc < 1) throw std::invalid_argument("admissible_shifts: N >= 1 required");
    const std::int64_t nn = std::int64_t{trunc} * trunc;
    std::vector<Freq> out;
    for (std::int32_t x = -trunc; x <= trunc; ++x) {
        for (std::int32_t y = -trunc; y <= trunc; ++y) {
            const Freq k{x, y};
            if (norm_sq(k) <= nn && norm_sq(n + k) <= nn) out.push_back(k);
        }
    }
    return out;
}

SecondIterateForm::SecondIterateForm(double alpha, int trunc, double t, Freq n) {
    require_nonzero_mode(n, "second_iterate_coeff");
    modes_ = truncation_set(trunc, TruncationMode::Euclidean);
    const auto index_of = [&](Freq f) {
        const auto it = std::lower_bound(modes_.begin(), modes_.end(), f);
        return static_cast<std::uint32_t>(it - modes_.begin());
    };
    const double phi = -t * static_cast<double>(norm_sq(n));
    const std::complex<double> prop{std::cos(phi), std::sin(phi)};
    for (Freq k : admissible_shifts(trunc, n)) {
        const Freq a = n + k;
        Term term;
        term.plus = index_of(a);
        term.minus = index_of(k);
        term.coeff = prop * duhamel_kernel(t, dot(n, k)) * bracket_pow(a, alpha - 1.0) *
                     bracket_pow(k, alpha - 1.0);
        terms_.push_back(term);
    }
}

std::complex<double> SecondIterateForm::evaluate(GaussianSeed seed) const {
    std::vector<std::complex<double>> g(modes_.size());
    for (std::size_t i = 0; i < modes_.size(); ++i) g[i] = sample_gaussian(seed, modes_[i]);
    std::complex<double> acc{0.0, 0.0};
    for (const Term& term : terms_) acc += g[term.plus] * std::conj(g[term.minus]) * term.coeff;
    return acc;
}

std::complex<double> SecondIterateForm::evaluate(
    const std::function<std::complex<double>(Freq)>& g) const {
    std::vector<std::complex<double>> buf(modes_.size());
    for (std::size_t i = 0; i < modes_.size(); ++i) buf[i] = g(modes_[i]);
    std::complex<double> acc{0.0, 0.0};
    for (const Term& term : terms_)
        acc += buf[term.plus] * std::conj(buf[term.minus]) * term.coeff;
    return acc;
}

std::complex<double> second_iterate_coeff(double alpha, int trunc, double t, Freq n,
                                          GaussianSeed seed) {
    return SecondIterateForm(alpha, trunc, t, n).evaluate(seed);
}

double variance_exact(double alpha, int trunc, double t, Freq n, double kernel_constant) {
    require_nonzero_mode(n, "variance_exact");
    auto shifts = admissible_shifts(trunc, n);
    std::sort(shifts.begin(), shifts.end(), [](Freq a, Freq b) {
        const auto ra = norm_sq(a), rb = norm_sq(b);
        if (ra != rb) return ra < rb;
        return a < b;
    });
    Kahan acc;
    for (Freq k : shifts) {
        acc.add(bracket_pow(n + k, 2.0 * alpha - 2.0) * bracket_pow(k, 2.0 * alpha - 2.0) *
                resonance_weight(t, dot(n, k)));
    }
    return kernel_constant * acc.sum;
}

double variance_exact(double alpha, int trunc, double t, Freq n) {
    return variance_exact(alpha, trunc, t, n, calibrated_kernel_constant());
}

Freq resonant_direction(Freq n) {
    require_nonzero_mode(n, "resonant_direction");
    const std::int32_t g = std::gcd(std::abs(n.x), std::abs(n.y));
    return {-n.y / g, n.x / g};
}

double resonant_line_sum(double alpha, int trunc, double t, Freq n, double kernel_constant) {
    require_nonzero_mode(n, "resonant_line_sum");
    if (trunc < 1) throw std::invalid_argument("resonant_line_sum: N >= 1 required");
    const Freq dir = resonant_direction(n);
    const std::int64_t nn = std::int64_t{trunc} * trunc;
    const double w0 = resonance_weight(t, 0);
    Kahan acc;
    // k = a * dir in nondecreasing |a|; +a before -a at equal magnitude.
    acc.add(w0 * bracket_pow(n, 2.0 * alpha - 2.0));  // a = 0 (k = 0, <0> = 1)
    for (std::int32_t a = 1; std::int64_t{a} * a * norm_sq(dir) <= nn; ++a) {
        for (const std::int32_t sa : {a, -a}) {
            const Freq k = sa * dir;
            if (norm_sq(n + k) > nn) continue;
            acc.add(w0 * bracket_pow(n + k, 2.0 * alpha - 2.0) *
                    bracket_pow(k, 2.0 * alpha - 2.0));
        }
    }
    return kernel_constant * acc.sum;
}

double resonant_line_sum(double alpha, int trunc, double t, Freq n) {
    return resonant_line_sum(alpha, trunc, t, n, calibrated_kernel_constant());
}

std::string_view to_string(DivergenceVerdict::Outcome o) {
    switch (o) {
        case DivergenceVerdict::Outcome::Diverges: return "DIVERGES";
        case DivergenceVerdict::Outcome::Converges: return "CONVERGES";
        case DivergenceVerdict::Outcome::Unknown: return "UNKNOWN";
    }
    return "?";
}

DivergenceVerdict divergence_verdict(double alpha, int dim, Nonlinearity nl) {
    if (dim < 1 || dim > 3)
        throw std::invalid_argument("divergence_verdict: dimension must be 1, 2, or 3");
    using Outcome = DivergenceVerdict::Outcome;
    if (nl == Nonlinearity::Abs2) {
        const double thr = 1.25 - 0.25 * dim;
        if (alpha >= thr) return {Outcome::Diverges, thr, dim};
        // Sharpness of the d = 2 threshold: below 3/4 the second moment stays
        // bounded. The 1d/3d sums below threshold are not adjudicated.
        if (dim == 2) return {Outcome::Converges, thr, dim};
        return {Outcome::Unknown, thr, dim};
    }
    const double thr = 2.0 - 0.25 * dim;
    if (alpha >= thr) return {Outcome::Diverges, thr, dim};
    return {Outcome::Unknown, thr, dim};
}

double scaling_critical(Nonlinearity, int dim) {
    if (dim < 1) throw std::invalid_argument("scaling_critical: dimension >= 1 required");
    return 2.0 - 0.5 * dim;
}

double scaling_shell_sum(double alpha, int trunc) {
    const auto shell = truncation_set(trunc, TruncationMode::DyadicShell);
    // Dense lookup tables over the bounding square for the inner loop.
    const int side = 2 * trunc + 1;
    std::vector<double> w2(static_cast<std::size_t>(side) * side, -1.0);  // <n2>^{2a-2}, -1 = off shell
    const auto idx = [&](Freq f) {
        return static_cast<std::size_t>(f.x + trunc) * side + static_cast<std::size_t>(f.y + trunc);
    };
    for (Freq f : shell) w2[idx(f)] = bracket_pow(f, 2.0 * alpha - 2.0);

    std::vector<double> wn(shell.size()), w1(shell.size());
    std::vector<std::int64_t> r2(shell.size());
    for (std::size_t i = 0; i < shell.size(); ++i) {
        wn[i] = bracket_pow(shell[i], -2.0 * alpha);
        w1[i] = bracket_pow(shell[i], 2.0 * alpha - 2.0);
        r2[i] = norm_sq(shell[i]);
    }

    Kahan acc;
    for (std::size_t i = 0; i < shell.size(); ++i) {
        const Freq n = shell[i];
        for (std::size_t j = 0; j < shell.size(); ++j) {
            const Freq n1 = shell[j];
            const Freq n2 = n1 - n;
            if (std::abs(n2.x) > trunc || std::abs(n2.y) > trunc) continue;
            const double wb = w2[idx(n2)];
            if (wb < 0.0) continue;
            const double m = static_cast<double>(r2[i] - r2[j] + norm_sq(n2));
            acc.add(wn[i] * w1[j] * wb / (1.0 + m * m));
        }
    }
    return acc.sum;
}

double scaling_exponent_audit(double alpha, int trunc) {
    if (trunc < 8 || (trunc & (trunc - 1)) != 0)
        throw std::invalid_argument("scaling_exponent_audit: trunc must be a power of 2, >= 8");
    const double s1 = scaling_shell_sum(alpha, trunc);
    const double s2 = scaling_shell_sum(alpha, 2 * trunc);
    return std::log2(s2 / s1);
}

TightnessReport tightness_test(std::span<const std::complex<double>> values,
                               double threshold_prob) {
    if (values.empty()) throw std::invalid_argument("tightness_test: empty sample set");
    double mean = 0.0;
    for (const auto& v : values) mean += std::norm(v);
    mean /= static_cast<double>(values.size());
    std::size_t hits = 0;
    for (const auto& v : values)
        if (std::norm(v) > 0.5 * mean) ++hits;
    TightnessReport rep;
    rep.mean_sq = mean;
    rep.empirical_fraction = static_cast<double>(hits) / static_cast<double>(values.size());
    rep.pz_lower_bound = kPaleyZygmundFloor;
    rep.pass = rep.empirical_fraction >= threshold_prob;
    return rep;
}

KernelCalibration calibrate_kernel_constant(GaussianSeed base_seed, int samples, int trunc,
                                            double t, Freq n) {
    if (samples < 1) throw std::invalid_argument("calibrate_kernel_constant: samples >= 1");
    const SecondIterateForm form(1.0, trunc, t, n);  // alpha = 1: unit weights
    Kahan acc;
    for (int i = 0; i < samples; ++i) {
        const GaussianSeed s{base_seed.value + static_cast<std::uint64_t>(i)};
        acc.add(std::norm(form.evaluate(s)));
    }
    const double mc_mean = acc.sum / samples;
    const double unit_sum = variance_exact(1.0, trunc, t, n, 1.0);
    KernelCalibration cal;
    cal.raw_ratio = mc_mean / unit_sum;
    cal.constant = (std::abs(cal.raw_ratio - 1.0) <= std::abs(cal.raw_ratio - 2.0)) ? 1.0 : 2.0;
    cal.samples = samples;
    cal.trunc = trunc;
    cal.t = t;
    cal.n = n;
    cal.base_seed = base_seed.value;
    return cal;
}

const KernelCalibration& kernel_calibration() {
    static KernelCalibration cal;
    static std::once_flag flag;
    std::call_once(flag, [] { cal = calibrate_kernel_constant(GaussianSeed{31415926535897932ULL}); });
    return cal;
}

double calibrated_kernel_constant() { return kernel_calibration().constant; }

double variance_exact_dim(double alpha, int trunc, double t, int dim, std::int64_t n_first,
                          double kernel_constant) {
    if (dim < 1 || dim > 3)
        throw std::invalid_argument("variance_exact_dim: dimension must be 1, 2, or 3");
    if (n_first == 0)
        throw std::invalid_argument("variance_exact_dim: zero mode excluded by renormalization");
    if (trunc < 1) throw std::invalid_argument("variance_exact_dim: N >= 1 required");
    const std::int64_t nn = std::int64_t{trunc} * trunc;
    const double expo = alpha - 1.0;  // per-factor exponent on (1 + |.|^2)
    Kahan acc;
    const std::int32_t lo = -trunc, hi = trunc;
    const std::int32_t ylo = dim >= 2 ? lo : 0, yhi = dim >= 2 ? hi : 0;
    const std::int32_t zlo = dim >= 3 ? lo : 0, zhi = dim >= 3 ? hi : 0;
    for (std::int32_t kx = lo; kx <= hi; ++kx) {
        for (std::int32_t ky = ylo; ky <= yhi; ++ky) {
            for (std::int32_t kz = zlo; kz <= zhi; ++kz) {
                const std::int64_t k2 =
                    std::int64_t{kx} * kx + std::int64_t{ky} * ky + std::int64_t{kz} * kz;
                if (k2 > nn) continue;
                const std::int64_t a2 = (n_first + kx) * (n_first + kx) +
                                        std::int64_t{ky} * ky + std::int64_t{kz} * kz;
                if (a2 > nn) continue;
                const std::int64_t p = n_first * kx;  // n.k with n = n_first e_1
                acc.add(std::pow(1.0 + static_cast<double>(a2), expo) *
                        std::pow(1.0 + static_cast<double>(k2), expo) *
                        resonance_weight(t, p));
            }
        }
    }
    return kernel_constant * acc.sum;
}

std::string_view to_string(ScanStatistic s) {
    switch (s) {
        case ScanStatistic::ExactVariance: return "EXACT_VARIANCE";
        case ScanStatistic::McMean: return "MC_MEAN";
        case ScanStatistic::ResonantSum: return "RESONANT_SUM";
        case ScanStatistic::PzFraction: return "PZ_FRACTION";
    }
    return "?";
}

void write_scan_row(std::ostream& os, const ScanRecord& r) {
    const bool exact = r.statistic == ScanStatistic::ExactVariance ||
                       r.statistic == ScanStatistic::ResonantSum;
    if (exact && r.samples != 0)
        throw std::invalid_argument("ScanRecord: exact statistics carry samples = 0");
    if (!std::isfinite(r.value)) throw std::invalid_argument("ScanRecord: non-finite value");
    if (r.statistic != ScanStatistic::PzFraction && r.value < 0.0)
        throw std::invalid_argument("ScanRecord: variance-type value must be >= 0");
    os << format_g17(r.alpha) << ',' << r.trunc << ',' << format_g17(r.t) << ',' << r.n.x << ','
       << r.n.y << ',' << to_string(r.statistic) << ',' << format_g17(r.value) << ','
       << r.samples << ',' << r.seed << '\n';
}

}  // namespace qns
