#include "qns/random_field.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qns/csv.hpp"

namespace qns {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t stream_key(GaussianSeed seed, Freq n) {
    std::uint64_t k = seed.value;
    k = mix64(k + kGolden + static_cast<std::uint32_t>(n.x));
    k = mix64(k + kGolden + static_cast<std::uint32_t>(n.y));
    return k;
}

}  // namespace

std::complex<double> sample_gaussian(GaussianSeed seed, Freq n) {
    const std::uint64_t k = stream_key(seed, n);
    const std::uint64_t b1 = mix64(k + kGolden);
    const std::uint64_t b2 = mix64(k + 2 * kGolden);
    const double u1 = 1.0 - std::ldexp(static_cast<double>(b1 >> 11), -53);  // (0, 1]
    const double u2 = std::ldexp(static_cast<double>(b2 >> 11), -53);        // [0, 1)
    const double r = std::sqrt(-std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

SpectralField::SpectralField(int trunc) : trunc_(trunc) {
    if (trunc < 1) throw std::invalid_argument("SpectralField: N >= 1 required");
    amp_.assign(static_cast<std::size_t>(2 * trunc + 1) * (2 * trunc + 1), {0.0, 0.0});
}

std::complex<double> SpectralField::at(Freq n) const {
    if (!contains(n)) throw std::out_of_range("SpectralField::at: |n| > N");
    return amp_[index(n)];
}

void SpectralField::set(Freq n, std::complex<double> v) {
    if (!contains(n)) throw std::out_of_range("SpectralField::set: |n| > N");
    amp_[index(n)] = v;
}

std::vector<Freq> SpectralField::modes() const {
    return truncation_set(trunc_, TruncationMode::Euclidean);
}

SpectralField sample_data(GaussianSeed seed, double alpha, int trunc) {
    SpectralField f(trunc);
    for (Freq n : f.modes()) f[n] = sample_gaussian(seed, n) * bracket_pow(n, alpha - 1.0);
    return f;
}

SpectralField linear_flow(const SpectralField& field, double t) {
    SpectralField out(field.truncation());
    for (Freq n : field.modes()) {
        const double theta = -t * static_cast<double>(norm_sq(n));
        out[n] = field[n] * std::complex<double>{std::cos(theta), std::sin(theta)};
    }
    return out;
}

double sobolev_norm(const SpectralField& field, double s) {
    double acc = 0.0;
    for (Freq n : field.modes()) acc += bracket_pow(n, 2.0 * s) * std::norm(field[n]);
    return std::sqrt(acc);
}

void write_field_csv(std::ostream& os, const SpectralField& field) {
    os << "n1,n2,re,im\n";
    for (Freq n : field.modes()) {
        const auto v = field[n];
        os << n.x << ',' << n.y << ',' << format_g17(v.real()) << ',' << format_g17(v.imag())
           << '\n';
    }
}

SpectralField read_field_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "n1,n2,re,im")
        throw std::runtime_error("read_field_csv: missing n1,n2,re,im header");
    struct Row {
        Freq n;
        std::complex<double> v;
    };
    std::vector<Row> rows;
    std::int64_t max_r2 = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        Row r;
        double re = 0.0, im = 0.0;
        if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &r.n.x, &r.n.y, &re, &im) != 4)
            throw std::runtime_error("read_field_csv: bad row '" + line + "'");
        r.v = {re, im};
        max_r2 = std::max(max_r2, norm_sq(r.n));
        rows.push_back(r);
    }
    const int trunc = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(max_r2)))));
    SpectralField f(trunc);
    for (const Row& r : rows) f.set(r.n, r.v);
    return f;
}

}  // namespace qns
