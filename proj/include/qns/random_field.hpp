#pragma once
//
// Reproducible sampling of the Gaussian random data
//
//     u0(x) = sum_n  g_n / <n>^{1-alpha} e^{i n.x},
//
// its free Schroedinger evolution, and Sobolev-norm measurement.
//
// The Gaussians are generated by a counter-based scheme keyed by
// (master_seed, n.x, n.y), so the draw for a given mode never depends on the
// truncation or on enumeration order: restricting a sample to a smaller
// truncation reproduces the smaller sample bit for bit.
//
// Bit-exact procedure for one mode (documented so CSV fixtures are portable):
//
//   mix(z): z ^= z>>30; z *= 0xbf58476d1ce4e5b9; z ^= z>>27;
//           z *= 0x94d049bb133111eb; z ^= z>>31        (splitmix64 finalizer)
//   G = 0x9e3779b97f4a7c15 (golden-ratio increment)
//   k  = mix(mix(seed + G + zext32(n.x)) + G + zext32(n.y))
//   b1 = mix(k + G),  b2 = mix(k + 2G)
//   u1 = 1 - (b1 >> 11) * 2^-53   in (0, 1]
//   u2 =     (b2 >> 11) * 2^-53   in [0, 1)
//   g  = sqrt(-ln u1) * (cos(2 pi u2) + i sin(2 pi u2))
//
// Re g and Im g are independent N(0, 1/2), so E g = 0 and E|g|^2 = 1.
//

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qns/lattice.hpp"

namespace qns {

struct GaussianSeed {
    std::uint64_t value = 0;
};

// The standard complex Gaussian attached to (seed, n). Pure and
// deterministic; safe to call concurrently.
std::complex<double> sample_gaussian(GaussianSeed seed, Freq n);

// One Fourier-side snapshot: amplitudes on the Euclidean truncation
// { |n| <= N }. Storage is a dense (2N+1)^2 square; entries outside the
// disk are kept identically zero and are not part of the field's domain.
class SpectralField {
public:
    explicit SpectralField(int trunc);

    int truncation() const { return trunc_; }

    bool contains(Freq n) const { return norm_sq(n) <= std::int64_t{trunc_} * trunc_; }

    // Checked access; throws std::out_of_range outside { |n| <= N }.
    std::complex<double> at(Freq n) const;
    void set(Freq n, std::complex<double> v);

    // Unchecked access for hot loops; caller guarantees contains(n).
    std::complex<double>& operator[](Freq n) { return amp_[index(n)]; }
    const std::complex<double>& operator[](Freq n) const { return amp_[index(n)]; }

    // Modes of the domain in the fixed lexicographic order.
    std::vector<Freq> modes() const;

    friend bool operator==(const SpectralField&, const SpectralField&) = default;

private:
    std::size_t index(Freq n) const {
        return static_cast<std::size_t>(n.x + trunc_) * (2 * trunc_ + 1) +
               static_cast<std::size_t>(n.y + trunc_);
    }

    int trunc_;
    std::vector<std::complex<double>> amp_;
};

// u0-hat(n) = g_n / <n>^{1-alpha} on { |n| <= N }.
SpectralField sample_data(GaussianSeed seed, double alpha, int trunc);

// e^{it Laplacian}: multiplies each amplitude by e^{-i t |n|^2}.
SpectralField linear_flow(const SpectralField& field, double t);

// ( sum_n <n>^{2s} |u-hat(n)|^2 )^{1/2}; (2 pi)-measure factors dropped by
// convention throughout the project.
double sobolev_norm(const SpectralField& field, double s);

// CSV with header n1,n2,re,im; reals printed with 17 significant digits.
void write_field_csv(std::ostream& os, const SpectralField& field);
SpectralField read_field_csv(std::istream& is);

}  // namespace qns
