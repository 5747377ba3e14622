#pragma once
//
// Frequency-lattice primitives shared by every other module: Japanese
// brackets, resonance phase functions, and truncation sets on Z^2.
//
// All resonance arithmetic is carried out in exact 64-bit integers so that
// the classification "phi = m" is never subject to floating-point error.
//

#include <compare>
#include <cstdint>
#include <vector>

namespace qns {

// A spatial frequency n = (x, y) in Z^2. Components are 32-bit so that
// |n|^2 and all phase values fit comfortably in int64.
struct Freq {
    std::int32_t x = 0;
    std::int32_t y = 0;

    friend constexpr auto operator<=>(const Freq&, const Freq&) = default;
};

constexpr Freq operator+(Freq a, Freq b) { return {a.x + b.x, a.y + b.y}; }
constexpr Freq operator-(Freq a, Freq b) { return {a.x - b.x, a.y - b.y}; }
constexpr Freq operator-(Freq a) { return {-a.x, -a.y}; }
constexpr Freq operator*(std::int32_t c, Freq a) { return {c * a.x, c * a.y}; }

constexpr std::int64_t dot(Freq a, Freq b) {
    return std::int64_t{a.x} * b.x + std::int64_t{a.y} * b.y;
}

constexpr std::int64_t norm_sq(Freq n) { return dot(n, n); }

constexpr bool is_zero(Freq n) { return n.x == 0 && n.y == 0; }

// <n> = (1 + |n|^2)^{1/2}; always >= 1.
double bracket(Freq n);

// <n>^p, the workhorse weight.
double bracket_pow(Freq n, double p);

// The three quadratic nonlinearities, identified by their resonance phase:
//   Abs2       u * conj(u)   phase  |n|^2 - |n1|^2 + |n2|^2  (= -2 n.n2 on
//                            the convolution plane n - n1 + n2 = 0)
//   Square     u * u         phase  -2 n1.n2
//   ConjSquare conj(u)^2     phase  |n|^2 + |n1|^2 + |n2|^2
enum class Nonlinearity { Abs2, Square, ConjSquare };

// Exact integer resonance value for the given nonlinearity. For Abs2 the
// caller must supply a triple on the convolution plane n - n1 + n2 = 0;
// violating that throws std::invalid_argument.
std::int64_t phase(Nonlinearity nl, Freq n, Freq n1, Freq n2);

enum class TruncationMode {
    Euclidean,     // { n : |n| <= N }
    DyadicShell,   // { n : N/2 < <n> <= N }
};

// Enumerates the truncation set in lexicographic order (x, then y). The
// fixed order keeps seeded sampling stable across truncations.
std::vector<Freq> truncation_set(int trunc, TruncationMode mode);

}  // namespace qns
