#include "qns/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace qns {

double bracket(Freq n) { return std::sqrt(1.0 + static_cast<double>(norm_sq(n))); }

double bracket_pow(Freq n, double p) {
    if (p == 0.0) return 1.0;
    // pow(1 + |n|^2, p/2) in one call; exact for the frequent <n>^0 case above.
    return std::pow(1.0 + static_cast<double>(norm_sq(n)), 0.5 * p);
}

std::int64_t phase(Nonlinearity nl, Freq n, Freq n1, Freq n2) {
    switch (nl) {
        case Nonlinearity::Abs2:
            if (!is_zero(n - n1 + n2))
                throw std::invalid_argument("phase(Abs2): triple violates n - n1 + n2 = 0");
            return norm_sq(n) - norm_sq(n1) + norm_sq(n2);
        case Nonlinearity::Square:
            return -2 * dot(n1, n2);
        case Nonlinearity::ConjSquare:
            return norm_sq(n) + norm_sq(n1) + norm_sq(n2);
    }
    throw std::invalid_argument("phase: unknown nonlinearity");
}

std::vector<Freq> truncation_set(int trunc, TruncationMode mode) {
    if (trunc < 1) throw std::invalid_argument("truncation_set: N >= 1 required");
    const std::int64_t nn = std::int64_t{trunc} * trunc;
    std::vector<Freq> out;
    for (std::int32_t x = -trunc; x <= trunc; ++x) {
        for (std::int32_t y = -trunc; y <= trunc; ++y) {
            const Freq n{x, y};
            const std::int64_t r2 = norm_sq(n);
            bool keep = false;
            switch (mode) {
                case TruncationMode::Euclidean:
                    keep = r2 <= nn;
                    break;
                case TruncationMode::DyadicShell:
                    // N/2 < <n> <= N, tested as N^2 < 4(1 + |n|^2) and 1 + |n|^2 <= N^2.
                    keep = (nn < 4 * (1 + r2)) && (1 + r2 <= nn);
                    break;
            }
            if (keep) out.push_back(n);
        }
    }
    return out;
}

}  // namespace qns
