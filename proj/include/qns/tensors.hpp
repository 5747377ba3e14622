#pragma once
//
// Base resonance tensors and their partitioned operator norms.
//
// The base tensor at level m is the 0/1 indicator
//
//     h^m(n, n1, n2) = 1[n - n1 + n2 = 0] 1[|n|^2 - |n1|^2 + |n2|^2 = m]
//
// restricted to a product support (balls or dyadic shells per axis, with
// optional zero-mode exclusions). For a partition of the axes into input
// set B and output set C, ||h||_{B -> C} is the largest singular value of
// the matrix unfolding with rows indexed by the C-tuples and columns by the
// B-tuples; an empty side degenerates to the Frobenius norm.
//
// Norms are computed by power iteration on the normal operator; a dense
// SVD serves as the test-side oracle on small supports. Schur's test gives
// the cheap upper bound sqrt(max row mass) * sqrt(max column mass) used by
// the deterministic estimates.
//

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "qns/lattice.hpp"
#include "qns/random_field.hpp"

namespace qns {

// Axis bitmasks for partitions.
inline constexpr unsigned kAxisN = 1;
inline constexpr unsigned kAxisN1 = 2;
inline constexpr unsigned kAxisN2 = 4;
inline constexpr unsigned kAllAxes = kAxisN | kAxisN1 | kAxisN2;

// Partition (B, C) of the axes: input_axes = B, output_axes = C.
struct Partition {
    unsigned input_axes = 0;
    unsigned output_axes = kAllAxes;
};

// Partition with output = complement of input.
constexpr Partition partition_from_input(unsigned input_axes) {
    return {input_axes, kAllAxes & ~input_axes};
}

struct Triple {
    Freq n, n1, n2;
};

class SparseTensor3 {
public:
    // add() enforces the convolution-plane invariant n - n1 + n2 = 0.
    void add(Triple t, std::complex<double> value);

    std::size_t size() const { return support_.size(); }
    const Triple& triple(std::size_t i) const { return support_[i]; }
    std::complex<double> value(std::size_t i) const { return values_[i]; }
    void set_value(std::size_t i, std::complex<double> v) { values_[i] = v; }

private:
    std::vector<Triple> support_;
    std::vector<std::complex<double>> values_;
};

struct AxisSupport {
    enum class Kind { Ball, Shell };  // Shell: radius/2 < <x> <= radius, origin-centered
    Kind kind = Kind::Ball;
    Freq center{};  // Ball only
    int radius = 0;
    bool exclude_zero = false;
};

struct SupportSpec {
    AxisSupport n, n1, n2;
    // Drops triples whose summed axis pairs with a free axis (n2 = n or
    // n2 = n1); the filtered support is a subset of the unfiltered one.
    bool no_pairing = false;
};

// Enumeration budget for base-tensor construction, in candidate (n1, n2)
// pairs; sized to admit radius-32 diagonal slices.
inline constexpr double kBuildBudget = 2e7;

// Indicator tensor of the constraint set intersected with the support.
SparseTensor3 build_base_tensor(std::int64_t m, const SupportSpec& spec);

// Thrown when power iteration fails to converge within the cap and one
// seeded restart; carries the last estimate and its residual.
struct PowerIterationError : std::runtime_error {
    PowerIterationError(double est, double res);
    double last_estimate;
    double residual;
};

// Largest singular value of the unfolding, to relative tolerance tol
// (default 1e-8, 500-iteration cap, deterministic start, one restart).
// Empty input or output side returns the Frobenius norm.
double operator_norm(const SparseTensor3& tensor, Partition p, double tol = 1e-8);

// Schur bound for nonnegative tensors; throws on negative or non-real
// entries. operator_norm <= schur_bound always.
double schur_bound(const SparseTensor3& tensor, Partition p);

// ---------------------------------------------------------------------------
// Deterministic estimates
// ---------------------------------------------------------------------------

struct DetEstimateRow {
    std::string_view name;  // "012", "1-02", "2-01", "0-12"
    double lhs;
    double rhs;
    double ratio;
};

struct DetEstimateReport {
    int radius_n, radius_n1, radius_n2;
    std::int64_t m;
    std::array<DetEstimateRow, 4> rows;
    double duality_gap;  // | ||h||_{n1->n n2} - ||h||_{n n2->n1} |
};

// Evaluates the four partitioned-norm estimates at one scale triple, balls
// at the origin:
//   012   Frobenius            <=  N1^{1/2} N2^{1/2} max{N1,N2}^eps
//   1-02  ||.||_{n1 -> n n2}   <=  max{N,N2}^eps
//   2-01  ||.||_{n2 -> n n1}   <=  min{N,N1}^{1/2}   (n2 != 0)
//   0-12  ||.||_{n -> n1 n2}   <=  min{N1,N2}^{1/2}  (n != 0)
DetEstimateReport verify_deterministic_estimates(int radius_n, int radius_n1, int radius_n2,
                                                 std::int64_t m, double eps);

inline constexpr std::string_view kTensorCsvHeader = "estimate,N,N1,N2,m,lhs,rhs,ratio";

void write_estimate_rows(std::ostream& os, const DetEstimateReport& rep);

// ---------------------------------------------------------------------------
// Random tensor probe
// ---------------------------------------------------------------------------

struct ProbeReport {
    double denominator;   // max over partitions of the deterministic norms
    double median_ratio;  // ||H||_{n -> n1} / denominator, per-trial median
    double q90;
    double q99;
    int trials;
};

// Per trial draws unimodular eta_{n2} = g_{n2}/|g_{n2}|, contracts the
// <n2>^{alpha-1}-weighted base tensor against conj(eta), and measures
// ||H||_{n -> n1} against max{ ||h~||_{n n2 -> n1}, ||h~||_{n -> n1 n2} }.
ProbeReport random_tensor_probe(std::int64_t m, const SupportSpec& spec, double alpha,
                                int trials, GaussianSeed seed);

// Shell support at scale M used by the probe scans: all three axes on the
// dyadic shell of radius M, zero modes excluded on n, pairings dropped.
SupportSpec probe_support(int scale);

// Least-squares slope of log(median ratio) against log(M) over the scales.
double probe_median_slope(std::int64_t m, double alpha, std::span<const int> scales, int trials,
                          GaussianSeed seed);

}  // namespace qns
