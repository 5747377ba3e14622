#pragma once
//
// Fixed-point solver for the first-order remainder v and a direct
// integrating-factor time stepper for the truncated flow.
//
// The remainder solves
//
//     i dv/dt + Lap v = N(z + v),   v(0) = 0,
//     N(u) = |u|^2 - mean(|u|^2),
//
// via the Duhamel fixed point v = Gamma[v],
//
//     Gamma[v](t) = -i int_0^t e^{i(t-t') Lap} N(z + v)(t') dt',
//
// discretized by composite trapezoid on a uniform grid with the propagator
// applied exactly per frequency inside the quadrature. The quadratic
// product is computed exactly on { |n| <= N } by zero-padded transforms
// (band 2N products on a grid of size >= 3N+1 cannot alias back into the
// kept band). The n = 0 mode of the nonlinearity is removed, so every
// Gamma output -- and hence every v iterate -- is mean-zero exactly.
//
// Negative times: u(-t) = conj(u~(t)) where u~ solves the same problem
// from conj(u0); use conjugate_field and a forward run.
//

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "qns/random_field.hpp"

namespace qns {

struct TrajectoryField {
    double dt = 0.0;
    std::vector<double> times;          // t_j = j dt, j = 0..J
    std::vector<SpectralField> fields;  // one snapshot per node, common truncation

    int truncation() const { return fields.empty() ? 0 : fields.front().truncation(); }
};

// F(|u|^2)(n) on { |n| <= N } with the zero mode removed, computed by
// zero-padded transforms on a grid of max(pad_factor*N, 3N+1) points per
// axis. pad_factor >= 3 required.
SpectralField nonlinearity(const SpectralField& u, int pad_factor = 4);

// Reusable transform engine (one FFTW plan pair per truncation/grid).
class Dealiaser {
public:
    Dealiaser(int trunc, int pad_factor);
    ~Dealiaser();
    Dealiaser(const Dealiaser&) = delete;
    Dealiaser& operator=(const Dealiaser&) = delete;

    SpectralField abs_squared_mean_removed(const SpectralField& u);

    int grid() const { return grid_; }

private:
    int trunc_;
    int grid_;
    void* fwd_ = nullptr;  // fftw_plan, kept opaque here
    void* bwd_ = nullptr;
    std::complex<double>* buf_ = nullptr;
};

// Gamma[v] on the shared grid of z_traj and v_traj. Throws on grid or
// truncation mismatch.
TrajectoryField duhamel_map(const TrajectoryField& z_traj, const TrajectoryField& v_traj,
                            int pad_factor = 4);

// z(t_j) = e^{i t_j Lap} u0 on a uniform grid.
TrajectoryField free_evolution(const SpectralField& u0, double T, int grid_nodes);

TrajectoryField add_trajectories(const TrajectoryField& a, const TrajectoryField& b);

SpectralField conjugate_field(const SpectralField& u);

struct SolveParams {
    double T = 0.01;
    int grid_nodes = 64;             // quadrature nodes J (J+1 snapshots)
    double tol = 1e-9;               // sup-in-time H^s stopping distance
    int max_iter = 32;
    double monitor_exponent = 0.1;   // s of the monitoring norm
    int pad_factor = 4;
};

struct SolveDiagnostics {
    int iteration_count = 0;
    std::vector<double> contraction_ratios;  // |v_{k+1}-v_k| / |v_k-v_{k-1}|
    double final_residual = 0.0;
    bool converged = false;
};

struct NoContractionError : std::runtime_error {
    NoContractionError(std::string msg, SolveDiagnostics d);
    SolveDiagnostics diagnostics;
};

// Picard iteration v_{k+1} = Gamma[v_k] from v_0 = 0. Throws
// NoContractionError when max_iter is exhausted (ratios >= 1 is the
// expected failure mode outside the small-T contraction regime).
std::pair<TrajectoryField, SolveDiagnostics> solve_v(const SpectralField& u0,
                                                     const SolveParams& params);
std::pair<TrajectoryField, SolveDiagnostics> solve_v(double alpha, int trunc, GaussianSeed seed,
                                                     double T, double s_exponent, double tol,
                                                     int max_iter);

struct BlowupError : std::runtime_error {
    explicit BlowupError(double time);
    double blowup_time;
};

struct StepOptions {
    int pad_factor = 4;
    double blowup_guard = 1e12;        // max |u-hat| before aborting
    bool nonlinearity_enabled = true;  // off: free flow (consistency checks)
};

// Integrating-factor classical Runge-Kutta for
//     i du/dt + Lap u = P_{<=N} N(u),  u(0) = u0,
// with one output snapshot per step. dt <= T/16 required.
TrajectoryField solve_u_truncated(const SpectralField& u0, double T, double dt,
                                  const StepOptions& opts = {});
TrajectoryField solve_u_truncated(double alpha, int trunc, GaussianSeed seed, double T,
                                  double dt);

// sup over shared grid times of || a(t) - b(t) ||_{H^s}; the smaller
// truncation embeds into the larger.
double trajectory_distance(const TrajectoryField& a, const TrajectoryField& b, double s);

struct ConvergenceRow {
    double alpha;
    int trunc;       // the smaller N of the coupled pair (N, 2N)
    double T;
    double s;
    double distance;  // sup_t ||u_{2N} - u_N||_{H^s}
    int iterations;   // of the 2N solve
    bool converged;
};

// Coupled-seed truncation study along an ascending dyadic list; failed
// cells are skipped (absent rows). s_measure defaults to -alpha - 0.1 when
// NaN is passed.
std::vector<ConvergenceRow> convergence_study(double alpha, GaussianSeed seed,
                                              std::span<const int> trunc_list, double T,
                                              double s_measure, const SolveParams& base);

inline constexpr std::string_view kTrajectoryCsvHeader = "t,n1,n2,re,im";
inline constexpr std::string_view kStudyCsvHeader = "alpha,N,T,s,distance,iterations,converged";

void write_trajectory_csv(std::ostream& os, const TrajectoryField& traj);
void write_study_row(std::ostream& os, const ConvergenceRow& r);

}  // namespace qns
