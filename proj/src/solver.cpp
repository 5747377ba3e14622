#include "qns/solver.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <ostream>

#include "qns/csv.hpp"

namespace qns {

namespace {

// FFTW's planner is not thread-safe; executions on distinct plans are.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::complex<double> propagator(Freq n, double t) {
    const double theta = -t * static_cast<double>(norm_sq(n));
    return {std::cos(theta), std::sin(theta)};
}

void check_shared_grid(const TrajectoryField& a, const TrajectoryField& b, const char* who) {
    if (a.times.size() != b.times.size() || a.dt != b.dt ||
        a.truncation() != b.truncation())
        throw std::invalid_argument(std::string(who) + ": trajectories must share grid and truncation");
}

}  // namespace

Dealiaser::Dealiaser(int trunc, int pad_factor) : trunc_(trunc) {
    if (trunc < 1) throw std::invalid_argument("Dealiaser: N >= 1 required");
    if (pad_factor < 3) throw std::invalid_argument("Dealiaser: pad_factor >= 3 required");
    // Band-2N products alias by multiples of the grid size; any grid
    // beyond 3N keeps the aliases out of { |n| <= N }.
    grid_ = std::max(pad_factor * trunc, 3 * trunc + 1);
    buf_ = reinterpret_cast<std::complex<double>*>(
        fftw_alloc_complex(static_cast<std::size_t>(grid_) * grid_));
    std::lock_guard lock(planner_mutex());
    auto* raw = reinterpret_cast<fftw_complex*>(buf_);
    bwd_ = fftw_plan_dft_2d(grid_, grid_, raw, raw, FFTW_BACKWARD, FFTW_ESTIMATE);
    fwd_ = fftw_plan_dft_2d(grid_, grid_, raw, raw, FFTW_FORWARD, FFTW_ESTIMATE);
}

Dealiaser::~Dealiaser() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
    fftw_free(buf_);
}

SpectralField Dealiaser::abs_squared_mean_removed(const SpectralField& u) {
    if (u.truncation() != trunc_)
        throw std::invalid_argument("Dealiaser: truncation mismatch");
    const int g = grid_;
    std::fill(buf_, buf_ + static_cast<std::size_t>(g) * g, std::complex<double>{});
    const auto slot = [g](Freq n) {
        const int ix = ((n.x % g) + g) % g;
        const int iy = ((n.y % g) + g) % g;
        return static_cast<std::size_t>(ix) * g + iy;
    };
    for (Freq n : u.modes()) buf_[slot(n)] = u[n];
    fftw_execute(static_cast<fftw_plan>(bwd_));
    for (std::size_t i = 0; i < static_cast<std::size_t>(g) * g; ++i)
        buf_[i] = std::norm(buf_[i]);
    fftw_execute(static_cast<fftw_plan>(fwd_));
    const double scale = 1.0 / (static_cast<double>(g) * g);
    SpectralField out(trunc_);
    for (Freq n : out.modes()) out[n] = buf_[slot(n)] * scale;
    out[{0, 0}] = 0.0;  // mean removal
    return out;
}

SpectralField nonlinearity(const SpectralField& u, int pad_factor) {
    Dealiaser engine(u.truncation(), pad_factor);
    return engine.abs_squared_mean_removed(u);
}

TrajectoryField free_evolution(const SpectralField& u0, double T, int grid_nodes) {
    if (grid_nodes < 1) throw std::invalid_argument("free_evolution: grid_nodes >= 1 required");
    TrajectoryField traj;
    traj.dt = T / grid_nodes;
    for (int j = 0; j <= grid_nodes; ++j) {
        traj.times.push_back(j * traj.dt);
        traj.fields.push_back(linear_flow(u0, traj.times.back()));
    }
    return traj;
}

TrajectoryField add_trajectories(const TrajectoryField& a, const TrajectoryField& b) {
    check_shared_grid(a, b, "add_trajectories");
    TrajectoryField out = a;
    for (std::size_t j = 0; j < out.fields.size(); ++j)
        for (Freq n : out.fields[j].modes()) out.fields[j][n] += b.fields[j][n];
    return out;
}

SpectralField conjugate_field(const SpectralField& u) {
    SpectralField out(u.truncation());
    for (Freq n : u.modes()) out[n] = std::conj(u[n]);
    return out;
}

TrajectoryField duhamel_map(const TrajectoryField& z_traj, const TrajectoryField& v_traj,
                            int pad_factor) {
    check_shared_grid(z_traj, v_traj, "duhamel_map");
    const int trunc = z_traj.truncation();
    const std::size_t nodes = z_traj.times.size();
    const double dt = z_traj.dt;

    Dealiaser engine(trunc, pad_factor);
    std::vector<SpectralField> w;
    w.reserve(nodes);
    for (std::size_t j = 0; j < nodes; ++j) {
        SpectralField sum = z_traj.fields[j];
        for (Freq n : sum.modes()) sum[n] += v_traj.fields[j][n];
        w.push_back(engine.abs_squared_mean_removed(sum));
    }

    // Composite trapezoid, advanced incrementally:
    //   G_j = e^{i dt Lap} G_{j-1} + dt/2 (e^{i dt Lap} w_{j-1} + w_j).
    TrajectoryField out;
    out.dt = dt;
    out.times = z_traj.times;
    out.fields.assign(nodes, SpectralField(trunc));
    SpectralField acc(trunc);
    const auto modes = acc.modes();
    for (std::size_t j = 1; j < nodes; ++j) {
        for (Freq n : modes) {
            const auto step = propagator(n, dt);
            acc[n] = step * (acc[n] + 0.5 * dt * w[j - 1][n]) + 0.5 * dt * w[j][n];
        }
        for (Freq n : modes) out.fields[j][n] = std::complex<double>{0.0, -1.0} * acc[n];
    }
    return out;
}

NoContractionError::NoContractionError(std::string msg, SolveDiagnostics d)
    : std::runtime_error(std::move(msg)), diagnostics(std::move(d)) {}

std::pair<TrajectoryField, SolveDiagnostics> solve_v(const SpectralField& u0,
                                                     const SolveParams& params) {
    if (params.T <= 0.0) throw std::invalid_argument("solve_v: T > 0 required");
    if (params.tol <= 0.0) throw std::invalid_argument("solve_v: tol > 0 required");
    const TrajectoryField z = free_evolution(u0, params.T, params.grid_nodes);

    TrajectoryField v;
    v.dt = z.dt;
    v.times = z.times;
    v.fields.assign(z.times.size(), SpectralField(u0.truncation()));

    SolveDiagnostics diag;
    double prev_dist = -1.0;
    for (int k = 0; k < params.max_iter; ++k) {
        TrajectoryField next = duhamel_map(z, v, params.pad_factor);
        double dist = 0.0;
        for (std::size_t j = 0; j < v.fields.size(); ++j) {
            SpectralField diff = next.fields[j];
            for (Freq n : diff.modes()) diff[n] -= v.fields[j][n];
            const double d = sobolev_norm(diff, params.monitor_exponent);
            // a NaN from an overflowed iterate must not vanish inside max()
            if (!std::isfinite(d)) dist = std::numeric_limits<double>::infinity();
            if (std::isfinite(dist)) dist = std::max(dist, d);
        }
        v = std::move(next);
        diag.iteration_count = k + 1;
        if (prev_dist > 0.0) diag.contraction_ratios.push_back(dist / prev_dist);
        diag.final_residual = dist;
        if (dist <= params.tol) {
            diag.converged = true;
            return {std::move(v), std::move(diag)};
        }
        if (!std::isfinite(dist))
            throw NoContractionError("no contraction at this (alpha, N, T, seed)",
                                     std::move(diag));
        prev_dist = dist;
    }
    const bool tolerance_only = !diag.contraction_ratios.empty() &&
                                std::isfinite(diag.contraction_ratios.back()) &&
                                diag.contraction_ratios.back() < 1.0;
    throw NoContractionError(tolerance_only
                                 ? "contraction tolerance not reached within max_iter"
                                 : "no contraction at this (alpha, N, T, seed)",
                             std::move(diag));
}

std::pair<TrajectoryField, SolveDiagnostics> solve_v(double alpha, int trunc, GaussianSeed seed,
                                                     double T, double s_exponent, double tol,
                                                     int max_iter) {
    SolveParams params;
    params.T = T;
    params.tol = tol;
    params.max_iter = max_iter;
    params.monitor_exponent = s_exponent;
    return solve_v(sample_data(seed, alpha, trunc), params);
}

BlowupError::BlowupError(double time)
    : std::runtime_error("blow-up guard tripped at t = " + format_g17(time)), blowup_time(time) {}

TrajectoryField solve_u_truncated(const SpectralField& u0, double T, double dt,
                                  const StepOptions& opts) {
    if (T <= 0.0) throw std::invalid_argument("solve_u_truncated: T > 0 required");
    if (dt <= 0.0 || dt > T / 16.0)
        throw std::invalid_argument("solve_u_truncated: dt <= T/16 required");
    const int trunc = u0.truncation();
    const int steps = static_cast<int>(std::lround(T / dt));
    const double h = T / steps;

    Dealiaser engine(trunc, opts.pad_factor);
    const auto modes = u0.modes();

    // Integrating factor: w-hat(n, t) = e^{it|n|^2} u-hat(n, t); the stiff
    // rotation is exact and RK4 only sees the nonlinear term.
    const auto rhs = [&](double t, const SpectralField& w) {
        SpectralField u(trunc);
        for (Freq n : modes) u[n] = w[n] * propagator(n, t);
        if (!opts.nonlinearity_enabled) return SpectralField(trunc);
        SpectralField nl = engine.abs_squared_mean_removed(u);
        SpectralField out(trunc);
        for (Freq n : modes)
            out[n] = std::complex<double>{0.0, -1.0} * nl[n] * std::conj(propagator(n, t));
        return out;
    };

    TrajectoryField traj;
    traj.dt = h;
    traj.times.push_back(0.0);
    traj.fields.push_back(u0);

    SpectralField w = u0;  // at t = 0 the gauge is the identity
    for (int step = 0; step < steps; ++step) {
        const double t = step * h;
        const SpectralField k1 = rhs(t, w);
        SpectralField tmp(trunc);
        for (Freq n : modes) tmp[n] = w[n] + 0.5 * h * k1[n];
        const SpectralField k2 = rhs(t + 0.5 * h, tmp);
        for (Freq n : modes) tmp[n] = w[n] + 0.5 * h * k2[n];
        const SpectralField k3 = rhs(t + 0.5 * h, tmp);
        for (Freq n : modes) tmp[n] = w[n] + h * k3[n];
        const SpectralField k4 = rhs(t + h, tmp);
        for (Freq n : modes)
            w[n] += (h / 6.0) * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);

        const double t_next = (step + 1) * h;
        SpectralField u(trunc);
        double peak = 0.0;
        for (Freq n : modes) {
            u[n] = w[n] * propagator(n, t_next);
            peak = std::max(peak, std::abs(u[n]));
        }
        if (peak > opts.blowup_guard) throw BlowupError(t_next);
        traj.times.push_back(t_next);
        traj.fields.push_back(std::move(u));
    }
    return traj;
}

TrajectoryField solve_u_truncated(double alpha, int trunc, GaussianSeed seed, double T,
                                  double dt) {
    return solve_u_truncated(sample_data(seed, alpha, trunc), T, dt);
}

double trajectory_distance(const TrajectoryField& a, const TrajectoryField& b, double s) {
    if (a.times.size() != b.times.size())
        throw std::invalid_argument("trajectory_distance: grid mismatch");
    const TrajectoryField& big = a.truncation() >= b.truncation() ? a : b;
    const TrajectoryField& small = a.truncation() >= b.truncation() ? b : a;
    double dist = 0.0;
    for (std::size_t j = 0; j < a.times.size(); ++j) {
        SpectralField diff = big.fields[j];
        for (Freq n : small.fields[j].modes()) diff[n] -= small.fields[j][n];
        dist = std::max(dist, sobolev_norm(diff, s));
    }
    return dist;
}

std::vector<ConvergenceRow> convergence_study(double alpha, GaussianSeed seed,
                                              std::span<const int> trunc_list, double T,
                                              double s_measure, const SolveParams& base) {
    if (trunc_list.size() < 2)
        throw std::invalid_argument("convergence_study: at least two truncations required");
    for (std::size_t i = 1; i < trunc_list.size(); ++i)
        if (trunc_list[i] != 2 * trunc_list[i - 1])
            throw std::invalid_argument("convergence_study: truncations must ascend dyadically");
    const double s = std::isnan(s_measure) ? -alpha - 0.1 : s_measure;

    SolveParams params = base;
    params.T = T;

    std::vector<ConvergenceRow> rows;
    bool have_prev = false;
    TrajectoryField prev_u;
    int prev_trunc = 0;
    for (int trunc : trunc_list) {
        try {
            const auto [v, diag] = solve_v(sample_data(seed, alpha, trunc), params);
            const TrajectoryField u =
                add_trajectories(free_evolution(sample_data(seed, alpha, trunc), T,
                                                params.grid_nodes),
                                 v);
            if (have_prev) {
                rows.push_back({alpha, prev_trunc, T, s, trajectory_distance(u, prev_u, s),
                                diag.iteration_count, true});
            }
            prev_u = u;
            prev_trunc = trunc;
            have_prev = true;
        } catch (const NoContractionError&) {
            have_prev = false;  // failed cell: absent row, the next pair restarts
        } catch (const BlowupError&) {
            have_prev = false;
        }
    }
    return rows;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryField& traj) {
    os << kTrajectoryCsvHeader << '\n';
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
        for (Freq n : traj.fields[j].modes()) {
            const auto v = traj.fields[j][n];
            os << format_g17(traj.times[j]) << ',' << n.x << ',' << n.y << ','
               << format_g17(v.real()) << ',' << format_g17(v.imag()) << '\n';
        }
    }
}

void write_study_row(std::ostream& os, const ConvergenceRow& r) {
    os << format_g17(r.alpha) << ',' << r.trunc << ',' << format_g17(r.T) << ','
       << format_g17(r.s) << ',' << format_g17(r.distance) << ',' << r.iterations << ','
       << (r.converged ? 1 : 0) << '\n';
}

}  // namespace qns
