#include "clm/sqrt_scheme.hpp"

#include <cmath>
#include <stdexcept>

namespace clm {

double bump(double theta, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("bump: width must be positive");
    const double x = theta / a;
    if (!(std::fabs(x) < 1.0)) return 0.0;
    return std::exp(-1.0 / (1.0 - x * x));
}

namespace {

std::vector<double> bump_samples(int N, double a, bool take_sqrt) {
    const int M = next_fast_size(2 * N + 1);
    std::vector<double> th = grid_points(M);
    std::vector<double> s(M);
    for (int j = 0; j < M; ++j) {
        double v = bump(th[j], a);
        s[j] = take_sqrt ? std::sqrt(v) : v;
    }
    return s;
}

double grid_l2_diff(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (size_t j = 0; j < x.size(); ++j) {
        const double d = x[j] - y[j];
        s += d * d;
    }
    return std::sqrt(2.0 * M_PI / static_cast<double>(x.size()) * s);
}

bool finite_row(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// Shared semi-Lagrangian stepper: advance all S steps, appending rows.
// Returns false if a row went non-finite (reaction overflow).
bool advect_rows(std::vector<std::vector<double>>& rows, const std::vector<SpectralField>& u,
                 const std::vector<SpectralField>& r, long S, double dt, int interp_order,
                 double& max_disp) {
    const int M = static_cast<int>(rows[0].size());
    const std::vector<double> th = grid_points(M);
    std::vector<double> foot(M), x_half(M);
    for (long m = 0; m < S; ++m) {
        std::vector<double> u_here = to_grid(u[m], M);
        SpectralField u_mid = add_scaled(u[m], u[m + 1], 1.0);
        scale_in_place(u_mid, 0.5);
        for (int j = 0; j < M; ++j) x_half[j] = th[j] - 0.5 * dt * u_here[j];
        std::vector<double> u_at_half = eval_at(u_mid, x_half);
        for (int j = 0; j < M; ++j) {
            const double disp = dt * u_at_half[j];
            if (std::fabs(disp) > max_disp) max_disp = std::fabs(disp);
            foot[j] = th[j] - disp;
        }
        SpectralField f_prev = from_grid(rows[m], interp_order);
        std::vector<double> f_foot = eval_at(f_prev, foot);
        std::vector<double> r_foot = eval_at(r[m], foot);
        std::vector<double> r_here = to_grid(r[m + 1], M);
        std::vector<double> next(M);
        for (int j = 0; j < M; ++j)
            next[j] = f_foot[j] * std::exp(0.5 * dt * (r_foot[j] + r_here[j]));
        if (!finite_row(next)) return false;
        rows.push_back(std::move(next));
    }
    return true;
}

}  // namespace

SpectralField bump_field(int N, double a) {
    return from_grid(bump_samples(N, a, false), N);
}

SpectralField sqrt_bump_field(int N, double a) {
    return from_grid(bump_samples(N, a, true), N);
}

AdvectResult advect_react_solve(const GridField& f0, const std::vector<SpectralField>& u,
                                const std::vector<SpectralField>& r, double T, double dt,
                                int interp_order) {
    if (dt <= 0.0) throw std::invalid_argument("advect_react_solve: dt must be positive");
    if (f0.M != static_cast<int>(f0.values.size()))
        throw std::invalid_argument("advect_react_solve: GridField size mismatch");
    const long S = std::lround(T / dt);
    if (static_cast<long>(u.size()) < S + 1 || static_cast<long>(r.size()) < S + 1)
        throw std::invalid_argument("advect_react_solve: need one u and r sample per step level");

    std::vector<std::vector<double>> rows;
    rows.reserve(S + 1);
    rows.push_back(f0.values);
    AdvectResult out;
    advect_rows(rows, u, r, S, dt, interp_order, out.max_displacement);
    out.f.M = f0.M;
    out.f.values = rows.back();
    out.resolution_warning = out.max_displacement > M_PI / 2.0;
    return out;
}

PicardResult picard_solve(const SpectralField& f_in, double T, double dt, Gauge gauge,
                          int max_iters, double tol, bool dealias) {
    if (dt <= 0.0) throw std::invalid_argument("picard_solve: dt must be positive");
    if (T < 0.0) throw std::invalid_argument("picard_solve: T must be nonnegative");
    if (max_iters < 1) throw std::invalid_argument("picard_solve: max_iters must be >= 1");

    const int N = f_in.order();
    const int M = next_fast_size(2 * N + 1);
    const std::vector<double> f0 = to_grid(f_in, M);

    PicardResult best;
    double T_cur = T;
    for (int attempt = 0; attempt <= 6; ++attempt) {
        const long S = std::lround(T_cur / dt);
        PicardResult res;
        res.T_used = T_cur;
        res.halvings = attempt;

        std::vector<std::vector<double>> F(S + 1, f0);
        std::vector<double> cauchys;
        bool diverged = false;
        for (int it = 1; it <= max_iters; ++it) {
            std::vector<SpectralField> u(S + 1), r(S + 1);
            for (long m = 0; m <= S; ++m) {
                SpectralField fm = from_grid(F[m], N);
                SpectralField w;
                if (dealias) {
                    w = multiply(fm, fm, N);
                } else {
                    std::vector<double> sq(M);
                    for (int j = 0; j < M; ++j) sq[j] = F[m][j] * F[m][j];
                    w = from_grid(sq, N);
                }
                u[m] = velocity_from_vorticity(w, gauge);
                r[m] = hilbert(w);
                scale_in_place(r[m], 0.5);
            }
            std::vector<std::vector<double>> Fn;
            Fn.reserve(S + 1);
            Fn.push_back(f0);
            double disp = 0.0;
            if (!advect_rows(Fn, u, r, S, dt, N, disp)) {
                diverged = true;
                break;
            }
            double c = 0.0;
            for (long m = 0; m <= S; ++m) {
                const double d = grid_l2_diff(Fn[m], F[m]);
                if (d > c) c = d;
            }
            cauchys.push_back(c);
            F = std::move(Fn);

            PicardState st;
            st.iterate_index = it;
            st.f_n = from_grid(F[S], N);
            st.u_n = velocity_from_vorticity(multiply(st.f_n, st.f_n, N), gauge);
            st.cauchy_l2 = c;
            res.log.push_back(std::move(st));
            if (c <= tol) {
                res.converged = true;
                break;
            }
        }

        // Ratios are only meaningful while the differences sit well above
        // the convergence floor; below that they measure roundoff noise.
        for (size_t i = 1; i < cauchys.size(); ++i) {
            if (cauchys[i - 1] > 1e3 * tol) {
                const double ratio = cauchys[i] / cauchys[i - 1];
                res.ratios.push_back(ratio);
                if (ratio > res.max_ratio) res.max_ratio = ratio;
            }
        }

        if (!diverged && res.converged && res.max_ratio <= 0.5) {
            res.min_grid_f = F[0][0];
            res.times.resize(S + 1);
            res.trajectory.reserve(S + 1);
            for (long m = 0; m <= S; ++m) {
                res.times[m] = static_cast<double>(m) * dt;
                res.trajectory.push_back(from_grid(F[m], N));
                for (double v : F[m])
                    if (v < res.min_grid_f) res.min_grid_f = v;
            }
            return res;
        }
        best = std::move(res);
        best.converged = false;
        T_cur *= 0.5;
    }
    return best;  // time-interval-too-long signal: converged stays false
}

ConservationReport conservation_check(const PicardResult& run) {
    ConservationReport rep;
    if (run.trajectory.empty()) return rep;
    const double l2_0 = norm_l2(run.trajectory.front());
    const double h1_0 = norm_h1(run.trajectory.front());
    for (const SpectralField& f : run.trajectory) {
        const double dl2 = std::fabs(norm_l2(f) - l2_0);
        const double dh1 = std::fabs(norm_h1(f) - h1_0);
        rep.l2_drift = std::max(rep.l2_drift, l2_0 > 0.0 ? dl2 / l2_0 : dl2);
        rep.h1_drift = std::max(rep.h1_drift, h1_0 > 0.0 ? dh1 / h1_0 : dh1);
    }
    return rep;
}

}  // namespace clm
