#pragma once

// Constructive local solver for f = sqrt(omega): Picard iteration
//   df^(n+1)/dt = -u^(n) df^(n+1)/dtheta + (1/2) f^(n+1) H((f^(n))^2),
// each stage solved semi-Lagrangically along characteristics with a
// trapezoidal integrating factor.  The L2 / H1 norms of f are conserved
// along the true flow, which is what conservation_check measures.

#include <vector>

#include "clm/spectral.hpp"

namespace clm {

// C-infinity compactly supported initial profile:
// exp(-1 / (1 - (theta/a)^2)) for |theta| < a, else 0.
double bump(double theta, double a = 2.0);

// Grid-collocation projections of the bump and its square root to order N.
SpectralField bump_field(int N, double a = 2.0);
SpectralField sqrt_bump_field(int N, double a = 2.0);

// Samples on the uniform M-point grid (the semi-Lagrangian state).
struct GridField {
    int M = 0;
    std::vector<double> values;
};

struct AdvectResult {
    GridField f;
    double max_displacement = 0.0;   // sup over steps of |dt * u| at the feet
    bool resolution_warning = false; // characteristic jumped more than pi/2
};

// Solve df/dt + u df/dtheta = r f on [0, T]: backtrack each grid node with
// an RK2 midpoint step (u averaged between the two step levels), read f at
// the foot by trigonometric interpolation at interp_order, and apply
// exp of the trapezoidal integral of r along the characteristic.
// u and r are indexed by step: both need ceil(T/dt)+1 entries.
AdvectResult advect_react_solve(const GridField& f0, const std::vector<SpectralField>& u,
                                const std::vector<SpectralField>& r, double T, double dt,
                                int interp_order);

// One Picard sweep's end state.
struct PicardState {
    int iterate_index = 0;
    SpectralField f_n;       // iterate at t = T
    SpectralField u_n;       // velocity recovered from f_n^2
    double cauchy_l2 = 0.0;  // sup over steps of ||f_n - f_{n-1}||_L2
};

struct PicardResult {
    std::vector<double> times;
    std::vector<SpectralField> trajectory;  // converged iterate, one field per step
    std::vector<PicardState> log;
    std::vector<double> ratios;             // cauchy_l2[i] / cauchy_l2[i-1], above noise
    double max_ratio = 0.0;
    bool converged = false;
    double T_used = 0.0;                    // T after any halvings
    int halvings = 0;
    double min_grid_f = 0.0;                // min over the whole grid trajectory
};

// Fixed point of the Picard map to tolerance tol (sup-over-time L2).  The
// local-existence time constant is not computable, so contraction is checked
// a posteriori: if some ratio exceeds 1/2 (or the sweep diverges) the time
// interval is halved and the solve restarts, up to 6 times.  dealias=false
// collocates f^2 on the state grid instead of forming the exact product --
// the aliasing negative control for conservation_check.
PicardResult picard_solve(const SpectralField& f_in, double T, double dt, Gauge gauge,
                          int max_iters = 12, double tol = 1e-12, bool dealias = true);

struct ConservationReport {
    double l2_drift = 0.0;  // max relative drift of ||f||_L2 over the trajectory
    double h1_drift = 0.0;  // same for ||f||_H1
};

ConservationReport conservation_check(const PicardResult& run);

}  // namespace clm
