#pragma once

// Truncated linearizations of the De Gregorio dynamics at the stationary
// profiles -sin(theta) ("ground") and -sin(2 theta) ("excited"), in Fourier
// and tilde coordinates, plus the weighted seminorms and energy identities
// they satisfy.  Everything is a coefficient-space band matrix; fields enter
// only through the finite-difference oracle at the bottom.

#include <utility>
#include <vector>

#include "clm/spectral.hpp"

namespace clm {

enum class LinearBasis { FourierOdd, FourierEven, TildeOdd, TildeEven };
enum class EquilibriumTag { GroundState, Excited2 };
enum class Parity { Odd, Even };

// Band operator on coefficients c[1..K]; c[0] is the separately-evolved
// zero mode (tilde even case) and is ignored by the band itself.
//
//   (Lc)_m = sub[m] c[m-stride] + diag[m] c[m] + super[m] c[m+stride]
//          + (m == 1 ? dot(extra_first_rows, c) : 0)
//   (Lc)_0 = dot(zero_mode_row, c)      when zero_mode_row is nonempty
//
// Low-mode exceptions that fit in the band (the excited +-3/4 at m = 1)
// live in diag; the ground even basis's dense coupling of every mode into
// mode 1 lives in extra_first_rows.
struct TridiagonalOperator {
    LinearBasis basis_tag = LinearBasis::FourierOdd;
    EquilibriumTag equilibrium_tag = EquilibriumTag::GroundState;
    int K = 0;
    int stride = 1;
    std::vector<double> sub, diag, super;      // indexed 1..K
    std::vector<double> zero_mode_row;         // indexed 1..K, may be empty
    std::vector<double> extra_first_rows;      // indexed 1..K, may be empty

    // c and the result are indexed 0..K (slot 0 = zero mode or unused).
    std::vector<double> apply(const std::vector<double>& c) const;
};

struct XWeights {
    std::vector<double> g_odd;   // indexed 1..K (position 0 unused)
    std::vector<double> g_even;
};

// Ground state -sin(theta).  Odd data in {sin k t}, even data in
// {cos k t - 1}; coupling k -> k+-1 through
//   A_k = -(k-1)^2 / (2k),   B_k = (k^2-1) / (2k),
// the even case adding -(1 - 1/k) of every mode into mode 1.
TridiagonalOperator build_ground_fourier(int K, Parity parity);

// Same operator in the tilde basis, where it is genuinely tridiagonal:
//   sub_k = -d_k, diag_k = -(d_{k+1} - d_k), super_k = d_{k+1},
//   d_k = (k-1)^2 (k+1) / (2 k^2).
// Even data adds the zero-mode row feeding e~_0 (which never feeds back).
TridiagonalOperator build_ground_tilde(int K, Parity parity);

// Exact check (64-bit+ integer arithmetic, no rounding) that the diagonal
// gap d_{k+1} - d_k stays >= 3/8 on 1..K with equality only at k = 1.
bool ground_gap_check(long K);

// Excited state -sin(2 theta).  Odd data in {sin k t}, even in {cos k t};
// stride-2 coupling A_k = -(k-2)^2/(4k), B_k = (k+2)(k-2)/(4k), with the
// k = 1 rows picking up a diagonal +3/4 (odd) / -3/4 (even).
TridiagonalOperator build_excited(int K, Parity parity);

// Weights g_k making sum g_k c_k^2 monotone for the excited operator:
// g_even by the two-chain recursion g_{k+2} = -g_k B_{k+2} / A_k seeded
// g_1 = g_4 = 1 (g_2 = 0: A_2 = 0 orphans that chain); g_odd carries the
// conserved odd-data family (zero on odd indices, chain seeded g_4 = 1,
// g_2 = 1 as a free decoupled scale).
XWeights excited_weights(int K);

// The odd-data even-index conserved family alone (g_even left empty).
// Mode 2 receives from mode 4 but never feeds back, so the functional is
// conserved exactly for data supported on {4, 6, 8, ...}.
XWeights conserved_seminorm_evenmodes(int K);

// sqrt(sum_{k>=1} weights[k] coeffs[k]^2); shorter vector pads with zeros.
double x_seminorm(const std::vector<double>& coeffs, const std::vector<double>& weights);

// RK4 trajectory of dc/dt = op(c).  The scalar q(t) = int_0^t c_1(s)^2 ds
// rides along as an extra integrated component (it enters the excited
// energy identity).  Rows are appended every sample_every steps; a
// non-finite state stops the run after recording the bad row.
struct LinearTrajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> coeffs;  // each indexed 0..K
    std::vector<double> q_mode1;              // running integral of c_1^2
    bool completed = true;
};

LinearTrajectory evolve_linear(const TridiagonalOperator& op, const std::vector<double>& c0,
                               double T, double dt, int sample_every = 1);

// Least-squares exponential rate: fit log(norm) = a - rate * t.
// Throws std::domain_error on nonpositive norms.
double decay_fit(const std::vector<std::pair<double, double>>& series);

// Probe directions for the finite-difference linearization below.
enum class ProbeBasis { OddSin, EvenCosMinusOne, EvenCos };

// Dense K x K matrix of central differences of the De Gregorio rhs around
// an arbitrary equilibrium, along sin(j t) / (cos(j t) - 1) / cos(j t)
// directions.  The rhs is quadratic, so central differences capture the
// linearization to roundoff; fd_step must lie in [1e-7, 1e-3].
std::vector<std::vector<double>> oracle_linearize(const SpectralField& equilibrium, int K,
                                                  double fd_step, Gauge gauge, ProbeBasis basis);

}  // namespace clm
