#pragma once

// Real trigonometric polynomials on the circle [-pi, pi) and the exact
// spectral operators used by the CLM / De Gregorio solvers: Hilbert
// transform, derivative, gauge-resolved velocity recovery, and dealiased
// products.  Everything here is a pure function of its inputs.

#include <vector>

namespace clm {

// f(theta) = a[0] + sum_{k=1}^{N} a[k] cos(k theta) + b[k] sin(k theta).
// a[0] is the mean; b[0] is kept as padding so a and b index alike.
struct SpectralField {
    std::vector<double> a;
    std::vector<double> b;

    SpectralField() = default;
    explicit SpectralField(int N) : a(N + 1, 0.0), b(N + 1, 0.0) {}

    int order() const { return static_cast<int>(a.size()) - 1; }

    static SpectralField zero(int N) { return SpectralField(N); }
    // -sin(k theta) and friends come up constantly as equilibria
    static SpectralField harmonic_sin(int k, double amp, int N);
    static SpectralField harmonic_cos(int k, double amp, int N);
};

// Free constant in recovering u from du/dtheta = H(omega).
enum class Gauge { MeanZero, VanishAtZero };

// Smallest M >= n whose prime factors are all in {2, 3, 5} (fast FFT sizes).
int next_fast_size(int n);

// Uniform nodes theta_j = -pi + 2*pi*j/M, j = 0..M-1.
std::vector<double> grid_points(int M);

// Pointwise evaluation on the uniform grid.  Requires M >= 2N+1 so the
// samples determine the polynomial (same rule protects every from_grid).
std::vector<double> to_grid(const SpectralField& f, int M);

// Trigonometric interpolation coefficients from samples; exact for
// band-limited data when M >= 2N+1 (throws otherwise).
SpectralField from_grid(const std::vector<double>& samples, int N);

// Multiplier H: cos k -> sin k, sin k -> -cos k, constants -> 0.
// The sign convention makes H(-sin) = cos, i.e. omega = -sin theta has
// velocity u = sin theta.
SpectralField hilbert(const SpectralField& f);

SpectralField derivative(const SpectralField& f);

// Solve du/dtheta = H(omega) and fix the free constant by the gauge.
SpectralField velocity_from_vorticity(const SpectralField& omega, Gauge gauge);

// Exact product coefficients up to mode n_out: the product is sampled on a
// grid large enough (M >= N_f + N_g + n_out + 1) that no alias image of the
// true 2N-wide spectrum lands below n_out.
SpectralField multiply(const SpectralField& f, const SpectralField& g, int n_out);
SpectralField multiply(const SpectralField& f, const SpectralField& g);  // n_out = max order

// Scattered-point evaluation (used by the semi-Lagrangian solver).
double eval_at(const SpectralField& f, double theta);
std::vector<double> eval_at(const SpectralField& f, const std::vector<double>& theta);

double mass(const SpectralField& f);          // integral over the circle
double norm_l2(const SpectralField& f);
double norm_h1_dot(const SpectralField& f);   // ||f'||_{L2}
double norm_h1(const SpectralField& f);

double min_on_grid(const SpectralField& f, int M);
double max_abs_on_grid(const SpectralField& f, int M);

bool all_finite(const SpectralField& f);

// c = x + s*y (orders may differ; result takes the larger)
SpectralField add_scaled(const SpectralField& x, const SpectralField& y, double s);
void scale_in_place(SpectralField& f, double s);

}  // namespace clm
