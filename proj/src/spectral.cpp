#include "clm/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace clm {

namespace {

constexpr double pi = std::numbers::pi;

// One cached FFTW plan pair per transform size.  Plans are created with
// FFTW_ESTIMATE against buffers owned by the entry and reused via the
// new-array execute functions would need alignment guarantees, so we simply
// copy through the owned buffers instead.  thread_local keeps FFTW's
// non-thread-safe planner out of trouble without locks.
struct FftEntry {
    int M = 0;
    double* real = nullptr;
    fftw_complex* cplx = nullptr;
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;

    explicit FftEntry(int m) : M(m) {
        real = fftw_alloc_real(static_cast<size_t>(M));
        cplx = fftw_alloc_complex(static_cast<size_t>(M / 2 + 1));
        r2c = fftw_plan_dft_r2c_1d(M, real, cplx, FFTW_ESTIMATE);
        c2r = fftw_plan_dft_c2r_1d(M, cplx, real, FFTW_ESTIMATE);
    }
    ~FftEntry() {
        if (r2c) fftw_destroy_plan(r2c);
        if (c2r) fftw_destroy_plan(c2r);
        fftw_free(real);
        fftw_free(cplx);
    }
    FftEntry(const FftEntry&) = delete;
    FftEntry& operator=(const FftEntry&) = delete;
};

FftEntry& fft_for(int M) {
    thread_local std::unordered_map<int, FftEntry*> cache;
    auto it = cache.find(M);
    if (it == cache.end()) it = cache.emplace(M, new FftEntry(M)).first;
    return *it->second;
}

void require_resolution(int N, int M, const char* who) {
    if (M < 2 * N + 1)
        throw std::invalid_argument(std::string(who) + ": grid size " + std::to_string(M) +
                                    " cannot resolve truncation order " + std::to_string(N) +
                                    " (need M >= 2N+1)");
}

}  // namespace

SpectralField SpectralField::harmonic_sin(int k, double amp, int N) {
    SpectralField f(N);
    f.b[static_cast<size_t>(k)] = amp;
    return f;
}

SpectralField SpectralField::harmonic_cos(int k, double amp, int N) {
    SpectralField f(N);
    f.a[static_cast<size_t>(k)] = amp;
    return f;
}

int next_fast_size(int n) {
    if (n < 1) return 1;
    for (int m = n;; ++m) {
        int r = m;
        while (r % 2 == 0) r /= 2;
        while (r % 3 == 0) r /= 3;
        while (r % 5 == 0) r /= 5;
        if (r == 1) return m;
    }
}

std::vector<double> grid_points(int M) {
    std::vector<double> th(static_cast<size_t>(M));
    for (int j = 0; j < M; ++j) th[static_cast<size_t>(j)] = -pi + 2.0 * pi * j / M;
    return th;
}

std::vector<double> to_grid(const SpectralField& f, int M) {
    const int N = f.order();
    require_resolution(N, M, "to_grid");
    FftEntry& e = fft_for(M);
    const int H = M / 2;
    for (int k = 0; k <= H; ++k) e.cplx[k][0] = e.cplx[k][1] = 0.0;
    // The grid starts at -pi, so mode k carries a phase twist (-1)^k relative
    // to the index-space DFT.
    e.cplx[0][0] = f.a[0];
    for (int k = 1; k <= N; ++k) {
        const double s = (k % 2 == 0) ? 1.0 : -1.0;
        e.cplx[k][0] = 0.5 * s * f.a[static_cast<size_t>(k)];
        e.cplx[k][1] = -0.5 * s * f.b[static_cast<size_t>(k)];
    }
    fftw_execute(e.c2r);
    return std::vector<double>(e.real, e.real + M);
}

SpectralField from_grid(const std::vector<double>& samples, int N) {
    const int M = static_cast<int>(samples.size());
    require_resolution(N, M, "from_grid");
    FftEntry& e = fft_for(M);
    for (int j = 0; j < M; ++j) e.real[j] = samples[static_cast<size_t>(j)];
    fftw_execute(e.r2c);
    SpectralField f(N);
    f.a[0] = e.cplx[0][0] / M;
    for (int k = 1; k <= N; ++k) {
        const double s = (k % 2 == 0) ? 1.0 : -1.0;
        f.a[static_cast<size_t>(k)] = 2.0 * s * e.cplx[k][0] / M;
        f.b[static_cast<size_t>(k)] = -2.0 * s * e.cplx[k][1] / M;
    }
    return f;
}

SpectralField hilbert(const SpectralField& f) {
    const int N = f.order();
    SpectralField h(N);
    for (int k = 1; k <= N; ++k) {
        h.a[static_cast<size_t>(k)] = -f.b[static_cast<size_t>(k)];
        h.b[static_cast<size_t>(k)] = f.a[static_cast<size_t>(k)];
    }
    return h;
}

SpectralField derivative(const SpectralField& f) {
    const int N = f.order();
    SpectralField d(N);
    for (int k = 1; k <= N; ++k) {
        d.a[static_cast<size_t>(k)] = k * f.b[static_cast<size_t>(k)];
        d.b[static_cast<size_t>(k)] = -k * f.a[static_cast<size_t>(k)];
    }
    return d;
}

SpectralField velocity_from_vorticity(const SpectralField& omega, Gauge gauge) {
    const int N = omega.order();
    SpectralField u(N);
    // du/dtheta = H(omega): matching coefficients gives u_k = -omega_k / k
    // pairwise; H kills the mean so the antiderivative is always periodic.
    for (int k = 1; k <= N; ++k) {
        u.a[static_cast<size_t>(k)] = -omega.a[static_cast<size_t>(k)] / k;
        u.b[static_cast<size_t>(k)] = -omega.b[static_cast<size_t>(k)] / k;
    }
    if (gauge == Gauge::VanishAtZero) {
        double at_zero = 0.0;
        for (int k = 1; k <= N; ++k) at_zero += u.a[static_cast<size_t>(k)];
        u.a[0] = -at_zero;  // u(0) = a0 + sum a_k = 0
    }
    return u;
}

SpectralField multiply(const SpectralField& f, const SpectralField& g, int n_out) {
    // No product mode below n_out may collect aliased energy, and the grid
    // must also be large enough for from_grid to read off n_out modes.
    const int M = next_fast_size(std::max(f.order() + g.order() + n_out + 1, 2 * n_out + 1));
    std::vector<double> fg = to_grid(f, M);
    const std::vector<double> gg = to_grid(g, M);
    for (int j = 0; j < M; ++j) fg[static_cast<size_t>(j)] *= gg[static_cast<size_t>(j)];
    return from_grid(fg, n_out);
}

SpectralField multiply(const SpectralField& f, const SpectralField& g) {
    return multiply(f, g, std::max(f.order(), g.order()));
}

double eval_at(const SpectralField& f, double theta) {
    const int N = f.order();
    double out = f.a[0];
    const double c1 = std::cos(theta), s1 = std::sin(theta);
    double ck = 1.0, sk = 0.0;
    for (int k = 1; k <= N; ++k) {
        const double c = ck * c1 - sk * s1;
        const double s = sk * c1 + ck * s1;
        ck = c;
        sk = s;
        out += f.a[static_cast<size_t>(k)] * ck + f.b[static_cast<size_t>(k)] * sk;
    }
    return out;
}

std::vector<double> eval_at(const SpectralField& f, const std::vector<double>& theta) {
    std::vector<double> out(theta.size());
    for (size_t j = 0; j < theta.size(); ++j) out[j] = eval_at(f, theta[j]);
    return out;
}

double mass(const SpectralField& f) { return 2.0 * pi * f.a[0]; }

double norm_l2(const SpectralField& f) {
    double s = 2.0 * f.a[0] * f.a[0];
    for (int k = 1; k <= f.order(); ++k)
        s += f.a[static_cast<size_t>(k)] * f.a[static_cast<size_t>(k)] +
             f.b[static_cast<size_t>(k)] * f.b[static_cast<size_t>(k)];
    return std::sqrt(pi * s);
}

double norm_h1_dot(const SpectralField& f) {
    double s = 0.0;
    for (int k = 1; k <= f.order(); ++k)
        s += static_cast<double>(k) * k *
             (f.a[static_cast<size_t>(k)] * f.a[static_cast<size_t>(k)] +
              f.b[static_cast<size_t>(k)] * f.b[static_cast<size_t>(k)]);
    return std::sqrt(pi * s);
}

double norm_h1(const SpectralField& f) {
    const double l2 = norm_l2(f);
    const double h1d = norm_h1_dot(f);
    return std::sqrt(l2 * l2 + h1d * h1d);
}

double min_on_grid(const SpectralField& f, int M) {
    const std::vector<double> g = to_grid(f, M);
    double m = g[0];
    for (double v : g)
        if (v < m) m = v;
    return m;
}

double max_abs_on_grid(const SpectralField& f, int M) {
    const std::vector<double> g = to_grid(f, M);
    double m = 0.0;
    for (double v : g)
        if (std::abs(v) > m) m = std::abs(v);
    return m;
}

bool all_finite(const SpectralField& f) {
    for (double v : f.a)
        if (!std::isfinite(v)) return false;
    for (double v : f.b)
        if (!std::isfinite(v)) return false;
    return true;
}

SpectralField add_scaled(const SpectralField& x, const SpectralField& y, double s) {
    SpectralField out(std::max(x.order(), y.order()));
    for (int k = 0; k <= x.order(); ++k) {
        out.a[static_cast<size_t>(k)] = x.a[static_cast<size_t>(k)];
        out.b[static_cast<size_t>(k)] = x.b[static_cast<size_t>(k)];
    }
    for (int k = 0; k <= y.order(); ++k) {
        out.a[static_cast<size_t>(k)] += s * y.a[static_cast<size_t>(k)];
        out.b[static_cast<size_t>(k)] += s * y.b[static_cast<size_t>(k)];
    }
    return out;
}

void scale_in_place(SpectralField& f, double s) {
    for (double& v : f.a) v *= s;
    for (double& v : f.b) v *= s;
}

}  // namespace clm
