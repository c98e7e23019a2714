#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "clm/spectral.hpp"

using namespace clm;

namespace {

SpectralField random_field(int N, unsigned seed, double decay = 1.0) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> g;
    SpectralField f(N);
    f.a[0] = g(eng);
    for (int k = 1; k <= N; ++k) {
        const double w = std::pow(double(k), -decay);
        f.a[k] = g(eng) * w;
        f.b[k] = g(eng) * w;
    }
    return f;
}

double max_coeff_diff(const SpectralField& f, const SpectralField& g) {
    double m = 0.0;
    const int N = std::max(f.order(), g.order());
    for (int k = 0; k <= N; ++k) {
        const double fa = k <= f.order() ? f.a[k] : 0.0;
        const double fb = k <= f.order() ? f.b[k] : 0.0;
        const double ga = k <= g.order() ? g.a[k] : 0.0;
        const double gb = k <= g.order() ? g.b[k] : 0.0;
        m = std::max(m, std::max(std::fabs(fa - ga), std::fabs(fb - gb)));
    }
    return m;
}

// L2 pairing on the circle from the coefficients directly.
double inner(const SpectralField& f, const SpectralField& g) {
    const int N = std::min(f.order(), g.order());
    double s = 2.0 * M_PI * f.a[0] * g.a[0];
    for (int k = 1; k <= N; ++k) s += M_PI * (f.a[k] * g.a[k] + f.b[k] * g.b[k]);
    return s;
}

// Reference product through complex exponential coefficients, no FFT.
SpectralField multiply_bruteforce(const SpectralField& f, const SpectralField& g, int n_out) {
    auto ck = [](const SpectralField& h, int k) -> std::complex<double> {
        const int n = std::abs(k);
        if (n > h.order()) return 0.0;
        if (k == 0) return h.a[0];
        const std::complex<double> c(0.5 * h.a[n], -0.5 * h.b[n]);
        return k > 0 ? c : std::conj(c);
    };
    SpectralField out(n_out);
    for (int m = 0; m <= n_out; ++m) {
        std::complex<double> s = 0.0;
        for (int j = -f.order() - g.order(); j <= f.order() + g.order(); ++j)
            s += ck(f, j) * ck(g, m - j);
        if (m == 0) {
            out.a[0] = s.real();
        } else {
            out.a[m] = 2.0 * s.real();
            out.b[m] = -2.0 * s.imag();
        }
    }
    return out;
}

}  // namespace

TEST_CASE("next_fast_size picks smallest 2-3-5 smooth size") {
    CHECK(next_fast_size(1) == 1);
    CHECK(next_fast_size(7) == 8);
    CHECK(next_fast_size(11) == 12);
    CHECK(next_fast_size(121) == 125);
    CHECK(next_fast_size(257) == 270);
    CHECK(next_fast_size(769) == 800);
    CHECK(next_fast_size(800) == 800);
}

TEST_CASE("grid sampling matches analytic evaluation") {
    SpectralField f(5);
    f.a[0] = 0.3;
    f.a[3] = 1.0;
    f.b[5] = -2.0;
    const int M = next_fast_size(2 * 5 + 1);
    std::vector<double> th = grid_points(M);
    std::vector<double> s = to_grid(f, M);
    REQUIRE(s.size() == th.size());
    CHECK(th[0] == doctest::Approx(-M_PI).epsilon(1e-15));
    for (size_t j = 0; j < th.size(); ++j) {
        const double want = 0.3 + std::cos(3 * th[j]) - 2.0 * std::sin(5 * th[j]);
        CHECK(s[j] == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("to_grid/from_grid round trip") {
    SpectralField f = random_field(33, 17);
    for (int M : {2 * 33 + 1, next_fast_size(2 * 33 + 1), 256}) {
        SpectralField back = from_grid(to_grid(f, M), 33);
        CHECK(max_coeff_diff(f, back) < 1e-12);
    }
    CHECK_THROWS_AS(to_grid(f, 2 * 33), std::invalid_argument);
}

TEST_CASE("hilbert transform on harmonics and identities") {
    for (int k : {1, 2, 7}) {
        SpectralField hc = hilbert(SpectralField::harmonic_cos(k, 1.0, 8));
        SpectralField hs = hilbert(SpectralField::harmonic_sin(k, 1.0, 8));
        CHECK(max_coeff_diff(hc, SpectralField::harmonic_sin(k, 1.0, 8)) < 1e-15);
        CHECK(max_coeff_diff(hs, SpectralField::harmonic_cos(k, -1.0, 8)) < 1e-15);
    }
    SpectralField one = SpectralField::zero(4);
    one.a[0] = 1.0;
    CHECK(max_coeff_diff(hilbert(one), SpectralField::zero(4)) < 1e-15);

    // H^2 = -(id - mean)
    SpectralField f = random_field(20, 3);
    SpectralField hh = hilbert(hilbert(f));
    SpectralField want = f;
    scale_in_place(want, -1.0);
    want.a[0] = 0.0;
    CHECK(max_coeff_diff(hh, want) < 1e-14);

    // antisymmetry of the pairing
    SpectralField g = random_field(20, 4);
    CHECK(inner(hilbert(f), g) == doctest::Approx(-inner(f, hilbert(g))).epsilon(1e-12));
}

TEST_CASE("derivative of harmonics") {
    SpectralField d = derivative(SpectralField::harmonic_cos(3, 2.0, 6));
    CHECK(max_coeff_diff(d, SpectralField::harmonic_sin(3, -6.0, 6)) < 1e-15);
    SpectralField one = SpectralField::zero(3);
    one.a[0] = 5.0;
    CHECK(max_coeff_diff(derivative(one), SpectralField::zero(3)) < 1e-15);
}

TEST_CASE("velocity from vorticity fixes u' = H(omega) and the gauge") {
    // ground state: omega = -sin t gives u = sin t in either gauge
    SpectralField w = SpectralField::harmonic_sin(1, -1.0, 8);
    for (Gauge g : {Gauge::MeanZero, Gauge::VanishAtZero}) {
        SpectralField u = velocity_from_vorticity(w, g);
        CHECK(max_coeff_diff(u, SpectralField::harmonic_sin(1, 1.0, 8)) < 1e-15);
        CHECK(max_coeff_diff(derivative(u), hilbert(w)) < 1e-14);
    }
    // generic field: check the defining relation and each gauge's pin
    SpectralField w2 = random_field(16, 9);
    w2.a[0] = 0.0;  // vorticity in the solver is always mean-free
    SpectralField u_mean = velocity_from_vorticity(w2, Gauge::MeanZero);
    SpectralField u_zero = velocity_from_vorticity(w2, Gauge::VanishAtZero);
    CHECK(max_coeff_diff(derivative(u_mean), hilbert(w2)) < 1e-13);
    CHECK(u_mean.a[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(eval_at(u_zero, 0.0) == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("multiply agrees with direct convolution") {
    SpectralField f = random_field(5, 21);
    SpectralField g = random_field(7, 22);
    for (int n_out : {0, 3, 12, 20}) {
        SpectralField got = multiply(f, g, n_out);
        SpectralField want = multiply_bruteforce(f, g, n_out);
        CHECK(max_coeff_diff(got, want) < 1e-13);
    }
    // sin t * cos t = sin(2t)/2, exactly representable
    SpectralField p = multiply(SpectralField::harmonic_sin(1, 1.0, 1),
                               SpectralField::harmonic_cos(1, 1.0, 1), 2);
    CHECK(max_coeff_diff(p, SpectralField::harmonic_sin(2, 0.5, 2)) < 1e-15);
}

TEST_CASE("eval_at matches analytic values") {
    SpectralField f(4);
    f.a[0] = -1.0;
    f.a[3] = 2.0;
    f.b[2] = 0.5;
    const double th = 0.7;
    const double want = -1.0 + 2.0 * std::cos(3 * th) + 0.5 * std::sin(2 * th);
    CHECK(eval_at(f, th) == doctest::Approx(want).epsilon(1e-14));
    std::vector<double> many = eval_at(f, std::vector<double>{-2.0, th, 3.0});
    CHECK(many[1] == doctest::Approx(want).epsilon(1e-14));
    CHECK(many[0] == doctest::Approx(eval_at(f, -2.0)).epsilon(1e-14));
}

TEST_CASE("mass and norms on closed forms") {
    SpectralField f(2);
    f.a[0] = 1.0;
    f.a[1] = 1.0;  // 1 + cos t
    CHECK(mass(f) == doctest::Approx(2.0 * M_PI).epsilon(1e-15));
    CHECK(norm_l2(SpectralField::harmonic_sin(1, 1.0, 1)) ==
          doctest::Approx(std::sqrt(M_PI)).epsilon(1e-15));
    CHECK(norm_h1_dot(SpectralField::harmonic_sin(2, 1.0, 2)) ==
          doctest::Approx(2.0 * std::sqrt(M_PI)).epsilon(1e-15));
    SpectralField r = random_field(12, 5);
    CHECK(norm_h1(r) * norm_h1(r) ==
          doctest::Approx(norm_l2(r) * norm_l2(r) + norm_h1_dot(r) * norm_h1_dot(r))
              .epsilon(1e-12));
}

TEST_CASE("grid extrema") {
    SpectralField c = SpectralField::harmonic_cos(1, 1.0, 1);
    CHECK(min_on_grid(c, 64) == doctest::Approx(-1.0).epsilon(1e-15));  // hit at theta = -pi
    CHECK(max_abs_on_grid(c, 64) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("basic field utilities") {
    SpectralField f = random_field(6, 30);
    CHECK(all_finite(f));
    SpectralField bad = f;
    bad.b[3] = std::nan("");
    CHECK_FALSE(all_finite(bad));

    SpectralField sum = add_scaled(f, f, -1.0);
    CHECK(max_coeff_diff(sum, SpectralField::zero(6)) < 1e-15);
    SpectralField h = f;
    scale_in_place(h, 2.0);
    CHECK(h.a[4] == doctest::Approx(2.0 * f.a[4]).epsilon(1e-15));
}
