#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "clm/hdw.hpp"
#include "clm/linear_ops.hpp"
#include "clm/spectral.hpp"

using namespace clm;

namespace {

std::vector<double> unit(int K, int j) {
    std::vector<double> e(K + 1, 0.0);
    e[j] = 1.0;
    return e;
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (size_t i = 1; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

}  // namespace

TEST_CASE("ground-state band entries in the trig basis") {
    const int K = 8;
    TridiagonalOperator odd = build_ground_fourier(K, Parity::Odd);

    // sin t spans the kernel
    std::vector<double> r1 = odd.apply(unit(K, 1));
    for (int m = 0; m <= K; ++m) CHECK(std::fabs(r1[m]) < 1e-15);

    // column 2: A_2 = -1/4 onto mode 3, B_2 = 3/4 onto mode 1
    std::vector<double> r2 = odd.apply(unit(K, 2));
    CHECK(r2[3] == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(r2[1] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(std::fabs(r2[2]) < 1e-15);

    TridiagonalOperator even = build_ground_fourier(K, Parity::Even);
    // column 1 of the even block is annihilated as well
    std::vector<double> e1 = even.apply(unit(K, 1));
    for (int m = 0; m <= K; ++m) CHECK(std::fabs(e1[m]) < 1e-15);
    // column 3 carries the band plus the dense coupling onto mode 1
    std::vector<double> e3 = even.apply(unit(K, 3));
    CHECK(e3[4] == doctest::Approx(-2.0 / 3.0).epsilon(1e-15));
    CHECK(e3[2] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(e3[1] == doctest::Approx(-2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("ground-state rows in the weighted basis") {
    const int K = 8;
    TridiagonalOperator odd = build_ground_tilde(K, Parity::Odd);
    // d_2 = 3/8, d_3 = 8/9 fix column 2: row 1 sees d_2, row 3 sees -d_3
    std::vector<double> r = odd.apply(unit(K, 2));
    CHECK(r[1] == doctest::Approx(3.0 / 8.0).epsilon(1e-15));
    CHECK(r[2] == doctest::Approx(-(8.0 / 9.0 - 3.0 / 8.0)).epsilon(1e-15));
    CHECK(r[3] == doctest::Approx(-8.0 / 9.0).epsilon(1e-15));

    // first basis vector: explicit image -(3/8) e~_2 - (3/8) e~_1 - (1/4) e~_0
    TridiagonalOperator even = build_ground_tilde(K, Parity::Even);
    std::vector<double> e1 = even.apply(unit(K, 1));
    CHECK(e1[2] == doctest::Approx(-3.0 / 8.0).epsilon(1e-15));
    CHECK(e1[1] == doctest::Approx(-3.0 / 8.0).epsilon(1e-15));
    CHECK(e1[0] == doctest::Approx(-0.25).epsilon(1e-15));
    // the zero mode never feeds back: only row 0 collects it
    std::vector<double> e0 = even.apply(unit(K, 0));
    for (int m = 0; m <= K; ++m) CHECK(std::fabs(e0[m]) < 1e-15);
}

TEST_CASE("weighted rows are a negative diagonal plus an exact skew part") {
    const int K = 40;
    TridiagonalOperator op = build_ground_tilde(K, Parity::Odd);
    for (int m = 2; m <= K; ++m) CHECK(op.sub[m] == doctest::Approx(-op.super[m - 1]).epsilon(1e-15));
    for (int m = 1; m < K; ++m) {
        const double gap = -(op.diag[m]);
        CHECK(gap >= 3.0 / 8.0 - 1e-15);
        CHECK(gap <= 0.52);
    }
}

TEST_CASE("diagonal gap clears 3/8 far out") {
    CHECK(ground_gap_check(1000));
}

TEST_CASE("conjugating the trig operator gives the weighted one") {
    // Push a coefficient vector through both readings and compare.
    const int K = 24;
    std::mt19937_64 eng(40);
    std::normal_distribution<double> g;

    // odd: field built from sin modes 1..K/2 so images stay inside order K
    TridiagonalOperator Lf = build_ground_fourier(K, Parity::Odd);
    TridiagonalOperator Lt = build_ground_tilde(K, Parity::Odd);
    std::vector<double> c(K + 1, 0.0);
    for (int k = 1; k <= K / 2; ++k) c[k] = g(eng) / k;
    std::vector<double> Lc = Lf.apply(c);
    SpectralField fc(K), fLc(K);
    for (int k = 1; k <= K; ++k) {
        fc.b[k] = c[k];
        fLc.b[k] = Lc[k];
    }
    TildeCoeffs want = tilde_from_fourier(fLc, K);
    std::vector<double> got = Lt.apply(tilde_from_fourier(fc, K).odd);
    for (int m = 1; m <= K - 2; ++m)
        CHECK(got[m] == doctest::Approx(want.odd[m]).epsilon(1e-12));

    // even: basis vectors are cos(kt) - 1, so the field carries the matching
    // constant and the tilde reading sees the same vanishing representative
    TridiagonalOperator Ef = build_ground_fourier(K, Parity::Even);
    TridiagonalOperator Et = build_ground_tilde(K, Parity::Even);
    std::vector<double> d(K + 1, 0.0);
    for (int k = 1; k <= K / 2; ++k) d[k] = g(eng) / k;
    std::vector<double> Ld = Ef.apply(d);
    SpectralField fd(K), fLd(K);
    double sd = 0.0, sld = 0.0;
    for (int k = 1; k <= K; ++k) {
        fd.a[k] = d[k];
        sd += d[k];
        fLd.a[k] = Ld[k];
        sld += Ld[k];
    }
    fd.a[0] = -sd;
    fLd.a[0] = -sld;
    TildeCoeffs wante = tilde_from_fourier(fLd, K);
    TildeCoeffs din = tilde_from_fourier(fd, K);
    std::vector<double> in(K + 1, 0.0);
    in[0] = din.even[0];
    for (int m = 1; m <= K; ++m) in[m] = din.even[m];
    std::vector<double> gote = Et.apply(in);
    CHECK(gote[0] == doctest::Approx(wante.even[0]).epsilon(1e-12));
    for (int m = 1; m <= K - 2; ++m)
        CHECK(gote[m] == doctest::Approx(wante.even[m]).epsilon(1e-12));
}

TEST_CASE("second equilibrium: stride-2 band and the exceptional rows") {
    const int K = 12;
    TridiagonalOperator odd = build_excited(K, Parity::Odd);
    TridiagonalOperator even = build_excited(K, Parity::Even);

    // mode 1 diagonal: +3/4 on the sine side, -3/4 on the cosine side
    CHECK(odd.apply(unit(K, 1))[1] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(even.apply(unit(K, 1))[1] == doctest::Approx(-0.75).epsilon(1e-15));

    // mode 2 is stationary but still receives from mode 4 (B_4 = 3/4)
    std::vector<double> r2 = odd.apply(unit(K, 2));
    for (int m = 0; m <= K; ++m) CHECK(std::fabs(r2[m]) < 1e-15);
    std::vector<double> r4 = odd.apply(unit(K, 4));
    CHECK(r4[2] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(r4[6] == doctest::Approx(-0.25).epsilon(1e-15));  // A_4 = -1/4

    // B_6 = 4/3 and B_3 = 5/12 land two below
    CHECK(odd.apply(unit(K, 6))[4] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(odd.apply(unit(K, 3))[1] == doctest::Approx(5.0 / 12.0).epsilon(1e-15));

    // parity of the data only flips the mode-1 diagonal
    for (int j = 2; j <= K; ++j) {
        std::vector<double> a = odd.apply(unit(K, j));
        std::vector<double> b = even.apply(unit(K, j));
        for (int m = 0; m <= K; ++m) CHECK(a[m] == doctest::Approx(b[m]).epsilon(1e-15));
    }
}

TEST_CASE("second-equilibrium weights match the hand-computed chain") {
    XWeights w = excited_weights(16);
    CHECK(w.g_even[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(w.g_even[2] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(w.g_even[3] == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
    CHECK(w.g_even[4] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(w.g_even[5] == doctest::Approx(21.0).epsilon(1e-15));
    CHECK(w.g_even[6] == doctest::Approx(16.0 / 3.0).epsilon(1e-14));
    CHECK(w.g_even[8] == doctest::Approx(15.0).epsilon(1e-14));
    // sine-side weights: mode 2 carries weight zero (it is fed by mode 4 but
    // never feeds back), odd positions drop out entirely
    CHECK(w.g_odd[2] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(w.g_odd[1] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(w.g_odd[3] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(w.g_odd[4] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(w.g_odd[6] == doctest::Approx(16.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("seminorm on the upper sine chain is conserved by the flow") {
    const int K = 64;
    TridiagonalOperator op = build_excited(K, Parity::Odd);
    XWeights w = conserved_seminorm_evenmodes(K);
    std::vector<double> c0(K + 1, 0.0);
    c0[4] = 1.0;
    c0[6] = -0.5;
    c0[8] = 0.25;
    LinearTrajectory tr = evolve_linear(op, c0, 10.0, 2e-4, 500);
    REQUIRE(tr.completed);
    const double s0 = x_seminorm(tr.coeffs.front(), w.g_odd);
    double drift = 0.0;
    for (const auto& c : tr.coeffs)
        drift = std::max(drift, std::fabs(x_seminorm(c, w.g_odd) - s0) / s0);
    CHECK(drift < 1e-8);
}

TEST_CASE("evolution examples: kernel vector, weighted contraction, energy order") {
    // kernel of the ground operator: sin t does not move
    TridiagonalOperator gf = build_ground_fourier(8, Parity::Odd);
    LinearTrajectory k = evolve_linear(gf, unit(8, 1), 1.0, 1e-2, 10);
    for (const auto& c : k.coeffs) {
        CHECK(c[1] == doctest::Approx(1.0).epsilon(1e-12));
        for (int m = 2; m <= 8; ++m) CHECK(std::fabs(c[m]) < 1e-12);
    }

    // weighted ground flow contracts pointwise at rate >= 3/8
    TridiagonalOperator gt = build_ground_tilde(32, Parity::Odd);
    std::vector<double> c0(33, 0.0);
    c0[1] = 1.0;
    LinearTrajectory tr = evolve_linear(gt, c0, 4.0, 1e-3, 100);
    for (size_t i = 0; i < tr.times.size(); ++i) {
        double n2 = 0.0;
        for (int m = 1; m <= 32; ++m) n2 += tr.coeffs[i][m] * tr.coeffs[i][m];
        CHECK(std::sqrt(n2) <= std::exp(-0.375 * tr.times[i]) * (1.0 + 1e-9));
    }

    // discrete energy drift shrinks like dt^5: the integrator's amplitude
    // defect on a conserved quadratic is O(dt^6) per step
    TridiagonalOperator ex = build_excited(32, Parity::Even);
    XWeights w = excited_weights(32);
    auto drift_at = [&](double dt) {
        std::vector<double> v(33, 0.0);
        for (int m = 1; m <= 32; ++m) v[m] = 1.0 / (m * m);
        LinearTrajectory t2 = evolve_linear(ex, v, 2.0, dt, 64);
        const double x0 = x_seminorm(t2.coeffs.front(), w.g_even);
        const double q0 = x0 * x0;
        double worst = 0.0;
        for (size_t i = 0; i < t2.times.size(); ++i) {
            const double x = x_seminorm(t2.coeffs[i], w.g_even);
            worst = std::max(worst, std::fabs(x * x + 1.5 * t2.q_mode1[i] - q0) / q0);
        }
        return worst;
    };
    const double ratio = drift_at(4e-3) / drift_at(2e-3);
    CHECK(ratio > 24.0);
    CHECK(ratio < 40.0);
}

TEST_CASE("decay_fit recovers rates and rejects bad input") {
    std::vector<std::pair<double, double>> exact, flat, noisy;
    std::mt19937_64 eng(77);
    std::uniform_real_distribution<double> u(-0.02, 0.02);
    for (int i = 0; i <= 40; ++i) {
        const double t = 0.1 * i;
        exact.emplace_back(t, 3.0 * std::exp(-0.42 * t));
        flat.emplace_back(t, 2.5);
        noisy.emplace_back(t, 3.0 * std::exp(-0.42 * t) * (1.0 + u(eng)));
    }
    CHECK(decay_fit(exact) == doctest::Approx(0.42).epsilon(1e-12));
    CHECK(decay_fit(flat) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(decay_fit(noisy) == doctest::Approx(0.42).epsilon(0.05));

    CHECK_THROWS_AS(decay_fit({{0.0, 1.0}}), std::domain_error);
    CHECK_THROWS_AS(decay_fit({{0.0, 1.0}, {1.0, -0.5}}), std::domain_error);
    CHECK_THROWS_AS(decay_fit({{1.0, 1.0}, {1.0, 0.5}}), std::domain_error);
}

TEST_CASE("finite-difference probe of the nonlinear rhs") {
    // at the zero field the linearization vanishes identically
    SpectralField zero = SpectralField::zero(14);
    auto Z = oracle_linearize(zero, 12, 1e-5, Gauge::MeanZero, ProbeBasis::OddSin);
    double worst = 0.0;
    for (int i = 1; i <= 12; ++i)
        for (int j = 1; j <= 12; ++j) worst = std::max(worst, std::fabs(Z[i][j]));
    CHECK(worst < 1e-10);

    // the rhs is quadratic, so the centered difference is step-size exact
    SpectralField ground = SpectralField::harmonic_sin(1, -1.0, 14);
    auto A = oracle_linearize(ground, 12, 1e-5, Gauge::VanishAtZero, ProbeBasis::OddSin);
    auto B = oracle_linearize(ground, 12, 1e-4, Gauge::VanishAtZero, ProbeBasis::OddSin);
    worst = 0.0;
    for (int i = 1; i <= 12; ++i)
        for (int j = 1; j <= 12; ++j) worst = std::max(worst, std::fabs(A[i][j] - B[i][j]));
    CHECK(worst < 1e-9);

    CHECK_THROWS_AS(oracle_linearize(ground, 12, 1e-2, Gauge::MeanZero, ProbeBasis::OddSin),
                    std::invalid_argument);
}

TEST_CASE("euclidean quotients around the second equilibrium change sign") {
    const int K = 16;
    TridiagonalOperator op = build_excited(K, Parity::Odd);

    std::vector<double> e1 = unit(K, 1);
    const double q1 = dot(e1, op.apply(e1)) / dot(e1, e1);
    CHECK(q1 == doctest::Approx(0.75).epsilon(1e-14));

    std::vector<double> v(K + 1, 0.0);
    v[1] = 1.0 / std::sqrt(37.0);
    v[3] = -6.0 / std::sqrt(37.0);
    const double q2 = dot(v, op.apply(v)) / dot(v, v);
    CHECK(q2 == doctest::Approx(-1.0 / 148.0).epsilon(1e-12));
    CHECK(q1 > 0.0);
    CHECK(q2 < 0.0);
}

TEST_CASE("construction guards") {
    CHECK_THROWS_AS(build_ground_fourier(3, Parity::Odd), std::invalid_argument);
    CHECK_THROWS_AS(build_ground_tilde(1, Parity::Even), std::invalid_argument);
    CHECK_THROWS_AS(build_excited(4, Parity::Odd), std::invalid_argument);
    CHECK_THROWS_AS(excited_weights(5), std::invalid_argument);
    CHECK_THROWS_AS(conserved_seminorm_evenmodes(7), std::invalid_argument);
}
