#include "clm/hdw.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace clm {

namespace {

constexpr double pi = std::numbers::pi;

double value_at_zero(const SpectralField& eta) {
    double v = eta.a[0];
    for (int k = 1; k <= eta.order(); ++k) v += eta.a[static_cast<size_t>(k)];
    return v;
}

double check_vanishing(const SpectralField& eta, bool mean_shift, const char* who) {
    const double v = value_at_zero(eta);
    if (!mean_shift && std::abs(v) > 1e-8)
        throw std::domain_error(std::string(who) + ": field does not vanish at theta = 0 (value " +
                                std::to_string(v) + "); pass mean_shift to absorb it into the mean");
    return v;  // the recursions never read a0, so "shifting the mean" = ignoring v
}

}  // namespace

TildeCoeffs tilde_from_fourier(const SpectralField& eta, int K, bool mean_shift) {
    check_vanishing(eta, mean_shift, "tilde_from_fourier");
    const int N = eta.order();
    TildeCoeffs c;
    c.odd.assign(static_cast<size_t>(K) + 1, 0.0);
    c.even.assign(static_cast<size_t>(K) + 1, 0.0);

    double t = 0.0;
    for (int m = 1; m <= K; ++m) {
        if (m <= N) t -= m * eta.b[static_cast<size_t>(m)];
        c.odd[static_cast<size_t>(m)] = t;
    }
    t = 0.0;
    for (int j = 1; j <= std::min(K, N); ++j) t += j * eta.a[static_cast<size_t>(j)];
    c.even[0] = t;
    for (int m = 1; m <= K; ++m) {
        if (m <= N) t -= m * eta.a[static_cast<size_t>(m)];
        c.even[static_cast<size_t>(m)] = t;
    }
    c.tail_residual_odd = std::abs(c.odd[static_cast<size_t>(K)]);
    c.tail_residual_even = std::abs(c.even[static_cast<size_t>(K)]);
    return c;
}

SpectralField fourier_from_tilde(const TildeCoeffs& c) {
    const int K = c.truncation();
    SpectralField eta(K);
    if (K >= 1) {
        eta.b[1] = -c.odd[1];
        eta.a[1] = c.even[0] - c.even[1];
    }
    for (int m = 2; m <= K; ++m) {
        eta.b[static_cast<size_t>(m)] = (c.odd[static_cast<size_t>(m) - 1] - c.odd[static_cast<size_t>(m)]) / m;
        eta.a[static_cast<size_t>(m)] = (c.even[static_cast<size_t>(m) - 1] - c.even[static_cast<size_t>(m)]) / m;
    }
    double s = 0.0;
    for (int k = 1; k <= K; ++k) s += eta.a[static_cast<size_t>(k)];
    eta.a[0] = -s;  // pin eta(0) = 0
    return eta;
}

double g_inner(const SpectralField& xi, const SpectralField& eta) {
    const int K = std::max(xi.order(), eta.order());
    const TildeCoeffs cx = tilde_from_fourier(xi, K);
    const TildeCoeffs ce = tilde_from_fourier(eta, K);
    double s = cx.even[0] * ce.even[0];
    for (int m = 1; m <= K; ++m)
        s += cx.odd[static_cast<size_t>(m)] * ce.odd[static_cast<size_t>(m)] +
             cx.even[static_cast<size_t>(m)] * ce.even[static_cast<size_t>(m)];
    return s;
}

double hdw_norm(const TildeCoeffs& c) {
    double s = c.even[0] * c.even[0];
    for (int m = 1; m <= c.truncation(); ++m)
        s += c.odd[static_cast<size_t>(m)] * c.odd[static_cast<size_t>(m)] +
             c.even[static_cast<size_t>(m)] * c.even[static_cast<size_t>(m)];
    return std::sqrt(s);
}

double hdw_norm(const SpectralField& eta, int K, bool mean_shift) {
    return hdw_norm(tilde_from_fourier(eta, K, mean_shift));
}

double tilde_y_norm(const TildeCoeffs& c) {
    double s = 0.0;
    for (int m = 1; m <= c.truncation(); ++m)
        s += c.odd[static_cast<size_t>(m)] * c.odd[static_cast<size_t>(m)] +
             c.even[static_cast<size_t>(m)] * c.even[static_cast<size_t>(m)];
    return std::sqrt(s);
}

double tilde_y_norm(const SpectralField& eta, int K, bool mean_shift) {
    return tilde_y_norm(tilde_from_fourier(eta, K, mean_shift));
}

std::vector<std::vector<double>> basis_gram(int K, int quadrature_M) {
    const int M = quadrature_M;
    const int n = 2 * K + 1;  // odd 1..K then even 0..K
    // Half-angle factorization: each derivative-over-sin(theta/2) is a single
    // half-integer harmonic, so the integrand of every Gram entry is a
    // trigonometric polynomial of integer degree <= 2K+1 and the uniform
    // trapezoid rule is exact once M > 2K+1.  No removable singularity to
    // special-case: the factor sin^2(theta/2) cancels identically.
    const std::vector<double> th = grid_points(M);
    std::vector<std::vector<double>> factors(static_cast<size_t>(n),
                                             std::vector<double>(static_cast<size_t>(M)));
    for (int k = 1; k <= K; ++k)
        for (int j = 0; j < M; ++j)
            factors[static_cast<size_t>(k - 1)][static_cast<size_t>(j)] =
                -2.0 * std::sin((k + 0.5) * th[static_cast<size_t>(j)]);
    for (int l = 0; l <= K; ++l)
        for (int j = 0; j < M; ++j)
            factors[static_cast<size_t>(K + l)][static_cast<size_t>(j)] =
                -2.0 * std::cos((l + 0.5) * th[static_cast<size_t>(j)]);

    std::vector<std::vector<double>> gram(static_cast<size_t>(n),
                                          std::vector<double>(static_cast<size_t>(n)));
    const double w = (2.0 * pi / M) / (4.0 * pi);  // trapezoid weight times 1/(4 pi)
    for (int r = 0; r < n; ++r)
        for (int c = r; c < n; ++c) {
            double s = 0.0;
            for (int j = 0; j < M; ++j)
                s += factors[static_cast<size_t>(r)][static_cast<size_t>(j)] *
                     factors[static_cast<size_t>(c)][static_cast<size_t>(j)];
            gram[static_cast<size_t>(r)][static_cast<size_t>(c)] = w * s;
            gram[static_cast<size_t>(c)][static_cast<size_t>(r)] = w * s;
        }
    return gram;
}

double mean_zero_relation_check(const TildeCoeffs& c) {
    double s = 0.0;
    for (int k = 1; k <= c.truncation(); ++k)
        s += c.even[static_cast<size_t>(k)] / (static_cast<double>(k) * (k + 1));
    return std::abs(c.even[0] - s);
}

SpectralField tilde_basis_odd(int k) {
    if (k < 1) throw std::invalid_argument("tilde_basis_odd: k >= 1");
    SpectralField f(k + 1);
    f.b[static_cast<size_t>(k) + 1] = 1.0 / (k + 1);
    f.b[static_cast<size_t>(k)] -= 1.0 / k;
    return f;
}

SpectralField tilde_basis_even(int l) {
    if (l < 0) throw std::invalid_argument("tilde_basis_even: l >= 0");
    if (l == 0) {
        SpectralField f(1);
        f.a[1] = 1.0;
        f.a[0] = -1.0;
        return f;
    }
    SpectralField f(l + 1);
    f.a[static_cast<size_t>(l) + 1] = 1.0 / (l + 1);
    f.a[static_cast<size_t>(l)] -= 1.0 / l;
    f.a[0] = -(1.0 / (l + 1) - 1.0 / l);  // the "-1"s of (cos k t - 1)/k
    return f;
}

}  // namespace clm
