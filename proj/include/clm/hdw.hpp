#pragma once

// The weighted space H_DW: H^1 functions eta with eta(0) = 0 and
// eta'/sin(theta/2) square-integrable, with inner product
//   <xi, eta>_g = (1/4pi) integral xi' eta' / sin^2(theta/2).
// The orthonormal "tilde" basis
//   e~_k^odd  = sin((k+1)t)/(k+1) - sin(kt)/k,          k >= 1
//   e~_l^even = (cos((l+1)t)-1)/(l+1) - (cos(lt)-1)/l,  l >= 1,  e~_0 = cos t - 1
// lets every norm be computed in coefficient space; the singular weight is
// only ever quadratured in basis_gram, as a cross-check.

#include <vector>

#include "clm/spectral.hpp"

namespace clm {

struct TildeCoeffs {
    std::vector<double> odd;   // odd[1..K], odd[0] unused
    std::vector<double> even;  // even[0..K]
    double tail_residual_odd = 0.0;   // |odd[K]|  — membership diagnostic
    double tail_residual_even = 0.0;  // |even[K]| — identically 0 by the closure

    int truncation() const { return static_cast<int>(even.size()) - 1; }
};

// Expand eta in the tilde basis by the forward recursions
//   odd:  t_1 = -b_1,            t_m = t_{m-1} - m b_m
//   even: t_0 = sum_{j<=K} j a_j, t_m = t_{m-1} - m a_m.
// Requires eta(0) = 0 within 1e-8; pass mean_shift to move the violation into
// the mean first (explicit opt-in, never silent).
TildeCoeffs tilde_from_fourier(const SpectralField& eta, int K, bool mean_shift = false);

// Inverse expansion; the result has order K and its mean is set so eta(0) = 0.
SpectralField fourier_from_tilde(const TildeCoeffs& c);

// Euclidean dot of tilde coefficients at K = max(order, order).  Exact for
// fields that are finite combinations of basis vectors; both inputs must
// vanish at 0.
double g_inner(const SpectralField& xi, const SpectralField& eta);

// sqrt(sum of all tilde coefficients squared), even[0] included.
double hdw_norm(const TildeCoeffs& c);
double hdw_norm(const SpectralField& eta, int K, bool mean_shift = false);
inline double hdw_norm(const SpectralField& eta) { return hdw_norm(eta, eta.order()); }

// Quotient seminorm omitting even[0] (the cos t - 1 direction).
double tilde_y_norm(const TildeCoeffs& c);
double tilde_y_norm(const SpectralField& eta, int K, bool mean_shift = false);
inline double tilde_y_norm(const SpectralField& eta) { return tilde_y_norm(eta, eta.order()); }

// Gram matrix of {e~_k^odd}_{1..K} then {e~_l^even}_{0..K} under the g-inner
// product, by direct quadrature of the half-angle factorization
//   d/dt e~_k^odd / sin(t/2) = -2 sin((k+1/2)t)
//   d/dt e~_l^even / sin(t/2) = -2 cos((l+1/2)t)
// (note the minus sign in the even identity).  Exact for M > 2(2K+1).
std::vector<std::vector<double>> basis_gram(int K, int quadrature_M);

// Residual of the zero-mean constraint t_0 = sum_{k>=1} t_k / (k(k+1));
// vanishes iff the field has zero mean at this truncation.
double mean_zero_relation_check(const TildeCoeffs& c);

// Basis vectors as spectral fields (order k+1).
SpectralField tilde_basis_odd(int k);
SpectralField tilde_basis_even(int l);

}  // namespace clm
