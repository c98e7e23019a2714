#include "clm/linear_ops.hpp"

#include <cmath>
#include <stdexcept>

#include "clm/dynamics.hpp"

namespace clm {

namespace {

// Ground-state (-sin) nearest-neighbor coupling.
double ground_A(int k) { return -double(k - 1) * double(k - 1) / (2.0 * k); }
double ground_B(int k) { return (double(k) * k - 1.0) / (2.0 * k); }
// Tilde-basis weights d_k = (k-1)^2 (k+1) / (2 k^2); d_1 = 0.
double ground_d(int k) { return double(k - 1) * double(k - 1) * double(k + 1) / (2.0 * double(k) * k); }

// Excited-state (-sin 2t) stride-2 coupling.
double excited_A(int k) { return -double(k - 2) * double(k - 2) / (4.0 * k); }
double excited_B(int k) { return double(k + 2) * double(k - 2) / (4.0 * k); }

}  // namespace

std::vector<double> TridiagonalOperator::apply(const std::vector<double>& c) const {
    if (static_cast<int>(c.size()) != K + 1)
        throw std::invalid_argument("TridiagonalOperator::apply: coefficient size must be K+1");
    std::vector<double> out(K + 1, 0.0);
    for (int m = 1; m <= K; ++m) {
        double v = diag[m] * c[m];
        if (m - stride >= 1) v += sub[m] * c[m - stride];
        if (m + stride <= K) v += super[m] * c[m + stride];
        out[m] = v;
    }
    if (!extra_first_rows.empty()) {
        double v = 0.0;
        for (int k = 1; k <= K; ++k) v += extra_first_rows[k] * c[k];
        out[1] += v;
    }
    if (!zero_mode_row.empty()) {
        double v = 0.0;
        for (int k = 1; k <= K; ++k) v += zero_mode_row[k] * c[k];
        out[0] = v;
    }
    return out;
}

TridiagonalOperator build_ground_fourier(int K, Parity parity) {
    if (K < 4) throw std::invalid_argument("build_ground_fourier: K must be >= 4");
    TridiagonalOperator op;
    op.basis_tag = parity == Parity::Odd ? LinearBasis::FourierOdd : LinearBasis::FourierEven;
    op.equilibrium_tag = EquilibriumTag::GroundState;
    op.K = K;
    op.stride = 1;
    op.sub.assign(K + 1, 0.0);
    op.diag.assign(K + 1, 0.0);
    op.super.assign(K + 1, 0.0);
    for (int m = 2; m <= K; ++m) op.sub[m] = ground_A(m - 1);
    for (int m = 1; m < K; ++m) op.super[m] = ground_B(m + 1);
    if (parity == Parity::Even) {
        // cos(k t) - 1 basis: every column leaks -(1 - 1/k) into mode 1.
        op.extra_first_rows.assign(K + 1, 0.0);
        for (int k = 2; k <= K; ++k) op.extra_first_rows[k] = -(1.0 - 1.0 / k);
    }
    return op;
}

TridiagonalOperator build_ground_tilde(int K, Parity parity) {
    if (K < 2) throw std::invalid_argument("build_ground_tilde: K must be >= 2");
    TridiagonalOperator op;
    op.basis_tag = parity == Parity::Odd ? LinearBasis::TildeOdd : LinearBasis::TildeEven;
    op.equilibrium_tag = EquilibriumTag::GroundState;
    op.K = K;
    op.stride = 1;
    op.sub.assign(K + 1, 0.0);
    op.diag.assign(K + 1, 0.0);
    op.super.assign(K + 1, 0.0);
    for (int m = 1; m <= K; ++m) {
        op.sub[m] = -ground_d(m);
        op.diag[m] = -(ground_d(m + 1) - ground_d(m));
        if (m < K) op.super[m] = ground_d(m + 1);
    }
    if (parity == Parity::Even) {
        op.zero_mode_row.assign(K + 1, 0.0);
        for (int k = 1; k <= K; ++k) {
            double kk = k, k1 = k + 1.0;
            op.zero_mode_row[k] = (kk * kk - kk - 1.0) / (kk * kk * k1 * k1);
        }
    }
    return op;
}

bool ground_gap_check(long K) {
    // gap_k - 3/8 = (2k^4 + 4k^3 + 10k^2 - 8k - 8) / (16 k^2 (k+1)^2):
    // positive denominator, so only the integer numerator needs checking.
    for (long k = 1; k <= K; ++k) {
        __int128 kk = k;
        __int128 num = 2 * kk * kk * kk * kk + 4 * kk * kk * kk + 10 * kk * kk - 8 * kk - 8;
        if (k == 1 ? num != 0 : num <= 0) return false;
    }
    return true;
}

TridiagonalOperator build_excited(int K, Parity parity) {
    if (K < 5) throw std::invalid_argument("build_excited: K must be >= 5");
    TridiagonalOperator op;
    op.basis_tag = parity == Parity::Odd ? LinearBasis::FourierOdd : LinearBasis::FourierEven;
    op.equilibrium_tag = EquilibriumTag::Excited2;
    op.K = K;
    op.stride = 2;
    op.sub.assign(K + 1, 0.0);
    op.diag.assign(K + 1, 0.0);
    op.super.assign(K + 1, 0.0);
    for (int m = 3; m <= K; ++m) op.sub[m] = excited_A(m - 2);
    for (int m = 1; m + 2 <= K; ++m) op.super[m] = excited_B(m + 2);
    op.diag[1] = parity == Parity::Odd ? 0.75 : -0.75;
    return op;
}

XWeights excited_weights(int K) {
    if (K < 6) throw std::invalid_argument("excited_weights: K must be >= 6");
    XWeights w;
    w.g_even.assign(K + 1, 0.0);
    w.g_even[1] = 1.0;
    w.g_even[2] = 0.0;  // A_2 = 0 orphans the chain through mode 2
    if (K >= 4) w.g_even[4] = 1.0;
    for (int k = 1; k + 2 <= K; k += 2)
        w.g_even[k + 2] = -w.g_even[k] * excited_B(k + 2) / excited_A(k);
    for (int k = 4; k + 2 <= K; k += 2)
        w.g_even[k + 2] = -w.g_even[k] * excited_B(k + 2) / excited_A(k);

    w.g_odd.assign(K + 1, 0.0);
    // A_2 = 0 does not just orphan mode 2 from the recursion: conservation of
    // the quadratic form forces g_2 B_4 = 0 outright, since mode 2 is fed by
    // mode 4 but never feeds back.  So g_2 = 0 and the chain starts at g_4.
    w.g_odd[2] = 0.0;
    if (K >= 4) w.g_odd[4] = 1.0;
    for (int k = 4; k + 2 <= K; k += 2)
        w.g_odd[k + 2] = -w.g_odd[k] * excited_B(k + 2) / excited_A(k);
    return w;
}

XWeights conserved_seminorm_evenmodes(int K) {
    if (K % 2 != 0) throw std::invalid_argument("conserved_seminorm_evenmodes: K must be even");
    XWeights all = excited_weights(K < 6 ? 6 : K);
    all.g_odd.resize(K + 1, 0.0);
    all.g_even.clear();
    return all;
}

double x_seminorm(const std::vector<double>& coeffs, const std::vector<double>& weights) {
    double s = 0.0;
    size_t n = coeffs.size() < weights.size() ? coeffs.size() : weights.size();
    for (size_t k = 1; k < n; ++k) s += weights[k] * coeffs[k] * coeffs[k];
    return std::sqrt(s);
}

LinearTrajectory evolve_linear(const TridiagonalOperator& op, const std::vector<double>& c0,
                               double T, double dt, int sample_every) {
    if (dt <= 0.0) throw std::invalid_argument("evolve_linear: dt must be positive");
    if (sample_every < 1) throw std::invalid_argument("evolve_linear: sample_every must be >= 1");
    if (static_cast<int>(c0.size()) > op.K + 1)
        throw std::invalid_argument("evolve_linear: initial coefficients exceed K");

    const int n = op.K + 1;
    // State = coefficients plus the running integral of c_1^2.
    std::vector<double> s(n + 1, 0.0);
    for (size_t i = 0; i < c0.size(); ++i) s[i] = c0[i];

    auto deriv = [&](const std::vector<double>& x) {
        std::vector<double> d = op.apply(std::vector<double>(x.begin(), x.begin() + n));
        d.push_back(x[1] * x[1]);
        return d;
    };

    LinearTrajectory traj;
    auto record = [&](double t) {
        traj.times.push_back(t);
        traj.coeffs.emplace_back(s.begin(), s.begin() + n);
        traj.q_mode1.push_back(s[n]);
    };
    record(0.0);

    const long steps = std::lround(T / dt);
    std::vector<double> k1, k2, k3, k4, tmp(s.size());
    for (long step = 1; step <= steps; ++step) {
        k1 = deriv(s);
        for (size_t i = 0; i < s.size(); ++i) tmp[i] = s[i] + 0.5 * dt * k1[i];
        k2 = deriv(tmp);
        for (size_t i = 0; i < s.size(); ++i) tmp[i] = s[i] + 0.5 * dt * k2[i];
        k3 = deriv(tmp);
        for (size_t i = 0; i < s.size(); ++i) tmp[i] = s[i] + dt * k3[i];
        k4 = deriv(tmp);
        bool finite = true;
        for (size_t i = 0; i < s.size(); ++i) {
            s[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            finite = finite && std::isfinite(s[i]);
        }
        if (!finite) {
            record(step * dt);  // keep the NaN row as the instability signal
            traj.completed = false;
            return traj;
        }
        if (step % sample_every == 0 || step == steps) record(step * dt);
    }
    return traj;
}

double decay_fit(const std::vector<std::pair<double, double>>& series) {
    if (series.size() < 2) throw std::domain_error("decay_fit: need at least two samples");
    double st = 0, sy = 0, stt = 0, sty = 0;
    const double n = static_cast<double>(series.size());
    for (const auto& [t, v] : series) {
        if (!(v > 0.0)) throw std::domain_error("decay_fit: norms must be positive");
        const double y = std::log(v);
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    const double denom = n * stt - st * st;
    if (denom == 0.0) throw std::domain_error("decay_fit: degenerate time samples");
    return -(n * sty - st * sy) / denom;
}

std::vector<std::vector<double>> oracle_linearize(const SpectralField& equilibrium, int K,
                                                  double fd_step, Gauge gauge, ProbeBasis basis) {
    if (fd_step < 1e-7 || fd_step > 1e-3)
        throw std::invalid_argument("oracle_linearize: fd_step outside [1e-7, 1e-3]");
    if (K < 1) throw std::invalid_argument("oracle_linearize: K must be >= 1");

    // Work at field order K+2 so the +-1 (or +-2) coupling of the top probe
    // mode is still representable before reading entries back.
    const int N = K + 2 > equilibrium.order() ? K + 2 : equilibrium.order();
    SpectralField base = add_scaled(SpectralField::zero(N), equilibrium, 1.0);

    std::vector<std::vector<double>> mat(K + 1, std::vector<double>(K + 1, 0.0));
    for (int j = 1; j <= K; ++j) {
        SpectralField dir = SpectralField::zero(N);
        switch (basis) {
            case ProbeBasis::OddSin: dir.b[j] = 1.0; break;
            case ProbeBasis::EvenCosMinusOne: dir.a[j] = 1.0; dir.a[0] = -1.0; break;
            case ProbeBasis::EvenCos: dir.a[j] = 1.0; break;
        }
        SpectralField plus = rhs(add_scaled(base, dir, fd_step), Model::DeGregorio, gauge);
        SpectralField minus = rhs(add_scaled(base, dir, -fd_step), Model::DeGregorio, gauge);
        SpectralField diff = add_scaled(plus, minus, -1.0);
        for (int m = 1; m <= K; ++m)
            mat[m][j] = (basis == ProbeBasis::OddSin ? diff.b[m] : diff.a[m]) / (2.0 * fd_step);
    }
    return mat;
}

}  // namespace clm
