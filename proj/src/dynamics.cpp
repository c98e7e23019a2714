#include "clm/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "clm/hdw.hpp"

namespace clm {

SpectralField rhs(const SpectralField& w, Model model, Gauge gauge) {
    const int N = w.order();
    SpectralField hw = hilbert(w);
    SpectralField stretch = multiply(w, hw, N);  // w H(w), dealiased
    if (model == Model::CLM) return stretch;

    SpectralField u = velocity_from_vorticity(w, gauge);
    SpectralField dw = derivative(w);
    SpectralField transport = multiply(u, dw, N);
    return add_scaled(stretch, transport, -1.0);
}

SpectralField step_rk4(const SpectralField& w, double dt, Model model, Gauge gauge) {
    SpectralField k1 = rhs(w, model, gauge);
    SpectralField k2 = rhs(add_scaled(w, k1, 0.5 * dt), model, gauge);
    SpectralField k3 = rhs(add_scaled(w, k2, 0.5 * dt), model, gauge);
    SpectralField k4 = rhs(add_scaled(w, k3, dt), model, gauge);

    SpectralField out = w;
    const double c = dt / 6.0;
    out = add_scaled(out, k1, c);
    out = add_scaled(out, k2, 2.0 * c);
    out = add_scaled(out, k3, 2.0 * c);
    out = add_scaled(out, k4, c);
    return out;
}

DiagnosticsRow diagnostics(const SpectralField& w, double t, const SpectralField* equilibrium) {
    DiagnosticsRow row;
    row.t = t;
    row.mass = mass(w);
    row.l2 = norm_l2(w);

    const int N = w.order();
    const int M = next_fast_size(2 * N + 1);
    std::vector<double> samples = to_grid(w, M);
    double mn = samples[0], mx = std::fabs(samples[0]);
    for (double s : samples) {
        if (s < mn) mn = s;
        double a = std::fabs(s);
        if (a > mx) mx = a;
    }
    row.min_omega = mn;

    // Square-root diagnostics only make sense while the field is nonnegative
    // up to roundoff; eps_pos scales with the field so the gate is unitless.
    const double eps_pos = 1e-10 * mx;
    if (mn >= -eps_pos) {
        std::vector<double> root(samples.size());
        for (size_t j = 0; j < samples.size(); ++j)
            root[j] = std::sqrt(samples[j] > 0.0 ? samples[j] : 0.0);
        SpectralField f = from_grid(root, N);
        row.sqrt_h1_dot = norm_h1_dot(f);
        row.sqrt_h1 = norm_h1(f);
    }

    if (equilibrium != nullptr) {
        SpectralField eta = add_scaled(w, *equilibrium, -1.0);
        // The perturbation need not vanish at 0 exactly (truncation), so the
        // expansion is taken with the residual pushed into the mean.
        TildeCoeffs c = tilde_from_fourier(eta, eta.order(), /*mean_shift=*/true);
        row.hdw_perturb = hdw_norm(c);
        row.tilde_y_norm = tilde_y_norm(c);
        row.eta0_even = c.even[0];
    }
    return row;
}

IntegrateResult integrate(const SpectralField& w0, const IntegrateOptions& opt) {
    if (opt.dt <= 0.0) throw std::invalid_argument("integrate: dt must be positive");
    if (opt.T < 0.0) throw std::invalid_argument("integrate: T must be nonnegative");
    if (opt.sample_every < 1) throw std::invalid_argument("integrate: sample_every must be >= 1");

    const long steps = std::lround(opt.T / opt.dt);
    const int M = next_fast_size(2 * w0.order() + 1);

    IntegrateResult res;
    res.last = w0;
    res.snapshots.push_back({0.0, w0});
    res.rows.push_back(diagnostics(w0, 0.0, opt.equilibrium));

    SpectralField w = w0;
    for (long s = 1; s <= steps; ++s) {
        w = step_rk4(w, opt.dt, opt.model, opt.gauge);
        const double t = static_cast<double>(s) * opt.dt;

        if (!all_finite(w)) {
            res.outcome = Outcome::NonFinite;
            res.t_abort = t;
            res.t_end = static_cast<double>(s - 1) * opt.dt;
            return res;
        }
        // Cheap l2-based bound first; the grid sup only when it could matter.
        // ||w||_inf <= a0 + sum |a|+|b| <= sqrt(2N+1) ||w||_l2 / sqrt(pi).
        const double l2 = norm_l2(w);
        if (l2 * std::sqrt((2.0 * w.order() + 1.0) / M_PI) >= opt.blowup_ceiling) {
            if (max_abs_on_grid(w, M) >= opt.blowup_ceiling) {
                res.outcome = Outcome::BlowUp;
                res.t_abort = t;
                res.t_end = t;  // the triggering state is still finite and recorded
                res.snapshots.push_back({t, w});
                res.rows.push_back(diagnostics(w, t, opt.equilibrium));
                res.last = w;
                return res;
            }
        }
        res.last = w;
        res.t_end = t;
        if (s % opt.sample_every == 0 || s == steps) {
            res.snapshots.push_back({t, w});
            res.rows.push_back(diagnostics(w, t, opt.equilibrium));
        }
    }
    return res;
}

}  // namespace clm
