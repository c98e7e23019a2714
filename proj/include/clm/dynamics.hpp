#pragma once

// Right-hand sides and RK4 time integration for
//   De Gregorio:  dw/dt = -u dw/dtheta + w H(w),   du/dtheta = H(w)
//   CLM:          dw/dt =  w H(w)
// plus the diagnostics pipeline for the conserved quantities
// (mass, ||sqrt(w)||_{H1}, ||d/dtheta sqrt(w)||_{L2}).

#include <optional>
#include <vector>

#include "clm/spectral.hpp"

namespace clm {

enum class Model { DeGregorio, CLM };

SpectralField rhs(const SpectralField& w, Model model, Gauge gauge);
SpectralField step_rk4(const SpectralField& w, double dt, Model model, Gauge gauge);

struct DiagnosticsRow {
    double t = 0.0;
    double mass = 0.0;
    double l2 = 0.0;
    double min_omega = 0.0;
    // Present only while min w >= -eps_pos (eps_pos = 1e-10 ||w||_inf):
    // below that the clipped square root measures ringing, not the field.
    std::optional<double> sqrt_h1;
    std::optional<double> sqrt_h1_dot;
    // Present when an equilibrium is declared for the run.
    std::optional<double> hdw_perturb;
    std::optional<double> tilde_y_norm;
    // Filled by the linear-evolution experiments only.
    std::optional<double> x_seminorm;
    std::optional<double> eta0_even;
};

DiagnosticsRow diagnostics(const SpectralField& w, double t,
                           const SpectralField* equilibrium = nullptr);

enum class Outcome { Completed, BlowUp, NonFinite };

struct IntegrateOptions {
    Model model = Model::DeGregorio;
    Gauge gauge = Gauge::MeanZero;
    double T = 1.0;
    double dt = 1e-3;
    int sample_every = 100;          // snapshot stride in steps
    double blowup_ceiling = 1e6;     // on ||w||_inf
    const SpectralField* equilibrium = nullptr;  // enables hdw_perturb rows
};

struct Snapshot {
    double t;
    SpectralField state;
};

struct IntegrateResult {
    Outcome outcome = Outcome::Completed;
    double t_end = 0.0;                   // time actually reached
    std::optional<double> t_abort;        // when outcome != Completed
    std::vector<Snapshot> snapshots;      // includes t = 0 and the final state
    std::vector<DiagnosticsRow> rows;     // one per snapshot
    SpectralField last;                   // last valid state
};

IntegrateResult integrate(const SpectralField& w0, const IntegrateOptions& opt);

}  // namespace clm
