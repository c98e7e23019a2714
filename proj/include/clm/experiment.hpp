#pragma once

// Experiment runner: configuration, the initial-data library, the canned
// experiment suite (conservation, stability, shifted equilibrium, linear
// decay, excited identity, oracle check, sqrt scheme), and CSV/JSON output.

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "clm/dynamics.hpp"
#include "clm/linear_ops.hpp"
#include "clm/spectral.hpp"

namespace clm {

enum class ExperimentKind {
    Conservation,
    GroundStability,
    ShiftedGroundStability,
    ExcitedLinear,
    LinearDecay,
    OracleCheck,
    SqrtScheme,
};

// Initial-data descriptor, e.g. "bump(a=2)" or
// "ground_perturb(eps=0.01, seed=7, mean_zero=1)".
struct InitSpec {
    std::string name = "bump";  // bump | ground | excited2 | cos | zero |
                                // ground_perturb | shifted_ground |
                                // excited_perturb | tilde_random
    double a = 2.0;             // bump half-width
    double eps = 0.01;          // perturbation size (weighted norm)
    unsigned long seed = 1;
    bool mean_zero = true;      // ground_perturb: exact zero mean
    Parity parity = Parity::Odd;
    double alpha = 0.02;        // shifted_ground mean of the offset
};

struct ExperimentConfig {
    Model model = Model::DeGregorio;
    ExperimentKind experiment = ExperimentKind::Conservation;
    int N = 256;  // field truncation, or coefficient truncation K for the
                  // linear experiments
    double dt = 1e-3;
    double T = 10.0;
    Gauge gauge = Gauge::MeanZero;
    InitSpec init;
    std::string output_dir = ".";
    int sample_every = 100;
};

// One output row; every column optional so field runs and coefficient runs
// share the schema (absent values print as empty cells).
struct CsvRow {
    double t = 0.0;
    std::optional<double> mass, l2, sqrt_h1, sqrt_h1_dot, min_omega;
    std::optional<double> hdw_perturb, x_seminorm, tilde_y_norm, eta0_even;
};

struct RunReport {
    ExperimentConfig config;
    std::vector<CsvRow> rows;
    std::map<std::string, double> rates;  // fitted rates and scalar results
    std::vector<std::pair<std::string, bool>> checks;
    std::string outcome = "completed";    // completed | blowup | nonfinite |
                                          // non_contraction
    double wall_time_seconds = 0.0;       // excluded from determinism
};

// Throws std::invalid_argument on bad combinations (CFL, eps too large).
void validate(const ExperimentConfig& cfg);

// Field for the descriptor at truncation N.  Random draws use a fixed
// 64-bit Mersenne Twister + Box-Muller so runs are reproducible.
SpectralField make_initial(const InitSpec& spec, int N);

// The equilibrium each stability experiment measures against.
SpectralField experiment_equilibrium(const ExperimentConfig& cfg);

// Execute the experiment and write <kind>.csv / <kind>.json in output_dir.
RunReport run(const ExperimentConfig& cfg);

void write_csv(const RunReport& report, const std::string& path);
void write_json(const RunReport& report, const std::string& path);

// Flat key = value text (# comments); keys mirror the config fields.
ExperimentConfig parse_config_file(const std::string& path);
// Parse just an init descriptor like "ground_perturb(eps=0.01,seed=7)".
InitSpec parse_init(const std::string& text);

// Pinned configuration for each acceptance experiment.
ExperimentConfig suite_config(ExperimentKind kind);

// String forms used by the CLI, config files and JSON echo.
std::string to_string(ExperimentKind k);
std::string to_string(Model m);
std::string to_string(Gauge g);
ExperimentKind experiment_from_string(const std::string& s);
Model model_from_string(const std::string& s);
Gauge gauge_from_string(const std::string& s);

// Deterministic standard normals: mt19937_64 (bit-exact by the standard)
// plus a hand-rolled Box-Muller, since std::normal_distribution's algorithm
// is implementation-defined.
class NormalDraw {
  public:
    explicit NormalDraw(unsigned long seed) : eng_(seed) {}
    double next();

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace clm
