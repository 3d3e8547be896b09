#pragma once

#include "rcnlin/analysis.hpp"
#include "rcnlin/distributions.hpp"
#include "rcnlin/dynamics.hpp"
#include "rcnlin/minimizers.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rcnlin {

enum class Spacing { Linear, Log };

struct ParameterGrid {
    double start = 0.0;
    double stop = 1.0;
    std::size_t count = 2;
    Spacing spacing = Spacing::Linear;

    /// count points from start to stop inclusive.
    std::vector<double> values() const;
};

/// Where an experiment's distribution or sample comes from.
struct DataSource {
    std::string kind = "counterexample"; // counterexample | csv | random | tie
    std::filesystem::path path;          // csv
    std::size_t dim = 2;                 // random
    std::size_t atoms = 5;               // random
};

struct DynamicsSettings {
    std::string mode = "gd"; // gd | cd
    std::size_t iterations = 1000;
    double step = 1e-3;
    Vector v0; // empty means the zero vector
    TieRule tie_rule = TieRule::LowestIndex;
    double unit = 1.0;
};

struct ProbeSettings {
    Vector x0; // empty means the zero vector
    Vector u;  // empty means the normalized E[y x] of the clean distribution
    std::vector<double> lambdas = default_probe_lambdas();
};

struct ExperimentConfig {
    std::string experiment;
    ParameterGrid grid;
    std::string loss = "unhinged";
    double r = 1.0;
    double eta = 0.1;
    double gamma = 0.05;
    std::optional<MinimizerKind> minimizer; // default: closed form for unhinged, PGD otherwise
    PgdConfig pgd;
    DataSource distribution;
    DataSource sample;
    DynamicsSettings dynamics;
    ProbeSettings probe;
    std::filesystem::path out_dir = ".";
    std::uint64_t seed = 0;
};

/// Parses the JSON config; unknown keys are rejected. Throws InvalidInput.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Defaults used when a subcommand runs without --config.
ExperimentConfig default_config(const std::string& experiment);

struct SweepRecord {
    std::string parameter;
    double value = 0.0;
    Vector minimizer;
    double clean_error = 0.0;
    double noisy_fit_error = 0.0;
    double objective = 0.0;
    bool robust = false;
    double drift = 0.0; // |v_clean - v_noisy|_inf
    std::optional<double> diagnostic; // gamma sweep: v.x3
    bool degenerate = false;
    bool stationary = false;
};

struct GammaSweepResult {
    std::vector<SweepRecord> records;
    std::optional<double> threshold;
    /// Every record below the threshold has error 1/2, every record above has 0.
    bool step_pattern_holds = false;
};

/// v.x3 for the counterexample at gamma, with v = E[y x] (any positive
/// rescaling has the same sign).
double heavy_atom_score(double gamma);

/// Bisection on heavy_atom_score over [lo, hi], which must bracket a sign
/// change. Stops when the bracket is narrower than tol.
double bisect_threshold(double lo, double hi, double tol = 1e-12);

GammaSweepResult run_gamma_sweep(const ExperimentConfig& cfg);

std::vector<SweepRecord> run_eta_sweep(const ExperimentConfig& cfg);

struct DynamicsResult {
    Trajectory trajectory;
    std::optional<CoordinateDescentRun> cd;
    double closed_form_residual = 0.0; // gd: max_t |v_t - closed form|_inf
    bool support_in_argmax = true;     // cd: every iterate's support within argmax |g_j|
};

DynamicsResult run_dynamics(const ExperimentConfig& cfg);

struct LossReportRow {
    std::string loss;
    std::string reference;
    bool satisfies_def1 = false;
    bool expected = false; // Yes/No column for the loss
    std::string failing_check;
    std::optional<double> witness_z;
    std::optional<double> witness_value;
};

std::vector<LossReportRow> run_loss_report();

/// Resolves cfg.distribution (the counterexample uses cfg.gamma).
DiscreteDistribution build_distribution(const ExperimentConfig& cfg);
std::vector<LabeledPoint> build_sample(const ExperimentConfig& cfg);
MinimizerKind resolve_minimizer(const ExperimentConfig& cfg);

// Output writers. Rows come out in the order given.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);
nlohmann::json sweep_to_json(const std::vector<SweepRecord>& records);
void write_loss_report(std::ostream& out, const std::vector<LossReportRow>& rows);
nlohmann::json loss_report_to_json(const std::vector<LossReportRow>& rows);

/// Self-contained SVG step plot of ys against xs, with an optional dashed
/// vertical marker.
void write_step_plot_svg(std::ostream& out, const std::vector<double>& xs,
                         const std::vector<double>& ys, const std::string& title,
                         const std::string& xlabel, const std::string& ylabel,
                         std::optional<double> marker = std::nullopt);

} // namespace rcnlin
