#pragma once

#include "chronoclock/config.hpp"
#include "chronoclock/dynamics.hpp"
#include "chronoclock/observables.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace chronoclock {

enum class ExperimentKind { ArrivalWeak, ArrivalStrong, DwellWeak };

/// Violation of a paper-regime inequality or another run precondition that
/// makes the requested experiment meaningless rather than merely inaccurate.
class GuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::ArrivalWeak;

    // particle
    double m = 1.0, x0 = 15.0, p0 = -3.0, sigma = 2.0;
    double grid_x_min = -60.0, grid_x_max = 60.0;
    std::size_t grid_n = 4096;

    // clock
    ClockModel::Kind clock_kind = ClockModel::Kind::LinearMomentum;
    double clock_y_min = -40.0, clock_y_max = 40.0;
    std::size_t clock_n = 512;
    double eps0 = 1.0, sigma_eps = 0.1;
    double mu = 1.0, omega = 1.0;
    bool phi0_explicit = false;
    double phi0_center = 0.0, phi0_momentum = 0.0, phi0_sigma = 1.0;
    double truncation = 1e-8;

    // run
    double lambda = 0.02;
    Region::Kind region_kind = Region::Kind::HalfLinePositive;
    double L = 5.0;
    double dt = 0.0;           // 0: auto
    double tau = 0.0;          // 0: auto
    double exit_margin = 10.0; // auto_tau margin
    double safety = 1.5;       // auto_tau factor
    double detect_window = 0.85; // strong-coupling comparison window, fraction of tau

    std::string output_dir = "out";
    long seed = 0;
    std::size_t threads = 1;

    // comparison
    double l2_threshold = 0.05;
    double support_floor = 1e-4;

    Region region() const;
    double kinetic_energy() const { return p0 * p0 / (2.0 * m); }
};

ExperimentConfig parse_experiment(const Config& cfg);
ClockModel build_clock(const ExperimentConfig& cfg);

/// Classical traversal time to the exit margin, with the safety factor.
double auto_tau(const ExperimentConfig& cfg);

struct ComparisonReport {
    double l2_relative = 0.0;
    double sup_relative = 0.0;
    double mass_simulated = 0.0;
    double mass_predicted = 0.0;
    std::vector<std::array<double, 4>> coarse_grained_table; // t1, t2, p_sim, p_pred
    std::map<std::string, bool> pass;
    std::map<std::string, double> metrics;
    std::vector<std::string> warnings;
    bool all_pass() const;
};

/// Relative L2 / sup metrics over the union support where either density
/// exceeds `floor` times its own peak. Both inputs are compared as shapes
/// (normalized copies).
std::pair<double, double> compare_distributions(const Distribution& sim,
                                                const Distribution& predicted,
                                                double support_floor);

/// Run one experiment: composite simulation + matching analytic prediction,
/// metrics, and (optionally) pointer.csv / predicted.csv / current.csv /
/// report.json under cfg.output_dir.
ComparisonReport run_experiment(const ExperimentConfig& cfg, bool write_outputs = true);

// --- serialization -------------------------------------------------------

void write_distribution_csv(const std::string& path, const Distribution& d);
void write_distribution_sidecar(const std::string& path, const Distribution& d);
void write_report_json(const std::string& path, const ExperimentConfig& cfg,
                       const ComparisonReport& report);

// --- pdx verification table (CLI `pdx-check`) ----------------------------

struct PdxCheckRow {
    std::string name;
    cplx value{0.0, 0.0};
    cplx reference{0.0, 0.0};
    double error = 0.0; // relative
    double tolerance = 0.0;
    bool pass = false;
};

std::vector<PdxCheckRow> run_pdx_checks(unsigned long seed);
void write_pdx_table_csv(const std::string& path, const std::vector<PdxCheckRow>& rows);

// --- resolution scan (CLI `resolution-scan`) ------------------------------

struct ResolutionScanRow {
    double delta_t = 0.0;
    double overlap_abs = 0.0;
    double analytic = 0.0;
};

std::vector<ResolutionScanRow> run_resolution_scan(double lambda, double sigma_eps,
                                                   double eps0, std::size_t n_points);
void write_resolution_csv(const std::string& path,
                          const std::vector<ResolutionScanRow>& rows);

} // namespace chronoclock
