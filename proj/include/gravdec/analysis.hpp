// analysis.hpp — decoherence observables, rate fits, and the limit-recovery
// and scaling studies

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gravdec/generators.hpp"
#include "gravdec/model.hpp"
#include "gravdec/oracle.hpp"

namespace gravdec::analysis {

struct DecaySeries {
    std::vector<double> times;
    std::vector<Complex> coherence;
    std::vector<double> std_err; // optional; empty = unweighted

    void validate() const; // ascending times, matching sizes
};

// Sum of rho(i, i+lag) over i (no wrap); the natural coherence observable at
// one grid separation.
Complex lag_coherence(const Matrix& rho, int lag);

// Cauchy-Schwarz bound check: |rho(i,j)| <= sqrt(rho(i,i) rho(j,j)) + tol.
bool coherence_bound_ok(const Matrix& rho, double tol = 1e-8);

struct RateFit {
    double rate = 0.0;
    double std_err = 0.0;
    int points = 0;
};

// Weighted least squares on log|coherence|.  Non-decaying series fit to
// rate ~ 0 with an honest standard error; they are not a failure.
RateFit fit_exponential_rate(const DecaySeries& series);

// Build a DecaySeries for one lag from ensemble snapshots.
DecaySeries series_from_ensemble(const oracle::EnsembleResult& ens, int lag);
DecaySeries series_from_snapshots(const std::vector<double>& times,
                                  const std::vector<DenseState>& snaps, int lag);

// ---- limit recovery --------------------------------------------------------

struct LimitRow {
    std::string state_label;
    double dev_position = 0.0; // ||(G_full - G_pos) rho|| / ||G_full rho||
    double dev_momentum = 0.0;
    double q_dx_spread = 0.0;  // q_rms * dx_rms / hbar (small-q indicator)
    double dE_over_Mc2 = 0.0;  // energy-coherence indicator of the h00 condition
};

struct LimitReport {
    std::vector<LimitRow> rows;
};

// Relative operator-action deviations between the full generator and each
// limit on a probe-state set, plus the regime indicator values.
LimitReport limit_report(const generators::Superoperator& full,
                         const generators::Superoperator& position,
                         const generators::Superoperator& momentum,
                         const std::vector<std::pair<std::string, DenseState>>& probes,
                         const NoiseSpec& noise, const MassSpec& mass,
                         const Scales& scales = Scales::natural());

// ---- alpha-scaling study ----------------------------------------------------

struct TwoLevelConfig {
    double omega = 1.0;        // H0 = (hbar omega / 2) sigma_z
    bool coupling_sigma_x = true; // false = sigma_z (commuting configuration)
    double sigma = 1.0;        // noise variance
    double tau_c = 0.5;        // noise block length (triangular correlation width)
    double t_final = 2.0;
    int snapshots = 5;
    int n_traj_base = 20000;   // trajectory count at the largest alpha
    double hbar = 1.0;
    std::uint64_t seed = 1;
    int threads = 0;
};

struct ScalingPoint {
    double alpha = 0.0;
    double deviation = 0.0; // max-over-snapshots Frobenius distance MC vs cumulant
    double stat_err = 0.0;  // statistical error estimate of the deviation
    int n_traj = 0;
};

struct ScalingStudy {
    std::vector<ScalingPoint> points;
    double exponent = 0.0;
    double exponent_std_err = 0.0;
    bool conclusive = false;       // statistical error < 10% of deviation everywhere
    long n_traj_required = 0;      // estimate to reach the 10% bar when inconclusive
};

// Deviation between the second-order cumulant evolution and the Monte Carlo
// ensemble across alphas, with a fitted power-law exponent.  Trajectory counts
// scale as (alpha_max/alpha)^4 from n_traj_base.  Requires >= 3 alphas.
ScalingStudy alpha_scaling_study(const TwoLevelConfig& config,
                                 const std::vector<double>& alphas);

// Cumulant-side evolution of the same two-level model (exposed for the demo
// subcommand and tests): returns rho(t) at the snapshot times.
std::vector<Matrix> two_level_cumulant_evolution(const TwoLevelConfig& config, double alpha,
                                                 const std::vector<double>& times);

std::vector<double> two_level_snapshot_times(const TwoLevelConfig& config);

} // namespace gravdec::analysis
