// oracle.hpp — brute-force stochastic-trajectory ensembles
//
// Pure states are propagated under the noise-sampled Hamiltonian and their
// projectors averaged; the ensemble mean is the reference density matrix for
// every master-equation claim.  The trajectory coupling operators mirror the
// generator couplings (position block M c^2 h(X), plus the anticommutator
// blocks in Full mode) scaled by sqrt(2), which makes the ensemble reproduce
// the generators' rates exactly in the commuting case with the sampler's
// per-step covariance alpha^2 lambda u(dx)/dt.

#pragma once

#include <cstdint>
#include <vector>

#include "gravdec/config.hpp"
#include "gravdec/model.hpp"
#include "gravdec/noise_field.hpp"

namespace gravdec::oracle {

enum class CouplingMode { PositionOnly, Full };

// Bridge constant between the sampler's covariance convention and the
// generators' pinned rates (see README conventions).
inline constexpr double kCouplingScale = M_SQRT2;

struct OracleConfig {
    Model model;
    CouplingMode mode = CouplingMode::PositionOnly;
    bool kinetic = true; // false = frozen kinetic term (M -> infinity limit)
    double dt = 0.0;
    int steps = 0;
    int snapshot_stride = 1;
    double lambda = -1.0; // field-variance lambda; < 0 -> tau_c
};

struct EnsembleResult {
    std::vector<double> times;
    std::vector<Matrix> mean;          // snapshot means of psi psi^dagger
    std::vector<RealMatrix> std_err;   // per-entry standard error of the mean
    int n_traj = 0;
    std::uint64_t master_seed = 0;
    double wall_seconds = 0.0;
};

// Sampled fields for one step (entries empty when the block weight is zero).
struct FieldSet {
    RealVector h00;
    RealVector h0i;
    RealVector hij;
};

// One Strang step: half-step position phase, kinetic FFT step, half-step
// phase.  Full mode applies the anticommutator couplings through a dense
// unitary (exact exponential via eigendecomposition, N <= 128).
PureState trajectory_step(const PureState& psi, const FieldSet& fields,
                          const OracleConfig& config);

// Deterministic given (config, n_traj, master_seed) for any thread count:
// trajectories are reduced block-wise in a fixed commit order.
EnsembleResult run_ensemble(const OracleConfig& config, const PureState& psi0, int n_traj,
                            std::uint64_t master_seed, int threads = 0);

// Full single-trajectory snapshot dump for debugging/replay.
std::vector<PureState> replay_trajectory(const OracleConfig& config, const PureState& psi0,
                                         std::uint64_t master_seed, int trajectory_index);

// ---- generic dense-system ensemble (block-constant Gaussian noise) --------
//
// d|psi>/dt = -(i/hbar)(H0 + alpha sum_i h_i(t) Hc_i)|psi>, with h_i constant
// on intervals of length block_length whose grid carries a uniformly random
// offset per trajectory.  The resulting stationary autocorrelation is exactly
// triangular: E[h(t) h(s)] = sigma_ii (1 - |t-s|/block_length)_+ , which the
// cumulant engine represents exactly as a Tabulated correlation.  Segments
// are integrated with exact matrix exponentials, so there is no time-step
// error anywhere.
struct DenseNoiseModel {
    Matrix H0;
    std::vector<Matrix> couplings; // hermitian coupling operators
    RealVector sigma;              // noise variance per coupling (independent channels)
    double block_length = 1.0;
    double hbar = 1.0;
};

// Antithetic pairing evaluates trajectories in +-noise pairs, cancelling every
// odd-alpha fluctuation; pair means are the independent samples for the
// standard-error estimate.
EnsembleResult run_dense_ensemble(const DenseNoiseModel& model, double alpha,
                                  const std::vector<double>& snapshot_times,
                                  const Vector& psi0, int n_traj, std::uint64_t master_seed,
                                  int threads = 0, bool antithetic = true);

} // namespace gravdec::oracle
