// propagators.hpp — time evolution under each generator representation

#pragma once

#include <functional>
#include <vector>

#include "gravdec/generators.hpp"
#include "gravdec/model.hpp"

namespace gravdec::propagators {

enum class Method { SplitStep, MomentumExact, DenseRK };

struct PropagationPlan {
    double dt = 0.0;
    int steps = 0;
    int snapshot_stride = 1;
    Method method = Method::SplitStep;

    int snapshot_count() const { return steps / snapshot_stride + 1; } // includes t = 0

    // dt <= 0.1 min(hbar/E_max, 1/Gamma_max); throws with a suggested dt
    void validate(double e_max, double gamma_max, double hbar = 1.0) const;
};

// (step index, time, state view), delivered synchronously in step order.
using SnapshotCallback = std::function<void(int step, double time, const DenseState& state)>;

// Strang splitting for a position-kernel generator: half-step kernel multiply
// exp(-Gamma dt/2), full kinetic FFT rotation, half-step kernel multiply.
// Second order in dt; exact when the kinetic part is off.
std::vector<DenseState> propagate_split_step(DenseState rho,
                                             const generators::Superoperator& gen,
                                             const PropagationPlan& plan,
                                             const SnapshotCallback& on_snapshot = {});

// Closed-form evolution of a momentum-diagonal generator:
//   rho(p, p'; t) = e^{-i(E-E')t/hbar} e^{-R(p,p') t} rho(p, p'; 0).
DenseState propagate_momentum_exact(const DenseState& rho0,
                                    const generators::Superoperator& gen, double t);

struct DenseRKOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
};

// Adaptive embedded Runge-Kutta (Dormand-Prince 4(5)) on vec(rho) for a dense
// superoperator.  Snapshots land exactly on the plan's time grid.
std::vector<DenseState> propagate_dense(const generators::Superoperator& gen, DenseState rho,
                                        const PropagationPlan& plan,
                                        const SnapshotCallback& on_snapshot = {},
                                        const DenseRKOptions& options = {});

} // namespace gravdec::propagators
