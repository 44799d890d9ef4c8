#include "gravdec/propagators.hpp"

#include <cmath>
#include <limits>

#include "gravdec/errors.hpp"
#include "gravdec/fft.hpp"

namespace gravdec::propagators {

void PropagationPlan::validate(double e_max, double gamma_max, double hbar) const {
    std::vector<std::string> bad;
    if (!(dt > 0.0)) bad.push_back("plan.dt");
    if (steps <= 0) bad.push_back("plan.steps");
    if (snapshot_stride <= 0 || steps % snapshot_stride != 0) bad.push_back("plan.snapshot_stride");
    if (!bad.empty()) throw ValidationError(std::move(bad));

    double bound = std::numeric_limits<double>::infinity();
    if (e_max > 0.0) bound = std::min(bound, hbar / e_max);
    if (gamma_max > 0.0) bound = std::min(bound, 1.0 / gamma_max);
    bound *= 0.1;
    if (dt > bound)
        throw ValidationError({"plan.dt: exceeds the stability bound; suggested dt <= " +
                               std::to_string(bound)});
}

namespace {

void emit(std::vector<DenseState>& snaps, const SnapshotCallback& cb, int step, double t,
          const DenseState& state) {
    snaps.push_back(state); // deep copy, never a view
    if (cb) cb(step, t, state);
}

} // namespace

std::vector<DenseState> propagate_split_step(DenseState rho,
                                             const generators::Superoperator& gen,
                                             const PropagationPlan& plan,
                                             const SnapshotCallback& on_snapshot) {
    const auto* pk = gen.position_kernel();
    if (!pk) throw RegimeError("propagate_split_step: needs a position-kernel generator");
    if (rho.basis() != BasisTag::Position || rho.dim() != pk->grid.n)
        throw RegimeError("propagate_split_step: state/generator grid mismatch");

    const Grid1D& grid = pk->grid;
    const int n = grid.n;
    const double hbar = pk->hbar;
    plan.validate(pk->kinetic ? grid.kinetic_energy_max(pk->mass, hbar) : 0.0, pk->gamma_max(),
                  hbar);

    // precomputed half-step kernel decay per pair offset
    RealVector half_decay(2 * n - 1);
    for (int k = 0; k < 2 * n - 1; ++k)
        half_decay(k) = std::exp(-0.5 * pk->gamma(k) * plan.dt);

    // kinetic phases e^{-i(E_k - E_l) dt / hbar}
    Matrix kin_phase(n, n);
    if (pk->kinetic) {
        RealVector energy(n);
        for (int k = 0; k < n; ++k) {
            const double p = grid.p(k, hbar);
            energy(k) = p * p / (2.0 * pk->mass);
        }
        for (int l = 0; l < n; ++l)
            for (int k = 0; k < n; ++k)
                kin_phase(k, l) = std::exp(Complex(0.0, -(energy(k) - energy(l)) * plan.dt / hbar));
    }

    auto kernel_half_step = [&](Matrix& m) {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) m(i, j) *= half_decay(i - j + n - 1);
    };

    std::vector<DenseState> snaps;
    snaps.reserve(plan.snapshot_count());
    emit(snaps, on_snapshot, 0, 0.0, rho);

    Matrix& m = rho.matrix();
    for (int step = 1; step <= plan.steps; ++step) {
        kernel_half_step(m);
        if (pk->kinetic) {
            fft::to_momentum(m);
            m.array() *= kin_phase.array();
            fft::to_position(m);
        }
        kernel_half_step(m);
        if (step % plan.snapshot_stride == 0)
            emit(snaps, on_snapshot, step, step * plan.dt, rho);
    }
    return snaps;
}

DenseState propagate_momentum_exact(const DenseState& rho0,
                                    const generators::Superoperator& gen, double t) {
    const auto* md = gen.momentum_diagonal();
    if (!md) throw RegimeError("propagate_momentum_exact: needs a momentum-diagonal generator");
    if (rho0.basis() != BasisTag::Momentum)
        throw RegimeError("propagate_momentum_exact: state must be in the momentum basis");

    const Grid1D& grid = rho0.grid();
    const int n = rho0.dim();
    DenseState out = rho0;
    Matrix& m = out.matrix();
    for (int l = 0; l < n; ++l) {
        const double pl = grid.p(l, md->hbar);
        for (int k = 0; k < n; ++k) {
            const double pk = grid.p(k, md->hbar);
            m(k, l) *= std::exp(Complex(-md->rate(pk, pl) * t, md->phase_rate(pk, pl) * t));
        }
    }
    return out;
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0, kA53 = 64448.0 / 6561.0,
                 kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

} // namespace

std::vector<DenseState> propagate_dense(const generators::Superoperator& gen, DenseState rho,
                                        const PropagationPlan& plan,
                                        const SnapshotCallback& on_snapshot,
                                        const DenseRKOptions& options) {
    const int n = rho.dim();
    Matrix S_owned;
    if (!gen.is_dense()) S_owned = gen.to_dense_matrix(rho.grid());
    const Matrix& S = gen.is_dense() ? gen.dense() : S_owned;
    if (S.rows() != n * n) throw RegimeError("propagate_dense: dimension mismatch");
    if (n > generators::kDenseDimLimit)
        throw CapacityError("propagate_dense: N exceeds the dense guard");

    auto deriv = [&](const Vector& y) -> Vector { return S * y; };

    Vector y = Eigen::Map<const Vector>(rho.matrix().data(), n * n);

    std::vector<DenseState> snaps;
    snaps.reserve(plan.snapshot_count());
    auto emit_vec = [&](int step, double t) {
        DenseState s(Eigen::Map<const Matrix>(y.data(), n, n), rho.basis(), rho.grid());
        snaps.push_back(s);
        if (on_snapshot) on_snapshot(step, t, snaps.back());
    };
    emit_vec(0, 0.0);

    const double t_total = plan.steps * plan.dt;
    const double dt_min = 1e-14 * std::max(t_total, plan.dt);
    double h = plan.dt; // initial guess; adapted below
    double t = 0.0;

    Vector k1 = deriv(y), k2, k3, k4, k5, k6, k7, ytmp, y5, err;

    for (int snap = 1; snap <= plan.steps / plan.snapshot_stride; ++snap) {
        const double t_target = snap * plan.snapshot_stride * plan.dt;
        while (t < t_target - 1e-12 * t_total) {
            bool clipped = false;
            double step = h;
            if (t + step > t_target) {
                step = t_target - t;
                clipped = true;
            }

            ytmp = y + step * kA21 * k1;
            k2 = deriv(ytmp);
            ytmp = y + step * (kA31 * k1 + kA32 * k2);
            k3 = deriv(ytmp);
            ytmp = y + step * (kA41 * k1 + kA42 * k2 + kA43 * k3);
            k4 = deriv(ytmp);
            ytmp = y + step * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4);
            k5 = deriv(ytmp);
            ytmp = y + step * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5);
            k6 = deriv(ytmp);
            y5 = y + step * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
            k7 = deriv(y5);
            err = step * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

            // scaled max-norm error
            double scale_err = 0.0;
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                const double sc =
                    options.abs_tol +
                    options.rel_tol * std::max(std::abs(y(i)), std::abs(y5(i)));
                scale_err = std::max(scale_err, std::abs(err(i)) / sc);
            }

            if (scale_err <= 1.0) {
                t += step;
                y.swap(y5);
                k1.swap(k7); // FSAL
            }

            double factor = 0.9 * std::pow(std::max(scale_err, 1e-16), -0.2);
            factor = std::min(5.0, std::max(0.2, factor));
            const double h_new = step * factor;
            if (!clipped || scale_err > 1.0) h = h_new;
            if (h < dt_min) {
                // dominant rate estimate from the current derivative
                const double rate = k1.norm() / std::max(y.norm(), 1e-300);
                throw NumericalError(
                    "propagate_dense: step size underflow (stiff generator, dominant rate ~" +
                        std::to_string(rate) + ")",
                    scale_err);
            }
        }
        t = t_target;
        emit_vec(snap * plan.snapshot_stride, t_target);
    }
    return snaps;
}

} // namespace gravdec::propagators
