#include "gravdec/oracle.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <mutex>
#include <thread>

#include <Eigen/Eigenvalues>

#include "gravdec/errors.hpp"
#include "gravdec/fft.hpp"
#include "gravdec/ops.hpp"
#include "gravdec/rng.hpp"

namespace gravdec::oracle {

namespace {

constexpr int kBlockSize = 16;
constexpr std::uint64_t kTag00 = 0x68303000; // stream tags per component
constexpr std::uint64_t kTag0i = 0x68306900;
constexpr std::uint64_t kTagij = 0x68696a00;

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Per-snapshot sums of psi psi^dagger and of |psi_i|^2 |psi_j|^2 (the latter
// gives per-entry variances since |(psi psi^dagger)_ij|^2 factorizes).
struct Accumulator {
    std::vector<Matrix> sum;
    std::vector<RealMatrix> sumsq;
    long count = 0;

    void init(int snapshots, int dim) {
        sum.assign(snapshots, Matrix::Zero(dim, dim));
        sumsq.assign(snapshots, RealMatrix::Zero(dim, dim));
        count = 0;
    }

    void add(int snap, const Vector& psi) {
        sum[snap].noalias() += psi * psi.adjoint();
        RealVector a = psi.cwiseAbs2();
        sumsq[snap].noalias() += a * a.transpose();
    }

    void add_weighted(int snap, const Matrix& rho, const RealMatrix& sq) {
        sum[snap] += rho;
        sumsq[snap] += sq;
    }

    void merge(const Accumulator& other) {
        for (std::size_t s = 0; s < sum.size(); ++s) {
            sum[s] += other.sum[s];
            sumsq[s] += other.sumsq[s];
        }
        count += other.count;
    }
};

// Ordered block committer: workers claim block indices atomically and merge
// their partials in block order, so the floating-point reduction tree is
// independent of the thread count.
class OrderedReducer {
public:
    explicit OrderedReducer(int n_blocks) : n_blocks_(n_blocks) {}

    int claim() { return next_.fetch_add(1); }

    void commit(int block, const Accumulator& partial, Accumulator& global) {
        std::unique_lock<std::mutex> lock(mutex_);
        cv_.wait(lock, [&] { return commit_index_ == block; });
        global.merge(partial);
        ++commit_index_;
        cv_.notify_all();
    }

    int blocks() const { return n_blocks_; }

private:
    int n_blocks_;
    std::atomic<int> next_{0};
    std::mutex mutex_;
    std::condition_variable cv_;
    int commit_index_ = 0;
};

EnsembleResult finalize(Accumulator& acc, std::vector<double> times, int n_traj,
                        std::uint64_t seed, double wall) {
    EnsembleResult out;
    out.times = std::move(times);
    out.n_traj = n_traj;
    out.master_seed = seed;
    out.wall_seconds = wall;
    const double n_samples = static_cast<double>(acc.count);
    out.mean.reserve(acc.sum.size());
    out.std_err.reserve(acc.sum.size());
    for (std::size_t s = 0; s < acc.sum.size(); ++s) {
        Matrix mean = acc.sum[s] / n_samples;
        RealMatrix var =
            (acc.sumsq[s] / n_samples - mean.cwiseAbs2()).cwiseMax(0.0);
        RealMatrix se = (var / std::max(n_samples - 1.0, 1.0)).cwiseSqrt();
        out.mean.push_back(std::move(mean));
        out.std_err.push_back(std::move(se));
    }
    return out;
}

// exact unitary e^{-i H t / hbar} for hermitian H
Matrix hermitian_unitary(const Matrix& H, double t, double hbar) {
    if (H.rows() == 2) {
        // Pauli rotation closed form
        const Complex a = H(0, 0), d = H(1, 1), b = H(0, 1);
        const double c0 = 0.5 * (a.real() + d.real());
        const double v3 = 0.5 * (a.real() - d.real());
        const double v1 = b.real();
        const double v2 = -b.imag();
        const double vn = std::sqrt(v1 * v1 + v2 * v2 + v3 * v3);
        const double theta = vn * t / hbar;
        const Complex phase = std::exp(Complex(0.0, -c0 * t / hbar));
        Matrix U(2, 2);
        if (vn == 0.0) {
            U << phase, 0.0, 0.0, phase;
            return U;
        }
        const double cs = std::cos(theta), sn = std::sin(theta);
        const Complex n1(v1 / vn), n2(v2 / vn), n3(v3 / vn);
        const Complex I(0.0, 1.0);
        U(0, 0) = phase * (cs - I * sn * n3);
        U(1, 1) = phase * (cs + I * sn * n3);
        U(0, 1) = phase * (-I * sn * (n1 - I * n2));
        U(1, 0) = phase * (-I * sn * (n1 + I * n2));
        return U;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    Vector phases(H.rows());
    for (Eigen::Index k = 0; k < H.rows(); ++k)
        phases(k) = std::exp(Complex(0.0, -es.eigenvalues()(k) * t / hbar));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

struct GridContext {
    OracleConfig config;
    std::vector<noise_field::FieldSampler> samplers; // ordered 00, 0i, ij (enabled only)
    std::vector<int> sampler_block;                  // 0, 1, 2 per sampler
    RealVector kinetic_phase_arg;                    // E_k dt / hbar
    Matrix P;                                        // dense operators for Full mode
    Matrix P2over4M;
    double coupling00 = 0.0; // sqrt(2) M c^2
    double dt_half_over_hbar = 0.0;
};

GridContext make_grid_context(const OracleConfig& config, std::uint64_t master_seed) {
    const Model& m = config.model;
    m.noise.validate();
    m.mass.validate();
    m.grid.validate();
    if (!(config.dt > 0.0) || config.steps <= 0 || config.snapshot_stride <= 0 ||
        config.steps % config.snapshot_stride != 0)
        throw ValidationError({"oracle.dt/steps/snapshot_stride"});
    if (config.mode == CouplingMode::Full && m.grid.n > 128)
        throw CapacityError("oracle: Full coupling mode limited to N <= 128");
    if (config.mode == CouplingMode::PositionOnly && m.grid.n > 4096)
        throw CapacityError("oracle: PositionOnly mode limited to N <= 4096");

    GridContext ctx;
    ctx.config = config;
    const double lambda = config.lambda < 0.0 ? m.noise.tau_c : config.lambda;
    ctx.config.lambda = lambda;

    const kernels::FormFactor ff(m.mass);
    const kernels::FormFactor* smear =
        m.mass.density == DensityKind::GaussianR ? &ff : nullptr;

    auto add_sampler = [&](double weight, std::uint64_t tag, int block) {
        if (weight <= 0.0) return;
        ctx.samplers.emplace_back(m.noise, m.grid, config.dt, lambda, weight, master_seed, tag,
                                  smear);
        ctx.sampler_block.push_back(block);
    };
    add_sampler(m.noise.weights.w00, kTag00, 0);
    if (config.mode == CouplingMode::Full) {
        add_sampler(m.noise.weights.w0i, kTag0i, 1);
        add_sampler(m.noise.weights.wij, kTagij, 2);
    }

    const double hbar = m.scales.hbar;
    ctx.kinetic_phase_arg.resize(m.grid.n);
    for (int k = 0; k < m.grid.n; ++k) {
        const double p = m.grid.p(k, hbar);
        ctx.kinetic_phase_arg(k) = p * p / (2.0 * m.mass.M) * config.dt / hbar;
    }
    if (config.mode == CouplingMode::Full) {
        ctx.P = ops::momentum_operator(m.grid, hbar);
        ctx.P2over4M = 0.25 / m.mass.M * (ctx.P * ctx.P);
    }
    ctx.coupling00 = kCouplingScale * m.mass.M * m.scales.c * m.scales.c;
    ctx.dt_half_over_hbar = 0.5 * config.dt / hbar;
    return ctx;
}

// fills in place so trajectory loops reuse the buffers
void sample_fields(const GridContext& ctx, std::uint64_t traj, std::uint64_t step, FieldSet& f) {
    for (std::size_t s = 0; s < ctx.samplers.size(); ++s) {
        RealVector* target = ctx.sampler_block[s] == 0   ? &f.h00
                             : ctx.sampler_block[s] == 1 ? &f.h0i
                                                         : &f.hij;
        ctx.samplers[s].sample(traj, step, *target);
    }
}

void step_in_place(Vector& psi, const FieldSet& fields, const GridContext& ctx) {
    const Model& m = ctx.config.model;
    const int n = m.grid.n;
    const double hbar = m.scales.hbar;

    if (ctx.config.mode == CouplingMode::PositionOnly) {
        // phase half-step from the sampled potential
        auto phase_half = [&](double scale) {
            if (fields.h00.size() == 0) return;
            for (int j = 0; j < n; ++j)
                psi(j) *= std::exp(
                    Complex(0.0, -ctx.coupling00 * fields.h00(j) * ctx.dt_half_over_hbar * scale));
        };
        if (!ctx.config.kinetic) {
            phase_half(2.0); // no kinetic step; both halves collapse into one multiply
            return;
        }
        phase_half(1.0);
        fft::to_momentum(psi);
        for (int k = 0; k < n; ++k)
            psi(k) *= std::exp(Complex(0.0, -ctx.kinetic_phase_arg(k)));
        fft::to_position(psi);
        phase_half(1.0);
        return;
    }

    // Full mode: dense instantaneous Hamiltonian, exact unitary per step
    Matrix H = Matrix::Zero(n, n);
    if (ctx.config.kinetic)
        H += 2.0 * ctx.P2over4M; // P^2/2M
    const double c = m.scales.c;
    if (fields.h00.size() > 0) {
        Matrix D = fields.h00.cast<Complex>().asDiagonal();
        H += kCouplingScale * (m.mass.M * c * c * D + ops::anticommutator(D, ctx.P2over4M));
    }
    if (fields.h0i.size() > 0) {
        Matrix D = fields.h0i.cast<Complex>().asDiagonal();
        H += kCouplingScale * 0.5 * c * ops::anticommutator(D, ctx.P);
    }
    if (fields.hij.size() > 0) {
        Matrix D = fields.hij.cast<Complex>().asDiagonal();
        H += kCouplingScale * ops::anticommutator(D, ctx.P2over4M);
    }
    psi = hermitian_unitary(H, ctx.config.dt, hbar) * psi;
}

void run_one_trajectory(const GridContext& ctx, Vector psi, std::uint64_t traj,
                        Accumulator& acc) {
    acc.add(0, psi);
    int snap = 1;
    FieldSet fields;
    for (int step = 1; step <= ctx.config.steps; ++step) {
        sample_fields(ctx, traj, static_cast<std::uint64_t>(step - 1), fields);
        step_in_place(psi, fields, ctx);
        const double drift = std::abs(psi.norm() - 1.0);
        if (drift > 1e-6)
            throw NumericalError("oracle: norm drift exceeded 1e-6 at step " +
                                     std::to_string(step) + "; refine dt",
                                 drift);
        if (step % ctx.config.snapshot_stride == 0) acc.add(snap++, psi);
    }
    acc.count += 1;
}

} // namespace

PureState trajectory_step(const PureState& psi, const FieldSet& fields,
                          const OracleConfig& config) {
    GridContext ctx = make_grid_context(config, 0);
    PureState out = psi;
    step_in_place(out.vector(), fields, ctx);
    return out;
}

EnsembleResult run_ensemble(const OracleConfig& config, const PureState& psi0, int n_traj,
                            std::uint64_t master_seed, int threads) {
    if (n_traj < 2) throw ValidationError({"oracle.n_traj (needs >= 2)"});
    const auto t_start = std::chrono::steady_clock::now();
    const GridContext ctx = make_grid_context(config, master_seed);

    const int snapshots = config.steps / config.snapshot_stride + 1;
    const int dim = psi0.dim();
    Accumulator global;
    global.init(snapshots, dim);

    const int n_blocks = (n_traj + kBlockSize - 1) / kBlockSize;
    OrderedReducer reducer(n_blocks);
    const int n_workers = std::min(resolve_threads(threads), n_blocks);

    std::mutex failure_mutex;
    std::string failure;

    auto worker = [&] {
        Accumulator partial;
        for (;;) {
            const int block = reducer.claim();
            if (block >= n_blocks) return;
            partial.init(snapshots, dim);
            const int first = block * kBlockSize;
            const int last = std::min(first + kBlockSize, n_traj);
            for (int traj = first; traj < last; ++traj) {
                try {
                    run_one_trajectory(ctx, psi0.vector(), static_cast<std::uint64_t>(traj),
                                       partial);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (failure.empty())
                        failure = "trajectory " + std::to_string(traj) + " (seed " +
                                  std::to_string(master_seed) + "): " + e.what();
                }
            }
            reducer.commit(block, partial, global);
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    if (!failure.empty()) throw NumericalError("oracle ensemble aborted: " + failure, 0.0);

    std::vector<double> times(snapshots);
    for (int s = 0; s < snapshots; ++s) times[s] = s * config.snapshot_stride * config.dt;

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return finalize(global, std::move(times), n_traj, master_seed, wall);
}

std::vector<PureState> replay_trajectory(const OracleConfig& config, const PureState& psi0,
                                         std::uint64_t master_seed, int trajectory_index) {
    const GridContext ctx = make_grid_context(config, master_seed);
    std::vector<PureState> snaps;
    Vector psi = psi0.vector();
    snaps.emplace_back(psi, psi0.basis(), psi0.grid());
    FieldSet fields;
    for (int step = 1; step <= config.steps; ++step) {
        sample_fields(ctx, static_cast<std::uint64_t>(trajectory_index),
                      static_cast<std::uint64_t>(step - 1), fields);
        step_in_place(psi, fields, ctx);
        if (step % config.snapshot_stride == 0)
            snaps.emplace_back(psi, psi0.basis(), psi0.grid());
    }
    return snaps;
}

EnsembleResult run_dense_ensemble(const DenseNoiseModel& model, double alpha,
                                  const std::vector<double>& snapshot_times,
                                  const Vector& psi0, int n_traj, std::uint64_t master_seed,
                                  int threads, bool antithetic) {
    if (n_traj < 2) throw ValidationError({"oracle.n_traj (needs >= 2)"});
    if (model.couplings.empty() ||
        model.sigma.size() != static_cast<Eigen::Index>(model.couplings.size()))
        throw ValidationError({"oracle.dense_model (couplings/sigma mismatch)"});
    if (!(model.block_length > 0.0)) throw ValidationError({"oracle.dense_model.block_length"});
    if (snapshot_times.empty() || snapshot_times.front() < 0.0)
        throw ValidationError({"oracle.snapshot_times"});
    if (antithetic && n_traj % 2 != 0)
        throw ValidationError({"oracle.n_traj (antithetic pairing needs an even count)"});

    const auto t_start = std::chrono::steady_clock::now();
    const int dim = static_cast<int>(psi0.size());
    const int snapshots = static_cast<int>(snapshot_times.size());
    const double t_final = snapshot_times.back();
    const double delta = model.block_length;
    const int n_channels = static_cast<int>(model.couplings.size());

    // one "sample unit" is a trajectory (plain) or an antithetic pair
    const int units = antithetic ? n_traj / 2 : n_traj;
    const int n_blocks = (units + kBlockSize - 1) / kBlockSize;
    OrderedReducer reducer(n_blocks);
    const int n_workers = std::min(resolve_threads(threads), n_blocks);

    Accumulator global;
    global.init(snapshots, dim);

    auto run_unit = [&](std::uint64_t unit, Accumulator& acc) {
        rng::Stream stream = rng::Stream::keyed(master_seed, unit);
        const double offset = stream.next_uniform() * delta;
        const int n_full_blocks = static_cast<int>(std::ceil((t_final + offset) / delta)) + 1;

        // draw all block values once so both antithetic branches share them
        std::vector<double> values(static_cast<std::size_t>(n_full_blocks) * n_channels);
        for (double& v : values) v = stream.next_gaussian();

        const int branches = antithetic ? 2 : 1;
        std::vector<Matrix> unit_rho(snapshots, Matrix::Zero(dim, dim));

        for (int br = 0; br < branches; ++br) {
            const double sign = (br == 0) ? 1.0 : -1.0;
            Vector psi = psi0;
            double t = 0.0;
            int snap = 0;
            // block b covers [b*delta - offset, (b+1)*delta - offset)
            while (snap < snapshots) {
                const double t_snap = snapshot_times[snap];
                if (t_snap <= t + 1e-15 * std::max(1.0, t_final)) {
                    unit_rho[snap] += (psi * psi.adjoint()) / static_cast<double>(branches);
                    ++snap;
                    continue;
                }
                const int block = static_cast<int>(std::floor((t + offset) / delta));
                const double block_end = (block + 1) * delta - offset;
                const double t_next = std::min(block_end, t_snap);

                Matrix H = model.H0;
                for (int ch = 0; ch < n_channels; ++ch) {
                    const double h = sign * std::sqrt(model.sigma(ch)) *
                                     values[static_cast<std::size_t>(block) * n_channels + ch];
                    H += alpha * h * model.couplings[ch];
                }
                psi = hermitian_unitary(H, t_next - t, model.hbar) * psi;
                t = t_next;
            }
        }

        for (int s = 0; s < snapshots; ++s) {
            RealMatrix sq = unit_rho[s].cwiseAbs2();
            acc.add_weighted(s, unit_rho[s], sq);
        }
        acc.count += 1;
    };

    auto worker = [&] {
        Accumulator partial;
        for (;;) {
            const int block = reducer.claim();
            if (block >= n_blocks) return;
            partial.init(snapshots, dim);
            const int first = block * kBlockSize;
            const int last = std::min(first + kBlockSize, units);
            for (int unit = first; unit < last; ++unit)
                run_unit(static_cast<std::uint64_t>(unit), partial);
            reducer.commit(block, partial, global);
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return finalize(global, snapshot_times, n_traj, master_seed, wall);
}

} // namespace gravdec::oracle
