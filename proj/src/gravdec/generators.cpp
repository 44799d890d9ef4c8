#include "gravdec/generators.hpp"

#include <cmath>
#include <cstdio>

#include <Eigen/Eigenvalues>

#include "gravdec/errors.hpp"
#include "gravdec/fft.hpp"
#include "gravdec/hash.hpp"
#include "gravdec/ops.hpp"

namespace gravdec::generators {

namespace {

constexpr double kTwoPiPow32 = 15.749609945722419; // (2 pi)^{3/2}

std::uint64_t fingerprint_of(const char* tag, std::initializer_list<double> params) {
    std::string buf(tag);
    char num[32];
    for (double p : params) {
        std::snprintf(num, sizeof(num), "|%.17g", p);
        buf += num;
    }
    return fnv1a64(buf);
}

// S += sum_k c_k kron(B_k^T, A_k), i.e. the superoperator of
// rho -> sum_k c_k A_k rho B_k (column-major vec convention).
// The k-sum is organized as one GEMM per outer row-block.
void accumulate_products(Matrix& S, const std::vector<Matrix>& A, const std::vector<Matrix>& B,
                         const std::vector<Complex>& coeff) {
    const int n = static_cast<int>(A.front().rows());
    const int K = static_cast<int>(A.size());
    Matrix Astack(n * n, K);
    for (int k = 0; k < K; ++k)
        Astack.col(k) = Eigen::Map<const Vector>(A[k].data(), n * n);

    Matrix W(K, n);
    Matrix R(n * n, n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < K; ++k)
            for (int l = 0; l < n; ++l) W(k, l) = coeff[k] * B[k](l, j);
        R.noalias() = Astack * W;
        // scatter: column l of R is vec of the (j,l) block
        for (int l = 0; l < n; ++l) {
            Eigen::Map<const Matrix> block(R.col(l).data(), n, n);
            S.block(j * n, l * n, n, n) += block;
        }
    }
}

// S += c (kron(I, M1) + kron(M2^T, I)), the rho -> c(M1 rho + rho M2) part.
void accumulate_identity_terms(Matrix& S, const Matrix& M1, const Matrix& M2, Complex c) {
    const int n = static_cast<int>(M1.rows());
    for (int j = 0; j < n; ++j) S.block(j * n, j * n, n, n) += c * M1;
    for (int l = 0; l < n; ++l)
        for (int j = 0; j < n; ++j) {
            const Complex v = c * M2(l, j);
            if (v == Complex(0.0, 0.0)) continue;
            for (int i = 0; i < n; ++i) S(j * n + i, l * n + i) += v;
        }
}

// S += c (kron(I, H) - kron(H^T, I)), the commutator superoperator c [H, .].
void accumulate_commutator(Matrix& S, const Matrix& H, Complex c) {
    accumulate_identity_terms(S, c * H, -c * H, Complex(1.0, 0.0));
}

} // namespace

void gauss_hermite(int n, RealVector& nodes, RealVector& weights) {
    // Golub-Welsch on the Hermite Jacobi matrix
    RealMatrix J = RealMatrix::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = std::sqrt(0.5 * k);
        J(k, k - 1) = b;
        J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(J);
    nodes = solver.eigenvalues();
    weights.resize(n);
    const double mu0 = std::sqrt(M_PI);
    for (int k = 0; k < n; ++k) {
        const double v = solver.eigenvectors()(0, k);
        weights(k) = mu0 * v * v;
    }
}

const Matrix& Superoperator::dense() const {
    if (!dense_) throw RegimeError("Superoperator: no dense representation");
    return *dense_;
}

Superoperator Superoperator::make_dense(Matrix super, Regime regime, std::uint64_t fingerprint,
                                        int dim) {
    Superoperator s;
    s.regime_ = regime;
    s.fingerprint_ = fingerprint;
    s.dim_ = dim;
    s.dense_ = std::move(super);
    return s;
}

Superoperator Superoperator::make_position(PositionKernelData data, Regime regime,
                                           std::uint64_t fingerprint) {
    Superoperator s;
    s.regime_ = regime;
    s.fingerprint_ = fingerprint;
    s.dim_ = data.grid.n;
    s.position_ = std::move(data);
    return s;
}

Superoperator Superoperator::make_momentum(MomentumDiagonalData data, Regime regime,
                                           std::uint64_t fingerprint) {
    Superoperator s;
    s.regime_ = regime;
    s.fingerprint_ = fingerprint;
    s.dim_ = 0; // binds to the state's grid at application time
    s.momentum_ = std::move(data);
    return s;
}

Matrix Superoperator::apply(const DenseState& state) const {
    const int n = state.dim();
    const Matrix& rho = state.matrix();

    if (dense_) {
        if (n * n != dense_->rows())
            throw RegimeError("Superoperator: dimension mismatch");
        Eigen::Map<const Vector> v(rho.data(), n * n);
        Vector out = (*dense_) * v;
        return Eigen::Map<const Matrix>(out.data(), n, n);
    }

    if (position_) {
        if (state.basis() != BasisTag::Position || n != position_->grid.n)
            throw RegimeError("Superoperator: position-kernel expects a position-basis grid state");
        Matrix out = Matrix::Zero(n, n);
        if (position_->kinetic) {
            Matrix tmp = rho;
            fft::to_momentum(tmp);
            const Grid1D& g = position_->grid;
            for (int l = 0; l < n; ++l) {
                const double el = g.p(l, position_->hbar);
                const double El = el * el / (2.0 * position_->mass);
                for (int k = 0; k < n; ++k) {
                    const double ek = g.p(k, position_->hbar);
                    const double Ek = ek * ek / (2.0 * position_->mass);
                    tmp(k, l) *= Complex(0.0, -(Ek - El) / position_->hbar);
                }
            }
            fft::to_position(tmp);
            out = tmp;
        }
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) out(i, j) -= position_->gamma_at(i, j) * rho(i, j);
        return out;
    }

    if (momentum_) {
        if (state.basis() != BasisTag::Momentum)
            throw RegimeError("Superoperator: momentum-diagonal expects a momentum-basis state");
        const Grid1D& g = state.grid();
        Matrix out(n, n);
        for (int l = 0; l < n; ++l) {
            const double pl = g.p(l, momentum_->hbar);
            for (int k = 0; k < n; ++k) {
                const double pk = g.p(k, momentum_->hbar);
                out(k, l) = rho(k, l) * Complex(-momentum_->rate(pk, pl),
                                                momentum_->phase_rate(pk, pl));
            }
        }
        return out;
    }

    throw RegimeError("Superoperator: empty");
}

Matrix Superoperator::to_dense_matrix(const Grid1D& grid, const Scales& scales) const {
    if (dense_) return *dense_;

    const int n = grid.n;
    if (n > kDenseDimLimit)
        throw CapacityError("Superoperator: dense materialization refused above N = " +
                            std::to_string(kDenseDimLimit));
    Matrix S = Matrix::Zero(n * n, n * n);

    if (position_) {
        if (position_->kinetic) {
            Matrix K = ops::kinetic_operator(grid, position_->mass, position_->hbar);
            accumulate_commutator(S, K, Complex(0.0, -1.0 / position_->hbar));
        }
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                S(j * n + i, j * n + i) -= position_->gamma_at(i, j);
        return S;
    }

    if (momentum_) {
        for (int l = 0; l < n; ++l) {
            const double pl = grid.p(l, momentum_->hbar);
            for (int k = 0; k < n; ++k) {
                const double pk = grid.p(k, momentum_->hbar);
                S(l * n + k, l * n + k) =
                    Complex(-momentum_->rate(pk, pl), momentum_->phase_rate(pk, pl));
            }
        }
        return S;
    }

    throw RegimeError("Superoperator: empty");
}

Superoperator build_free_liouvillian(const Grid1D& grid, const MassSpec& mass,
                                     const Scales& scales) {
    grid.validate();
    mass.validate();
    PositionKernelData data;
    data.grid = grid;
    data.mass = mass.M;
    data.hbar = scales.hbar;
    data.kinetic = true;
    data.gamma = RealVector::Zero(2 * grid.n - 1);
    return Superoperator::make_position(
        std::move(data), Regime::Free,
        fingerprint_of("free", {static_cast<double>(grid.n), grid.extent, mass.M}));
}

Superoperator build_position_generator(const NoiseSpec& noise, const kernels::FormFactor& ff,
                                       const Grid1D& grid, const Scales& scales, bool kinetic) {
    noise.validate();
    grid.validate();

    PositionKernelData data;
    data.grid = grid;
    data.mass = ff.mass().M;
    data.hbar = scales.hbar;
    data.kinetic = kinetic;
    data.gamma = RealVector::Zero(2 * grid.n - 1);

    if (noise.alpha > 0.0) {
        if (noise.kernel == KernelKind::GaussianL) {
            // Gamma is even; evaluate per |offset| with lambda pinned to tau_c
            for (int off = 0; off < grid.n; ++off) {
                const double g =
                    kernels::position_rate_spectral(noise, ff, off * grid.dx(), scales);
                data.gamma(grid.n - 1 + off) = g;
                data.gamma(grid.n - 1 - off) = g;
            }
        } else {
            if (ff.mass().density != DensityKind::GaussianR)
                throw CapacityError(
                    "build_position_generator: delta kernel with a point mass has a divergent "
                    "rate; use a Gaussian mass density");
            kernels::BlencoweParams p{noise.alpha, ff.mass().M, ff.mass().R, noise.l,
                                      noise.tau_c};
            for (int off = 0; off < grid.n; ++off) {
                const double g =
                    noise.weights.w00 * kernels::blencowe_rate(p, off * grid.dx(), scales);
                data.gamma(grid.n - 1 + off) = g;
                data.gamma(grid.n - 1 - off) = g;
            }
        }
    }

    auto gen = Superoperator::make_position(
        std::move(data), Regime::PositionLimit,
        fingerprint_of("position", {noise.alpha, noise.tau_c, noise.L, noise.l,
                                    static_cast<double>(grid.n), grid.extent, ff.mass().M,
                                    ff.mass().R, kinetic ? 1.0 : 0.0}));
    if (!noise.weights.position_dominant())
        gen.add_note("regime mismatch: weights are not h00-dominant for the position limit");
    return gen;
}

Superoperator build_momentum_generator(const NoiseSpec& noise, const kernels::FormFactor& ff,
                                       const MassSpec& mass, double lambda,
                                       const Scales& scales) {
    noise.validate();
    mass.validate();
    if (!(lambda >= 0.0)) throw std::domain_error("build_momentum_generator: lambda >= 0");

    kernels::MomentumCoefficients C;
    if (noise.kernel == KernelKind::GaussianL) {
        C = kernels::momentum_coefficients(noise, ff, lambda, scales);
    } else {
        if (ff.mass().density != DensityKind::GaussianR)
            throw CapacityError(
                "build_momentum_generator: delta kernel with a point mass has a divergent "
                "coefficient integral");
        // flat spectrum against the Gaussian form factor, closed Gaussian integral
        const double hbar = scales.hbar;
        const double R = ff.mass().R;
        const double integral = std::pow(noise.l, 3) / kTwoPiPow32 *
                                std::pow(M_PI, 1.5) * std::pow(hbar, 3) / std::pow(R, 3);
        const double base =
            noise.alpha * noise.alpha * lambda / (kTwoPiPow32 * std::pow(hbar, 5)) * integral;
        C.C00 = base * noise.weights.w00;
        C.C0i = base * noise.weights.w0i;
        C.Cij = base * noise.weights.wij;
    }

    MomentumDiagonalData data;
    data.mass = mass.M;
    data.hbar = scales.hbar;
    data.c = scales.c;
    data.C00 = C.C00;
    data.C0i = C.C0i;
    data.Cij = C.Cij;

    return Superoperator::make_momentum(
        data, Regime::MomentumLimit,
        fingerprint_of("momentum", {noise.alpha, lambda, noise.L, noise.l, mass.M, C.C00, C.C0i,
                                    C.Cij}));
}

Superoperator build_breuer_generator(const NoiseSpec& noise, const MassSpec& mass, double lambda,
                                     const Scales& scales) {
    noise.validate();
    mass.validate();
    MomentumDiagonalData data;
    data.mass = mass.M;
    data.hbar = scales.hbar;
    data.c = scales.c;
    data.Cij = noise.alpha * noise.alpha * lambda / (scales.hbar * scales.hbar);

    auto gen = Superoperator::make_momentum(
        data, Regime::Breuer,
        fingerprint_of("breuer", {noise.alpha, lambda, mass.M}));
    if (!noise.weights.tensor_dominant())
        gen.add_note("regime mismatch: weights are not hij-dominant for the energy-basis limit");
    if (mass.density != DensityKind::Point)
        gen.add_note("regime mismatch: energy-basis limit assumes a pointlike mass density");
    return gen;
}

Superoperator build_breuer_generator_tc(double Tc, const MassSpec& mass, const Scales& scales) {
    if (!(Tc >= 0.0)) throw std::domain_error("build_breuer_generator_tc: Tc >= 0");
    mass.validate();
    MomentumDiagonalData data;
    data.mass = mass.M;
    data.hbar = scales.hbar;
    data.c = scales.c;
    // alpha^2 lambda = T_c / 2
    data.Cij = 0.5 * Tc / (scales.hbar * scales.hbar);
    return Superoperator::make_momentum(
        data, Regime::Breuer, fingerprint_of("breuer_tc", {Tc, mass.M}));
}

Superoperator build_full_generator(const NoiseSpec& noise, const kernels::FormFactor& ff,
                                   const Grid1D& grid, const Scales& scales,
                                   const FullGeneratorOptions& options) {
    noise.validate();
    grid.validate();
    const int n = grid.n;
    if (n > kDenseDimLimit)
        throw CapacityError("build_full_generator: N = " + std::to_string(n) +
                            " exceeds the dense guard (" + std::to_string(kDenseDimLimit) +
                            "); use the position-kernel or momentum-diagonal limits");

    const double hbar = scales.hbar;
    const double c = scales.c;
    const double M = ff.mass().M;
    const double lambda = options.lambda < 0.0 ? noise.tau_c : options.lambda;

    Matrix S = Matrix::Zero(n * n, n * n);

    // free Liouvillian -(i/hbar)[P^2/2M, .]
    const Matrix K = ops::kinetic_operator(grid, M, hbar);
    accumulate_commutator(S, K, Complex(0.0, -1.0 / hbar));

    if (noise.alpha > 0.0) {
        const kernels::AxisMarginal marginal = kernels::axis_marginal(noise, ff, scales);
        RealVector x, w;
        gauss_hermite(options.quadrature_nodes, x, w);

        const Matrix P = ops::momentum_operator(grid, hbar);
        const Matrix P2over4M = 0.5 * K;
        const double base = noise.alpha * noise.alpha * lambda / (kTwoPiPow32 * std::pow(hbar, 5));

        // per-node dissipators -coeff [G, [G^dagger, rho]], expanded as
        //   -coeff kron(I, G Gd) + coeff kron(Gd^T, G) + coeff kron(G^T, Gd)
        //   -coeff kron((Gd G)^T, I)
        std::vector<Matrix> As, Bs;
        std::vector<Complex> cs;
        Matrix ident_left = Matrix::Zero(n, n);
        Matrix ident_right = Matrix::Zero(n, n);

        auto add_channel = [&](const Matrix& G, double coeff) {
            const Matrix Gd = G.adjoint();
            As.push_back(G);
            Bs.push_back(Gd);
            cs.push_back(coeff);
            As.push_back(Gd);
            Bs.push_back(G);
            cs.push_back(coeff);
            ident_left.noalias() -= coeff * (G * Gd);
            ident_right.noalias() -= coeff * (Gd * G);
        };

        for (int k = 0; k < options.quadrature_nodes; ++k) {
            const double q = std::sqrt(2.0) * hbar * x(k) / marginal.s;
            const double node_weight =
                marginal.amplitude * std::sqrt(2.0) * hbar / marginal.s * w(k);
            const double coeff = base * node_weight;

            const Matrix E = ops::phase_operator(grid, q, hbar);

            // the axis marginal already carries the m~^2/M^2 normalization,
            // so the M^2 of (M c^2)^2 survives in the 00 block only
            if ((options.g00_position || options.g00_kinetic) && noise.weights.w00 > 0.0) {
                Matrix G00 = Matrix::Zero(n, n);
                if (options.g00_position) G00 += M * c * c * E;
                if (options.g00_kinetic) G00 += ops::anticommutator(E, P2over4M);
                add_channel(G00, coeff * noise.weights.w00);
            }
            if (options.g0i && noise.weights.w0i > 0.0) {
                Matrix G0i = 0.5 * c * ops::anticommutator(E, P);
                add_channel(G0i, coeff * noise.weights.w0i);
            }
            if (options.gij && noise.weights.wij > 0.0) {
                Matrix Gij = ops::anticommutator(E, P2over4M);
                add_channel(Gij, coeff * noise.weights.wij);
            }
        }

        if (!As.empty()) {
            accumulate_products(S, As, Bs, cs);
            accumulate_identity_terms(S, ident_left, ident_right, Complex(1.0, 0.0));
        }
    }

    auto gen = Superoperator::make_dense(
        std::move(S), Regime::Full,
        fingerprint_of("full", {noise.alpha, lambda, noise.L, noise.l, noise.weights.w00,
                                noise.weights.w0i, noise.weights.wij,
                                static_cast<double>(grid.n), grid.extent, ff.mass().M,
                                ff.mass().R, static_cast<double>(options.quadrature_nodes),
                                options.g00_position ? 1.0 : 0.0,
                                options.g00_kinetic ? 1.0 : 0.0, options.g0i ? 1.0 : 0.0,
                                options.gij ? 1.0 : 0.0}),
        n);
    return gen;
}

} // namespace gravdec::generators
