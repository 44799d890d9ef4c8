// generators.hpp — superoperators for the free term and each decoherence generator
//
// All dissipators share the structure
//   D rho = -(alpha^2 lambda / ((2 pi)^{3/2} hbar^5)) \int d^3q (m~^2/M^2)
//           sum_{channels} u~_c(q) [G_c(q), [G_c(-q), rho]]
// with the channel couplings (one spatial axis)
//   G_00(q) = M c^2 E_q + {E_q, P^2/4M},   E_q = e^{i q X / hbar}
//   G_0i(q) = (c/2) {E_q, P}
//   G_ij(q) = {E_q, P^2/4M}.
// Restricting G_00 to its position part reproduces the position-basis
// generator exactly; E_q -> 1 reproduces the momentum/energy generator with
// the same coefficients.  Every dissipator is trace-annihilating and, with
// symmetric +-q node pairing, maps hermitian matrices to hermitian matrices.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gravdec/kernels.hpp"
#include "gravdec/model.hpp"

namespace gravdec::generators {

enum class Regime { Free, Full, PositionLimit, MomentumLimit, Breuer };

// Dense guard: N^2 x N^2 storage above this is refused.
inline constexpr int kDenseDimLimit = 256;

// Gamma table over grid pair separations plus the kinetic term.
struct PositionKernelData {
    Grid1D grid;
    double mass = 1.0;
    double hbar = 1.0;
    bool kinetic = true; // false = M -> infinity dephasing limit
    // Gamma at signed offsets (i - j) in [-(n-1), n-1]; index offset n-1
    RealVector gamma;

    double gamma_at(int i, int j) const { return gamma(i - j + grid.n - 1); }
    double gamma_max() const { return gamma.maxCoeff(); }
};

// Dephasing rates over momentum pairs:
//   R(p, p') = (C00 + Cij) (E - E')^2 + C0i c^2 (p - p')^2,  E = p^2/2M.
struct MomentumDiagonalData {
    double mass = 1.0;
    double hbar = 1.0;
    double c = 1.0;

    double C00 = 0.0;
    double C0i = 0.0;
    double Cij = 0.0;

    double energy(double p) const { return p * p / (2.0 * mass); }
    double rate(double p, double pp) const {
        const double dE = energy(p) - energy(pp);
        const double dp = p - pp;
        return (C00 + Cij) * dE * dE + C0i * c * c * dp * dp;
    }
    // unitary phase velocity -(E - E')/hbar
    double phase_rate(double p, double pp) const { return -(energy(p) - energy(pp)) / hbar; }
};

class Superoperator {
public:
    Regime regime() const { return regime_; }
    std::uint64_t fingerprint() const { return fingerprint_; }
    const std::vector<std::string>& notes() const { return notes_; }

    bool is_dense() const { return dense_.has_value(); }
    const Matrix& dense() const;
    const PositionKernelData* position_kernel() const {
        return position_ ? &*position_ : nullptr;
    }
    const MomentumDiagonalData* momentum_diagonal() const {
        return momentum_ ? &*momentum_ : nullptr;
    }

    // Hilbert-space dimension when bound to a grid; 0 for grid-free momentum data.
    int dim() const { return dim_; }

    // generator action d rho / dt
    Matrix apply(const DenseState& state) const;

    // dense N^2 x N^2 matrix acting on vec(rho); grid supplies momentum nodes
    // for grid-free momentum data
    Matrix to_dense_matrix(const Grid1D& grid, const Scales& scales = Scales::natural()) const;

    static Superoperator make_dense(Matrix super, Regime regime, std::uint64_t fingerprint,
                                    int dim);
    static Superoperator make_position(PositionKernelData data, Regime regime,
                                       std::uint64_t fingerprint);
    static Superoperator make_momentum(MomentumDiagonalData data, Regime regime,
                                       std::uint64_t fingerprint);

    void add_note(std::string note) { notes_.push_back(std::move(note)); }

private:
    Regime regime_ = Regime::Free;
    std::uint64_t fingerprint_ = 0;
    int dim_ = 0;
    std::optional<Matrix> dense_;
    std::optional<PositionKernelData> position_;
    std::optional<MomentumDiagonalData> momentum_;
    std::vector<std::string> notes_;
};

// rho -> -(i/hbar)[P^2/2M, rho] with P spectral (FFT-diagonal).
Superoperator build_free_liouvillian(const Grid1D& grid, const MassSpec& mass,
                                     const Scales& scales = Scales::natural());

// Position-basis limit: (D rho)(x, x') = -Gamma(x - x') rho(x, x'), lambda
// pinned to tau_c.  Emits a regime-mismatch note (not fatal) when the weights
// are not h00-dominant.
Superoperator build_position_generator(const NoiseSpec& noise, const kernels::FormFactor& ff,
                                       const Grid1D& grid,
                                       const Scales& scales = Scales::natural(),
                                       bool kinetic = true);

// Small-q limit: momentum-pair dephasing with quadrature coefficients.
Superoperator build_momentum_generator(const NoiseSpec& noise, const kernels::FormFactor& ff,
                                       const MassSpec& mass, double lambda,
                                       const Scales& scales = Scales::natural());

// Energy-basis special case: R = (alpha^2 lambda / hbar^2) (E - E')^2.
Superoperator build_breuer_generator(const NoiseSpec& noise, const MassSpec& mass, double lambda,
                                     const Scales& scales = Scales::natural());

// Same, parameterized by the spatially averaged correlation time T_c of the
// noise via alpha^2 lambda = T_c / 2.
Superoperator build_breuer_generator_tc(double Tc, const MassSpec& mass,
                                        const Scales& scales = Scales::natural());

struct FullGeneratorOptions {
    int quadrature_nodes = 32; // Gauss-Hermite nodes matched to the Gaussian spectrum
    double lambda = -1.0;      // < 0 -> tau_c
    // channel switches; disabling g00_kinetic leaves only the pure e^{iqX}
    // Lindblad terms in the 00 block
    bool g00_position = true;
    bool g00_kinetic = true;
    bool g0i = true;
    bool gij = true;
};

// Dense generator with every dissipator channel on a symmetric +-q quadrature
// grid.  Throws CapacityError above the dense dimension guard.
Superoperator build_full_generator(const NoiseSpec& noise, const kernels::FormFactor& ff,
                                   const Grid1D& grid,
                                   const Scales& scales = Scales::natural(),
                                   const FullGeneratorOptions& options = {});

// Gauss-Hermite nodes/weights for \int e^{-x^2} f(x) dx (Golub-Welsch).
void gauss_hermite(int n, RealVector& nodes, RealVector& weights);

} // namespace gravdec::generators
